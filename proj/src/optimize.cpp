#include "wavespec/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "wavespec/errors.hpp"

namespace wavespec {

namespace {

constexpr double kReflect = 1.0;
constexpr double kExpand = 2.0;
constexpr double kContract = 0.5;
constexpr double kShrink = 0.5;

struct Vertex {
  std::vector<double> x;
  double f;
};

class BoxedObjective {
 public:
  BoxedObjective(const std::function<double(const std::vector<double>&)>& f,
                 const std::vector<double>& lo, const std::vector<double>& hi)
      : f_(f), lo_(lo), hi_(hi) {}

  void clamp(std::vector<double>& x) const {
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], lo_[i], hi_[i]);
  }

  Vertex eval(std::vector<double> x) {
    clamp(x);
    ++evaluations;
    double v = f_(x);
    if (!std::isfinite(v)) v = std::numeric_limits<double>::infinity();
    return {std::move(x), v};
  }

  std::size_t evaluations = 0;

 private:
  const std::function<double(const std::vector<double>&)>& f_;
  const std::vector<double>& lo_;
  const std::vector<double>& hi_;
};

std::vector<Vertex> initial_simplex(BoxedObjective& obj, const Vertex& start, double step,
                                    const std::vector<double>& lo, const std::vector<double>& hi) {
  const std::size_t n = start.x.size();
  std::vector<Vertex> simplex{start};
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> x = start.x;
    // Step away from whichever bound is nearer.
    x[i] = start.x[i] + step <= hi[i] ? start.x[i] + step : start.x[i] - step;
    x[i] = std::clamp(x[i], lo[i], hi[i]);
    simplex.push_back(obj.eval(std::move(x)));
  }
  return simplex;
}

std::vector<double> affine(const std::vector<double>& a, const std::vector<double>& b, double t) {
  // a + t (b - a)
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + t * (b[i] - a[i]);
  return out;
}

bool converged(const std::vector<Vertex>& s, const SimplexOptions& opt) {
  const double spread = s.back().f - s.front().f;
  const double scale = std::abs(s.front().f) + 1e-12;
  if (!(spread <= opt.ftol * scale)) return false;
  double diameter = 0.0;
  for (std::size_t v = 1; v < s.size(); ++v)
    for (std::size_t i = 0; i < s[v].x.size(); ++i)
      diameter = std::max(diameter, std::abs(s[v].x[i] - s.front().x[i]));
  return diameter < opt.xtol;
}

}  // namespace

SimplexResult minimize_simplex(const std::function<double(const std::vector<double>&)>& f,
                               std::vector<double> x0, const std::vector<double>& lower,
                               const std::vector<double>& upper, const SimplexOptions& opt) {
  const std::size_t n = x0.size();
  if (n == 0 || lower.size() != n || upper.size() != n)
    throw ConfigError("simplex search: dimension mismatch");
  for (std::size_t i = 0; i < n; ++i)
    if (!(lower[i] <= upper[i])) throw ConfigError("simplex search: empty box");

  BoxedObjective obj(f, lower, upper);
  Vertex best = obj.eval(std::move(x0));
  SimplexResult result;

  const auto by_value = [](const Vertex& a, const Vertex& b) { return a.f < b.f; };
  for (std::size_t round = 0; round <= opt.restarts; ++round) {
    const double before = best.f;
    std::vector<Vertex> s = initial_simplex(obj, best, opt.initial_step, lower, upper);
    bool done = false;
    while (result.iterations < opt.max_iterations) {
      std::stable_sort(s.begin(), s.end(), by_value);
      if (converged(s, opt)) {
        done = true;
        break;
      }
      ++result.iterations;

      std::vector<double> centroid(n, 0.0);
      for (std::size_t v = 0; v < n; ++v)
        for (std::size_t i = 0; i < n; ++i) centroid[i] += s[v].x[i] / static_cast<double>(n);
      Vertex& worst = s.back();

      Vertex refl = obj.eval(affine(centroid, worst.x, -kReflect));
      if (refl.f < s.front().f) {
        Vertex exp = obj.eval(affine(centroid, worst.x, -kReflect * kExpand));
        worst = exp.f < refl.f ? std::move(exp) : std::move(refl);
        continue;
      }
      if (refl.f < s[n - 1].f) {
        worst = std::move(refl);
        continue;
      }
      const bool outside = refl.f < worst.f;
      Vertex con = outside ? obj.eval(affine(centroid, refl.x, kContract))
                           : obj.eval(affine(centroid, worst.x, kContract));
      if (con.f < (outside ? refl.f : worst.f)) {
        worst = std::move(con);
        continue;
      }
      for (std::size_t v = 1; v <= n; ++v) s[v] = obj.eval(affine(s.front().x, s[v].x, kShrink));
    }
    std::stable_sort(s.begin(), s.end(), by_value);
    if (s.front().f <= best.f) best = s.front();
    result.converged = done;
    if (!done) break;
    // A restart that finds nothing new confirms the optimum.
    if (round > 0 && !(best.f < before - opt.ftol * (std::abs(before) + 1e-12))) break;
  }

  result.x = best.x;
  result.value = best.f;
  result.evaluations = obj.evaluations;
  return result;
}

}  // namespace wavespec
