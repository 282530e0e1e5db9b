#include <doctest.h>

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <complex>
#include <numbers>

#include "oracles.hpp"
#include "wavespec/errors.hpp"
#include "wavespec/simulation.hpp"
#include "wavespec/uncertainty.hpp"

using namespace wavespec;
using cd = std::complex<double>;

namespace {

constexpr double kPi = std::numbers::pi;

ResolvedQuadrature quad_with(const WaveParams& t, const SamplingScheme& s, std::size_t m) {
  QuadratureConfig cfg;
  cfg.m = m;
  return resolve_quadrature(cfg, t, s);
}

double wrapped_density(double w, const WaveParams& t, double delta, int k, bool diff = false) {
  if (w >= kPi / delta) w -= 2.0 * kPi / delta;
  return oracle::folded(w, t, delta, k, diff);
}

Eigen::Matrix4d eig(const Matrix4& m) {
  Eigen::Matrix4d out;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) out(i, j) = m[i][j];
  return out;
}

}  // namespace

TEST_CASE("Q transform of a flat density") {
  const SamplingScheme s{0.5, 10};
  const std::vector<double> flat(64, 1.5);
  const std::vector<cd> q = q_transform(flat, s);
  REQUIRE(q.size() == 2 * s.n - 1);
  for (std::size_t t = 0; t < q.size(); ++t) {
    if (t == s.n - 1)
      CHECK(std::abs(q[t] - cd(2.0 * kPi * 1.5 / s.delta, 0.0)) < 1e-12);
    else
      CHECK(std::abs(q[t]) < 1e-12);
  }
  CHECK_THROWS_AS(q_transform(std::vector<double>(18, 1.0), s), ConfigError);
}

TEST_CASE("Q transform agrees with the direct sum") {
  const WaveParams t;
  const SamplingScheme s{0.78125, 8};
  const std::size_t m = 64;
  const ResolvedQuadrature q = quad_with(t, s, m);
  for (bool diff : {false, true}) {
    const std::vector<cd> fast = q_transform(t, s, q, diff);
    const double h = 2.0 * kPi / (m * s.delta);
    std::vector<cd> ref(2 * s.n - 1);
    double scale = 0.0;
    for (std::size_t tt = 0; tt < ref.size(); ++tt) {
      cd acc = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        const double w = h * static_cast<double>(j);
        const cd qv = wrapped_density(w, t, s.delta, q.k_folds, diff) *
                      std::polar(1.0, s.delta * static_cast<double>(s.n - 1) * w);
        acc += qv * std::polar(1.0, -static_cast<double>(tt) * s.delta * w);
      }
      ref[tt] = h * acc;
      scale = std::max(scale, std::abs(ref[tt]));
    }
    for (std::size_t tt = 0; tt < ref.size(); ++tt) CHECK(std::abs(fast[tt] - ref[tt]) < 1e-12 * scale);
  }
}

TEST_CASE("Q transform is linear and odd grids use the direct route") {
  const SamplingScheme s{0.78125, 12};
  std::vector<double> f1(101), f2(101), sum(101);
  for (std::size_t j = 0; j < 101; ++j) {
    f1[j] = std::cos(0.1 * static_cast<double>(j)) + 2.0;
    f2[j] = 1.0 / (1.0 + static_cast<double>(j));
    sum[j] = f1[j] + f2[j];
  }
  const auto a = q_transform(f1, s), b = q_transform(f2, s), c = q_transform(sum, s);
  for (std::size_t t = 0; t < c.size(); ++t) CHECK(std::abs(c[t] - a[t] - b[t]) < 1e-12 * std::abs(c[s.n - 1]));

  const WaveParams t;
  const ResolvedQuadrature odd = quad_with(t, s, 101);
  const std::vector<double> grid = aliased_density_on_q_grid(t, s, odd, false);
  const double h = 2.0 * kPi / (101 * s.delta);
  for (std::size_t j = 0; j < 101; ++j)
    CHECK(grid[j] == doctest::Approx(wrapped_density(h * static_cast<double>(j), t, s.delta, odd.k_folds)).epsilon(1e-12));
}

TEST_CASE("periodogram covariance matches the brute-force integral") {
  const WaveParams t;
  for (std::size_t n : {4u, 8u, 16u}) {
    const SamplingScheme s{0.78125, n};
    const ResolvedQuadrature q = quad_with(t, s, 4096);
    const PeriodogramCovariance cov = periodogram_covariance(t, s, q, false);
    const std::vector<double> ref = oracle::brute_covariance(t, s, q.k_folds, 4096);
    // pairs that are uncorrelated in exact arithmetic come out near 1e-34 from
    // both routes; the floor keeps them from dominating a relative measure
    double scale = 0.0;
    for (double v : ref) scale = std::max(scale, v);
    double worst = 0.0;
    for (std::size_t i = 0; i < n * n; ++i)
      worst = std::max(worst, std::abs(cov.values[i] - ref[i]) / std::max(ref[i], 1e-20 * scale));
    CAPTURE(n);
    CHECK(worst < 1e-8);
  }
}

TEST_CASE("periodogram covariance structure") {
  const WaveParams t;
  const SamplingScheme s{0.78125, 97};
  const ResolvedQuadrature q = resolve_quadrature({}, t, s);
  const std::vector<cd> qt = q_transform(t, s, q, false);
  const PeriodogramCovariance a = periodogram_covariance(qt, s);
  const PeriodogramCovariance b = periodogram_covariance_serial(qt, s);
  double scale = 0.0;
  for (double v : a.values) scale = std::max(scale, v);
  for (std::size_t i = 0; i < a.values.size(); ++i) CHECK(std::abs(a.values[i] - b.values[i]) <= 1e-12 * scale);
  for (std::size_t j = 0; j < s.n; ++j) {
    CHECK(a(j, j) > 0.0);
    for (std::size_t k = 0; k < s.n; ++k) {
      CHECK(a(j, k) >= 0.0);
      CHECK(std::abs(a(j, k) - a(k, j)) <= 1e-13 * scale);
    }
  }

  // a global phase on q leaves every entry unchanged
  std::vector<cd> rotated = qt;
  for (cd& v : rotated) v *= std::polar(1.0, 0.83);
  const PeriodogramCovariance c = periodogram_covariance(rotated, s);
  for (std::size_t i = 0; i < a.values.size(); ++i) CHECK(std::abs(a.values[i] - c.values[i]) <= 1e-12 * scale);

  // the diagonal is the variance of the periodogram: E[I]^2 from the same quadrature
  const std::vector<double> e = expected_periodogram(approx_autocovariance(t, s, q));
  for (std::size_t j = 0; j < s.n; ++j) CHECK(std::sqrt(a(j, j)) == doctest::Approx(e[j]).epsilon(1e-9));
}

TEST_CASE("full covariance adds the mirrored term") {
  const WaveParams t;
  const SamplingScheme s{0.78125, 10};
  const PeriodogramCovariance c = periodogram_covariance(t, s, resolve_quadrature({}, t, s), false);
  const PeriodogramCovariance f = full_periodogram_covariance(c);
  for (long j = grid::first_index(s.n); j <= grid::last_index(s.n); ++j)
    for (long k = grid::first_index(s.n); k <= grid::last_index(s.n); ++k) {
      long mk = -k;
      if (mk < grid::first_index(s.n)) mk += static_cast<long>(s.n);
      const std::size_t pj = grid::position(j, s.n), pk = grid::position(k, s.n);
      CHECK(f(pj, pk) == doctest::Approx(c(pj, pk) + c(pj, grid::position(mk, s.n))).epsilon(1e-15));
    }
  // I(w) = I(-w): full covariance of a pair of mirrored ordinates equals the variance
  const std::size_t p3 = grid::position(3, s.n), m3 = grid::position(-3, s.n);
  CHECK(f(p3, m3) == doctest::Approx(f(p3, p3)).epsilon(1e-12));
}

TEST_CASE("periodogram variance approaches the squared aliased density") {
  const WaveParams t;
  const SamplingScheme s{0.78125, 4096};
  const ResolvedQuadrature q = resolve_quadrature({}, t, s);
  const PeriodogramCovariance c = periodogram_covariance(t, s, q, false);
  const long j = std::lround(0.7 / s.frequency_step());
  const std::size_t p = grid::position(j, s.n);
  const double f = aliased_spectrum(j * s.frequency_step(), t, s, q);
  const double ratio = c(p, p) / (f * f);
  CHECK(ratio >= 0.9);
  CHECK(ratio <= 1.1);
}

TEST_CASE("correlation matrix") {
  const WaveParams t;
  const SamplingScheme s{0.78125, 64};
  const ResolvedQuadrature q = resolve_quadrature({}, t, s);
  const std::vector<double> r = correlation_matrix(periodogram_covariance(t, s, q, true));
  for (std::size_t j = 0; j < s.n; ++j) {
    CHECK(r[j * s.n + j] == 1.0);
    for (std::size_t k = 0; k < s.n; ++k) {
      CHECK(r[j * s.n + k] >= -1.0);
      CHECK(r[j * s.n + k] <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("expected Hessian") {
  const WaveParams t;
  const SamplingScheme s{0.78125, 256};
  const ResolvedQuadrature q = resolve_quadrature({}, t, s);
  const FrequencySelection sel = select_frequencies(s);
  const Matrix4 h = expected_hessian(t, sel, q, false);
  CHECK(h[0][0] == doctest::Approx(-static_cast<double>(sel.indices.size()) / (t.alpha * t.alpha)).epsilon(1e-12));
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) CHECK(h[i][j] == h[j][i]);
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(eig(h));
  CHECK(es.eigenvalues().maxCoeff() <= 1e-12 * es.eigenvalues().cwiseAbs().maxCoeff());
}

TEST_CASE("expected Hessian matches the finite-difference Hessian of the mean objective") {
  const WaveParams t;
  const SamplingScheme s{0.78125, 256};
  const ResolvedQuadrature q = resolve_quadrature({}, t, s);
  const FrequencySelection sel = select_frequencies(s);
  const SimulationBatch batch = simulate_gaussian(t, s, q, 17, 200);
  // the objective is linear in the data, so its mean is the objective of the mean periodogram
  SpectralEstimate mean = periodogram(batch.series[0]);
  std::fill(mean.values.begin(), mean.values.end(), 0.0);
  for (const TimeSeries& x : batch.series) {
    const SpectralEstimate p = periodogram(x);
    for (std::size_t k = 0; k < s.n; ++k) mean.values[k] += p.values[k] / 200.0;
  }
  const auto obj = [&](const ParamVector& p) { return objective_debiased_whittle(t.with_free(p), mean, sel, q); };
  const Matrix4 h = expected_hessian(t, sel, q, false);
  const ParamVector p0 = t.free();
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const double hi = 1e-4 * p0[i], hj = 1e-4 * p0[j];
      ParamVector pp = p0, pm = p0, mp = p0, mm = p0;
      pp[i] += hi; pp[j] += hj;
      pm[i] += hi; pm[j] -= hj;
      mp[i] -= hi; mp[j] += hj;
      mm[i] -= hi; mm[j] -= hj;
      const double fd = (obj(pp) - obj(pm) - obj(mp) + obj(mm)) / (4.0 * hi * hj);
      CAPTURE(i);
      CAPTURE(j);
      CHECK(std::abs(fd - h[i][j]) < 0.1 * std::abs(h[i][j]));
    }
}

TEST_CASE("score variance toys") {
  const SamplingScheme s{1.0, 6};
  const FrequencySelection sel = select_frequencies(s);
  PeriodogramCovariance id{s, std::vector<double>(36, 0.0)};
  for (std::size_t j = 0; j < 6; ++j) id.values[j * 6 + j] = 1.0;

  ScoreWeights zero;
  for (auto& v : zero) v.assign(sel.indices.size(), 0.0);
  for (const auto& row : score_variance(zero, sel, id))
    for (double v : row) CHECK(v == 0.0);

  ScoreWeights a = zero;
  double ss = 0.0;
  for (std::size_t m = 0; m < sel.indices.size(); ++m) {
    a[0][m] = 0.5 + static_cast<double>(m);
    ss += a[0][m] * a[0][m];
  }
  const Matrix4 v = score_variance(a, sel, id);
  CHECK(v[0][0] == doctest::Approx(ss));
  CHECK(v[1][1] == 0.0);

  ScoreWeights twice = a;
  for (double& x : twice[0]) x *= 2.0;
  CHECK(score_variance(twice, sel, id)[0][0] == doctest::Approx(4.0 * ss));

  FrequencySelection outside = sel;
  outside.indices.back() = 9;
  CHECK_THROWS_AS(score_variance(a, outside, id), DomainError);
  const FrequencySelection other = select_frequencies(SamplingScheme{1.0, 8});
  CHECK_THROWS_AS(score_variance(a, other, id), DomainError);
}

TEST_CASE("score variance matches Monte Carlo") {
  const WaveParams t;
  const SamplingScheme s{0.78125, 256};
  const ResolvedQuadrature q = resolve_quadrature({}, t, s);
  const FrequencySelection sel = select_frequencies(s);
  const ScoreWeights a = score_weights(t, sel, q, false);
  const PeriodogramCovariance cov = full_periodogram_covariance(periodogram_covariance(t, s, q, false));
  const Matrix4 v = score_variance(a, sel, cov);

  const ExpectedPeriodogramModel model(s, q, false);
  std::array<std::vector<double>, 4> grad;
  const std::vector<double> fbar = model.evaluate(t, grad);
  const std::vector<std::size_t> pos = sel.positions();
  const std::size_t reps = 2000;
  const SimulationBatch batch = simulate_gaussian(t, s, q, 23, reps);
  std::vector<Eigen::Vector4d> scores;
  Eigen::Vector4d mean = Eigen::Vector4d::Zero();
  for (const TimeSeries& x : batch.series) {
    const SpectralEstimate p = periodogram(x);
    Eigen::Vector4d sc = Eigen::Vector4d::Zero();
    for (std::size_t k : pos)
      for (int i = 0; i < 4; ++i) sc[i] += grad[i][k] * (p.values[k] / (fbar[k] * fbar[k]) - 1.0 / fbar[k]);
    scores.push_back(sc);
    mean += sc / static_cast<double>(reps);
  }
  Eigen::Matrix4d mc = Eigen::Matrix4d::Zero();
  for (const auto& sc : scores) mc += (sc - mean) * (sc - mean).transpose() / static_cast<double>(reps - 1);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      CAPTURE(i);
      CAPTURE(j);
      CHECK(std::abs(v[i][j] - mc(i, j)) < 0.15 * std::abs(mc(i, j)));
    }
}

TEST_CASE("sandwich") {
  Matrix4 h{};
  Matrix4 v{};
  for (int i = 0; i < 4; ++i) {
    h[i][i] = -(i + 1.0);
    v[i][i] = 2.0 * (i + 1.0);
  }
  h[0][1] = h[1][0] = 0.3;
  v[2][3] = v[3][2] = 0.4;
  const SandwichVariance a = sandwich(h, v);
  CHECK_FALSE(a.pseudo_inverse);
  const Eigen::Matrix4d hi = eig(h).inverse();
  const Eigen::Matrix4d ref = hi * eig(v) * hi;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      CHECK(a.var_theta[i][j] == doctest::Approx(ref(i, j)).epsilon(1e-12).scale(1e-14));
      CHECK(a.var_theta[i][j] == a.var_theta[j][i]);
    }

  // scaling the score by 2 quadruples V and doubles H: the sandwich is unchanged
  Matrix4 h2 = h, v4 = v;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      h2[i][j] *= 2.0;
      v4[i][j] *= 4.0;
    }
  const SandwichVariance b = sandwich(h2, v4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) CHECK(b.var_theta[i][j] == doctest::Approx(a.var_theta[i][j]).epsilon(1e-12).scale(1e-14));

  Matrix4 singular = h;
  for (int i = 0; i < 4; ++i) singular[3][i] = singular[i][3] = 0.0;
  const SandwichVariance c = sandwich(singular, v);
  CHECK(c.pseudo_inverse);
  for (const auto& row : c.var_theta)
    for (double x : row) CHECK(std::isfinite(x));
}

TEST_CASE("de-biased Whittle variance is positive semidefinite") {
  const WaveParams t;
  const SamplingScheme s{0.78125, 512};
  const SandwichVariance sv =
      debiased_whittle_variance(t, select_frequencies(s), resolve_quadrature({}, t, s), false);
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(eig(sv.var_theta));
  CHECK(es.eigenvalues().minCoeff() >= -1e-10 * es.eigenvalues().maxCoeff());
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> ev(eig(sv.score_var));
  CHECK(ev.eigenvalues().minCoeff() >= -1e-10 * ev.eigenvalues().maxCoeff());
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      CHECK(sv.var_theta[i][j] == sv.var_theta[j][i]);
      CHECK(sv.hessian_expect[i][j] == sv.hessian_expect[j][i]);
    }
}

TEST_CASE("normal quantile") {
  CHECK(normal_quantile(0.975) == 1.959964);
  CHECK(normal_quantile(0.5) == doctest::Approx(0.0).scale(1.0));
  CHECK(std::abs(normal_quantile(0.8413447460685429) - 1.0) < 1e-8);
  CHECK(std::abs(normal_quantile(0.001) + 3.090232306167813) < 1e-8);
  CHECK(std::abs(normal_quantile(0.995) - 2.5758293035489004) < 1e-8);
  CHECK(std::abs(normal_quantile(1e-10) + 6.361340902404056) < 1e-8);
  for (double p : {0.01, 0.2, 0.4, 0.75}) CHECK(normal_quantile(p) == doctest::Approx(-normal_quantile(1.0 - p)).epsilon(1e-10));
  CHECK_THROWS_AS(normal_quantile(0.0), DomainError);
  CHECK_THROWS_AS(normal_quantile(1.0), DomainError);
}

TEST_CASE("intervals are clipped at the gamma boundary and narrow with the level") {
  const WaveParams t{0.7, 0.7, 1.0, 5.0};
  const SamplingScheme s{0.78125, 2304};
  const ResolvedQuadrature q = resolve_quadrature({}, t, s);
  FitResult fit;
  fit.theta_hat = t;
  fit.selection = select_frequencies(s);
  fit.quadrature = q;
  fit.scheme = s;
  const UncertaintyReport wide = estimator_variance_and_ci(fit);
  CHECK(wide.z == 1.959964);
  CHECK(wide.intervals[kGamma].lower == 1.0);
  CHECK(wide.intervals[kGamma].clipped_lower);
  CHECK_FALSE(wide.intervals[kTail].clipped_lower);
  const UncertaintyReport narrow = estimator_variance_and_ci(fit, 0.5);
  for (int i = 0; i < 4; ++i) {
    CHECK(std::isfinite(wide.intervals[i].lower));
    CHECK(std::isfinite(wide.intervals[i].upper));
    CHECK(narrow.intervals[i].upper - narrow.intervals[i].lower < wide.intervals[i].upper - wide.intervals[i].lower);
    CHECK(wide.intervals[i].estimate == t.free()[i]);
  }
  CHECK_THROWS_AS(estimator_variance_and_ci(fit, 1.0), ConfigError);
}

TEST_CASE("covariance at record length 2304 finishes well within a minute") {
  const WaveParams t;
  const SamplingScheme s{0.78125, 2304};
  const auto start = std::chrono::steady_clock::now();
  const PeriodogramCovariance c = periodogram_covariance(t, s, resolve_quadrature({}, t, s), false);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  CHECK(c.size() == 2304);
  CHECK(secs < 60.0);
}
