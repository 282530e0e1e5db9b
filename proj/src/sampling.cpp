#include "wavespec/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "wavespec/errors.hpp"
#include "wavespec/fft.hpp"

namespace wavespec {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_within_nyquist(double omega, const SamplingScheme& scheme) {
  if (!(std::abs(omega) <= scheme.nyquist() * (1.0 + 1e-12)))
    throw DomainError("frequency " + std::to_string(omega) + " beyond Nyquist " +
                      std::to_string(scheme.nyquist()));
}

void check_grid(std::size_t m, const SamplingScheme& scheme) {
  if (m < 2 * scheme.n)
    throw ConfigError("Riemann grid size M=" + std::to_string(m) + " must be at least 2N=" +
                      std::to_string(2 * scheme.n));
}

}  // namespace

void validate(const SamplingScheme& scheme, std::size_t min_n) {
  if (!(std::isfinite(scheme.delta) && scheme.delta > 0.0))
    throw DomainError("sampling interval must be positive");
  if (scheme.n < min_n)
    throw DomainError("record length " + std::to_string(scheme.n) + " below minimum " +
                      std::to_string(min_n));
}

TimeSeries demean(const TimeSeries& x) {
  TimeSeries out = x;
  if (out.values.empty()) return out;
  double mean = 0.0;
  for (double v : out.values) mean += v;
  mean /= static_cast<double>(out.values.size());
  for (double& v : out.values) v -= mean;
  return out;
}

ResolvedQuadrature resolve_quadrature(const QuadratureConfig& cfg, const WaveParams& theta,
                                      const SamplingScheme& scheme) {
  validate(scheme);
  if (!(cfg.tail_threshold > 0.0)) throw ConfigError("tail threshold must be positive");
  ResolvedQuadrature out;
  out.tail_threshold = cfg.tail_threshold;
  out.m = cfg.m.value_or(std::max(kMinRiemannGrid, 2 * scheme.n));
  check_grid(out.m, scheme);

  if (cfg.k_folds) {
    if (*cfg.k_folds < 0) throw ConfigError("fold count K must be >= 0");
    out.k_folds = *cfg.k_folds;
    return out;
  }
  const Jonswap model(theta);
  // For |w| <= pi/delta the folds dropped at order j > K sit at least
  // (2j - 1) pi / delta away, so twice the sum of f there bounds the error.
  const auto omitted = [&](int k) {
    double sum = 0.0;
    for (long j = k + 1; j <= k + 100000; ++j) {
      const double term = model.density((2.0 * static_cast<double>(j) - 1.0) * scheme.nyquist());
      sum += term;
      if (j > k + 10 && term < 1e-6 * sum) break;
    }
    return 2.0 * sum;
  };
  for (int k = 0; k <= kMaxFolds; ++k) {
    const double edge = (2.0 * k + 1.0) * scheme.nyquist();
    if (edge > theta.omega_p && model.density(edge) < cfg.tail_threshold &&
        omitted(k) < cfg.tail_threshold) {
      out.k_folds = k;
      return out;
    }
  }
  throw ConfigError("spectral tail does not fall below the threshold within " +
                    std::to_string(kMaxFolds) + " folds; set K explicitly");
}

double differencing_factor(double omega, double delta) {
  const double s = std::sin(0.5 * omega * delta);
  return 4.0 * s * s;
}

double differenced_spectrum(double omega, const WaveParams& theta, double delta) {
  return differencing_factor(omega, delta) * eval_spectrum(omega, theta);
}

double aliased_spectrum(double omega, const WaveParams& theta, const SamplingScheme& scheme,
                        const ResolvedQuadrature& quad, bool differenced) {
  validate(scheme);
  check_within_nyquist(omega, scheme);
  const Jonswap model(theta);
  const double period = kTwoPi / scheme.delta;
  double sum = 0.0;
  for (int k = -quad.k_folds; k <= quad.k_folds; ++k) sum += model.density(omega + k * period);
  return differenced ? sum * differencing_factor(omega, scheme.delta) : sum;
}

ParamVector aliased_spectrum_gradient(double omega, const WaveParams& theta,
                                      const SamplingScheme& scheme, const ResolvedQuadrature& quad,
                                      bool differenced) {
  validate(scheme);
  check_within_nyquist(omega, scheme);
  const Jonswap model(theta);
  const double period = kTwoPi / scheme.delta;
  ParamVector sum{0.0, 0.0, 0.0, 0.0};
  for (int k = -quad.k_folds; k <= quad.k_folds; ++k) {
    const ParamVector g = model.gradient(omega + k * period);
    for (std::size_t i = 0; i < 4; ++i) sum[i] += g[i];
  }
  if (differenced) {
    const double factor = differencing_factor(omega, scheme.delta);
    for (double& v : sum) v *= factor;
  }
  return sum;
}

AliasingGrid::AliasingGrid(const SamplingScheme& scheme, const ResolvedQuadrature& quad,
                           bool differenced)
    : scheme_(scheme), quad_(quad), differenced_(differenced) {
  validate(scheme_);
  check_grid(quad_.m, scheme_);
  if (quad_.k_folds < 0) throw ConfigError("fold count K must be >= 0");
  folds_ = static_cast<std::size_t>(2 * quad_.k_folds + 1);

  const std::size_t m = quad_.m;
  const double h = step();
  std::vector<double> rep_omega;
  grid_rep_.resize(m);
  if (m % 2 == 0) {
    // omega_j = (j - M/2) h; the folded density is even, so |j - M/2| indexes it.
    const std::size_t half = m / 2;
    rep_omega.resize(half + 1);
    for (std::size_t i = 0; i <= half; ++i) rep_omega[i] = static_cast<double>(i) * h;
    for (std::size_t j = 0; j < m; ++j)
      grid_rep_[j] = j >= half ? j - half : half - j;
  } else {
    rep_omega.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
      rep_omega[j] = omega(j);
      grid_rep_[j] = j;
    }
  }

  const double period = kTwoPi / scheme_.delta;
  const std::size_t reps = rep_omega.size();
  rep_factor_.resize(reps);
  fold_omega_.resize(reps * folds_);
  fold_log_.resize(reps * folds_);
  for (std::size_t i = 0; i < reps; ++i) {
    rep_factor_[i] = differenced_ ? differencing_factor(rep_omega[i], scheme_.delta) : 1.0;
    for (std::size_t f = 0; f < folds_; ++f) {
      const int k = static_cast<int>(f) - quad_.k_folds;
      const double w = std::abs(rep_omega[i] + k * period);
      fold_omega_[i * folds_ + f] = w;
      fold_log_[i * folds_ + f] = w > 0.0 ? std::log(w) : -std::numeric_limits<double>::infinity();
    }
  }
}

double AliasingGrid::step() const {
  return kTwoPi / (static_cast<double>(quad_.m) * scheme_.delta);
}

double AliasingGrid::omega(std::size_t j) const {
  return -scheme_.nyquist() + static_cast<double>(j) * step();
}

std::vector<double> AliasingGrid::density(const Jonswap& model) const {
  const std::size_t reps = rep_factor_.size();
  std::vector<double> rep_value(reps);
  const auto nreps = static_cast<std::ptrdiff_t>(reps);

#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ii = 0; ii < nreps; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    const double* w = &fold_omega_[i * folds_];
    const double* lw = &fold_log_[i * folds_];
    double sum = 0.0;
    for (std::size_t f = 0; f < folds_; ++f)
      if (w[f] > 0.0) sum += model.density_positive(w[f], lw[f]);
    rep_value[i] = sum * rep_factor_[i];
  }

  std::vector<double> out(quad_.m);
  for (std::size_t j = 0; j < quad_.m; ++j) out[j] = rep_value[grid_rep_[j]];
  return out;
}

std::vector<double> AliasingGrid::density_and_gradient(const Jonswap& model,
                                                       GridGradient& grad) const {
  const std::size_t reps = rep_factor_.size();
  std::vector<double> rep_value(reps);
  std::vector<ParamVector> rep_grad(reps);
  const auto nreps = static_cast<std::ptrdiff_t>(reps);

#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ii = 0; ii < nreps; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    const double* w = &fold_omega_[i * folds_];
    const double* lw = &fold_log_[i * folds_];
    double sum = 0.0;
    ParamVector gsum{0.0, 0.0, 0.0, 0.0};
    ParamVector g{};
    for (std::size_t f = 0; f < folds_; ++f) {
      if (!(w[f] > 0.0)) continue;
      sum += model.density_and_gradient_positive(w[f], lw[f], g);
      for (std::size_t p = 0; p < 4; ++p) gsum[p] += g[p];
    }
    const double factor = rep_factor_[i];
    rep_value[i] = sum * factor;
    for (std::size_t p = 0; p < 4; ++p) rep_grad[i][p] = gsum[p] * factor;
  }

  std::vector<double> out(quad_.m);
  for (auto& g : grad) g.assign(quad_.m, 0.0);
  for (std::size_t j = 0; j < quad_.m; ++j) {
    const std::size_t i = grid_rep_[j];
    out[j] = rep_value[i];
    for (std::size_t p = 0; p < 4; ++p) grad[p][j] = rep_grad[i][p];
  }
  return out;
}

std::vector<double> aliased_grid_density_serial(const WaveParams& theta, const SamplingScheme& scheme,
                                                const ResolvedQuadrature& quad, bool differenced) {
  validate(scheme);
  check_grid(quad.m, scheme);
  const Jonswap model(theta);
  const double period = kTwoPi / scheme.delta;
  const double h = kTwoPi / (static_cast<double>(quad.m) * scheme.delta);
  std::vector<double> out(quad.m);
  for (std::size_t j = 0; j < quad.m; ++j) {
    const double w = -scheme.nyquist() + static_cast<double>(j) * h;
    double sum = 0.0;
    for (int k = -quad.k_folds; k <= quad.k_folds; ++k) sum += model.density(w + k * period);
    out[j] = differenced ? sum * differencing_factor(w, scheme.delta) : sum;
  }
  return out;
}

AcfSequence acf_from_grid(std::span<const double> grid_values, const SamplingScheme& scheme) {
  check_grid(grid_values.size(), scheme);
  const std::size_t m = grid_values.size();
  const double h = kTwoPi / (static_cast<double>(m) * scheme.delta);
  const std::vector<fft::cdouble> spec = fft::rdft(grid_values);
  // Grid anchored at -pi/delta: exp(i omega_j tau delta) = (-1)^tau exp(2 pi i j tau / M).
  AcfSequence acf{std::vector<double>(scheme.n), scheme};
  for (std::size_t tau = 0; tau < scheme.n; ++tau) {
    const double sign = tau % 2 == 0 ? 1.0 : -1.0;
    acf.values[tau] = h * sign * spec[tau].real();
  }
  return acf;
}

AcfSequence approx_autocovariance(const WaveParams& theta, const SamplingScheme& scheme,
                                  const ResolvedQuadrature& quad, bool differenced) {
  const AliasingGrid g(scheme, quad, differenced);
  return acf_from_grid(g.density(Jonswap(theta)), scheme);
}

AcfGradient approx_autocovariance_gradient(const WaveParams& theta, const SamplingScheme& scheme,
                                           const ResolvedQuadrature& quad, bool differenced) {
  const AliasingGrid g(scheme, quad, differenced);
  GridGradient grid_grad;
  (void)g.density_and_gradient(Jonswap(theta), grid_grad);
  AcfGradient out;
  for (std::size_t p = 0; p < 4; ++p) out[p] = acf_from_grid(grid_grad[p], scheme);
  return out;
}

std::vector<double> expected_periodogram(const AcfSequence& acf) {
  const std::size_t n = acf.values.size();
  if (n == 0) throw DomainError("expected periodogram of an empty autocovariance");
  const double delta = acf.scheme.delta;
  if (!(delta > 0.0)) throw DomainError("sampling interval must be positive");

  std::vector<double> weighted(n);
  for (std::size_t tau = 0; tau < n; ++tau)
    weighted[tau] = (1.0 - static_cast<double>(tau) / static_cast<double>(n)) * acf.values[tau];
  const std::vector<fft::cdouble> spec = fft::rdft(weighted);

  const double scale = 1.0 / (2.0 * std::numbers::pi);
  const double c0 = acf.values[0];
  std::vector<double> out(n);
  for (std::size_t p = 0; p < n; ++p) {
    const long j = grid::index_at(p, n);
    const auto bin = static_cast<std::size_t>(std::abs(j));
    out[p] = scale * (2.0 * delta * spec[bin].real() - delta * c0);
  }
  return out;
}

std::array<std::vector<double>, 4> expected_periodogram_gradient(const AcfGradient& acf_grads) {
  std::array<std::vector<double>, 4> out;
  for (std::size_t p = 0; p < 4; ++p) out[p] = expected_periodogram(acf_grads[p]);
  return out;
}

TimeSeries difference_series(const TimeSeries& x) {
  if (x.values.size() < 2) throw DomainError("differencing needs at least two samples");
  TimeSeries y{std::vector<double>(x.values.size() - 1), x.delta};
  for (std::size_t t = 0; t + 1 < x.values.size(); ++t) y.values[t] = x.values[t + 1] - x.values[t];
  return y;
}

ExpectedPeriodogramModel::ExpectedPeriodogramModel(const SamplingScheme& scheme,
                                                   const ResolvedQuadrature& quad, bool differenced)
    : grid_(scheme, quad, differenced) {}

AcfSequence ExpectedPeriodogramModel::autocovariance(const WaveParams& theta) const {
  return acf_from_grid(grid_.density(Jonswap(theta)), grid_.scheme());
}

std::vector<double> ExpectedPeriodogramModel::evaluate(const WaveParams& theta) const {
  return expected_periodogram(autocovariance(theta));
}

std::vector<double> ExpectedPeriodogramModel::evaluate(
    const WaveParams& theta, std::array<std::vector<double>, 4>& grad) const {
  GridGradient grid_grad;
  const std::vector<double> values = grid_.density_and_gradient(Jonswap(theta), grid_grad);
  for (std::size_t p = 0; p < 4; ++p)
    grad[p] = expected_periodogram(acf_from_grid(grid_grad[p], grid_.scheme()));
  return expected_periodogram(acf_from_grid(values, grid_.scheme()));
}

}  // namespace wavespec
