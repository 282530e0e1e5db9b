#include "wavespec/uncertainty.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "wavespec/errors.hpp"

namespace wavespec {

namespace {

using Mat4 = Eigen::Matrix4d;

Mat4 to_eigen(const Matrix4& m) {
  Mat4 out;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) out(i, j) = m[i][j];
  return out;
}

Matrix4 from_eigen(const Mat4& m) {
  Matrix4 out{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) out[i][j] = m(i, j);
  return out;
}

Mat4 symmetrised(const Mat4& m) { return 0.5 * (m + m.transpose()); }

void check_q(std::span<const fft::cdouble> q, const SamplingScheme& scheme) {
  validate(scheme, 1);
  if (q.size() < 2 * scheme.n - 1)
    throw ConfigError("Q transform needs 2n-1 = " + std::to_string(2 * scheme.n - 1) +
                      " values, got " + std::to_string(q.size()));
}

std::vector<fft::cdouble> hankel(std::span<const fft::cdouble> q, std::size_t n) {
  std::vector<fft::cdouble> a(n * n);
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t r = 0; r < n; ++r) a[s * n + r] = q[r + s];
  return a;
}

PeriodogramCovariance squared_modulus(const std::vector<fft::cdouble>& spectrum,
                                      const SamplingScheme& scheme) {
  const std::size_t n = scheme.n;
  const double scale = scheme.delta / (2.0 * std::numbers::pi * static_cast<double>(n));
  std::vector<std::size_t> bin(n);
  for (std::size_t p = 0; p < n; ++p) bin[p] = grid::fft_bin(grid::index_at(p, n), n);
  PeriodogramCovariance cov{scheme, std::vector<double>(n * n)};
  const auto rows = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t pr = 0; pr < rows; ++pr) {
    const auto p = static_cast<std::size_t>(pr);
    const fft::cdouble* src = &spectrum[bin[p] * n];
    double* dst = &cov.values[p * n];
    for (std::size_t c = 0; c < n; ++c) dst[c] = std::norm(scale * src[bin[c]]);
  }
  return cov;
}

void check_selection(const FrequencySelection& sel, const SamplingScheme& scheme) {
  if (sel.scheme.n != scheme.n || sel.scheme.delta != scheme.delta)
    throw DomainError("frequency selection was made on a different Fourier grid");
  const long lo = grid::first_index(scheme.n);
  const long hi = grid::last_index(scheme.n);
  for (long j : sel.indices)
    if (j < lo || j > hi)
      throw DomainError("selected index " + std::to_string(j) + " is outside the Fourier grid");
}

}  // namespace

std::vector<double> aliased_density_on_q_grid(const WaveParams& theta, const SamplingScheme& scheme,
                                              const ResolvedQuadrature& quad, bool differenced) {
  const std::size_t m = quad.m;
  std::vector<double> out(m);
  if (m % 2 == 0) {
    // The symmetric grid is the same point set shifted by half a period.
    const AliasingGrid g(scheme, quad, differenced);
    const std::vector<double> sym = g.density(Jonswap(theta));
    for (std::size_t j = 0; j < m; ++j) out[j] = sym[(j + m / 2) % m];
    return out;
  }
  const double h = 2.0 * std::numbers::pi / (static_cast<double>(m) * scheme.delta);
  for (std::size_t j = 0; j < m; ++j) {
    const double w = 2 * j < m ? h * static_cast<double>(j)
                               : -h * static_cast<double>(m - j);
    out[j] = aliased_spectrum(w, theta, scheme, quad, differenced);
  }
  return out;
}

std::vector<fft::cdouble> q_transform(std::span<const double> density, const SamplingScheme& scheme) {
  validate(scheme, 1);
  const std::size_t m = density.size();
  const std::size_t n = scheme.n;
  if (m < 2 * n - 1)
    throw ConfigError("Riemann grid M = " + std::to_string(m) + " is below 2n-1 = " +
                      std::to_string(2 * n - 1));
  const double h = 2.0 * std::numbers::pi / (static_cast<double>(m) * scheme.delta);
  std::vector<fft::cdouble> q(m);
  for (std::size_t j = 0; j < m; ++j) {
    // e^{i delta (n-1) w_j} with w_j = 2 pi j / (M delta); reduce the phase mod M.
    const std::size_t turns = (j * (n - 1)) % m;
    const double phase = 2.0 * std::numbers::pi * static_cast<double>(turns) / static_cast<double>(m);
    q[j] = h * density[j] * fft::cdouble(std::cos(phase), std::sin(phase));
  }
  std::vector<fft::cdouble> out = fft::dft(q, fft::Direction::Forward);
  out.resize(2 * n - 1);
  return out;
}

std::vector<fft::cdouble> q_transform(const WaveParams& theta, const SamplingScheme& scheme,
                                      const ResolvedQuadrature& quad, bool differenced) {
  return q_transform(aliased_density_on_q_grid(theta, scheme, quad, differenced), scheme);
}

PeriodogramCovariance periodogram_covariance(std::span<const fft::cdouble> q, const SamplingScheme& scheme) {
  check_q(q, scheme);
  std::vector<fft::cdouble> a = hankel(q, scheme.n);
  fft::dft2d_inplace(a, scheme.n, scheme.n, fft::Direction::Backward);
  return squared_modulus(a, scheme);
}

PeriodogramCovariance periodogram_covariance(const WaveParams& theta, const SamplingScheme& scheme,
                                             const ResolvedQuadrature& quad, bool differenced) {
  return periodogram_covariance(q_transform(theta, scheme, quad, differenced), scheme);
}

PeriodogramCovariance periodogram_covariance_serial(std::span<const fft::cdouble> q,
                                                    const SamplingScheme& scheme) {
  check_q(q, scheme);
  const std::size_t n = scheme.n;
  std::vector<fft::cdouble> a = hankel(q, n);
  fft::dft2d_inplace_serial(a, n, n, fft::Direction::Backward);
  const double scale = scheme.delta / (2.0 * std::numbers::pi * static_cast<double>(n));
  PeriodogramCovariance cov{scheme, std::vector<double>(n * n)};
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t c = 0; c < n; ++c) {
      const std::size_t bp = grid::fft_bin(grid::index_at(p, n), n);
      const std::size_t bc = grid::fft_bin(grid::index_at(c, n), n);
      cov.values[p * n + c] = std::norm(scale * a[bp * n + bc]);
    }
  return cov;
}

PeriodogramCovariance full_periodogram_covariance(const PeriodogramCovariance& cov) {
  const std::size_t n = cov.size();
  // Position holding the index congruent to -j mod n.
  std::vector<std::size_t> mirror(n);
  for (std::size_t p = 0; p < n; ++p) {
    const std::size_t b = grid::fft_bin(grid::index_at(p, n), n);
    const long neg = static_cast<long>((n - b) % n);
    mirror[p] = grid::position(neg > grid::last_index(n) ? neg - static_cast<long>(n) : neg, n);
  }
  PeriodogramCovariance out{cov.scheme, std::vector<double>(n * n)};
  const auto rows = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t pr = 0; pr < rows; ++pr) {
    const auto p = static_cast<std::size_t>(pr);
    for (std::size_t c = 0; c < n; ++c) out.values[p * n + c] = cov(p, c) + cov(p, mirror[c]);
  }
  return out;
}

std::vector<double> correlation_matrix(const PeriodogramCovariance& cov) {
  const std::size_t n = cov.size();
  std::vector<double> inv_sd(n);
  for (std::size_t p = 0; p < n; ++p) {
    const double d = cov(p, p);
    if (!(d > 0.0)) throw NumericalError("periodogram variance is not positive at position " +
                                         std::to_string(p));
    inv_sd[p] = 1.0 / std::sqrt(d);
  }
  std::vector<double> out(n * n);
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t c = 0; c < n; ++c) out[p * n + c] = cov(p, c) * inv_sd[p] * inv_sd[c];
    out[p * n + p] = 1.0;
  }
  return out;
}

ScoreWeights score_weights(const WaveParams& theta, const FrequencySelection& selection,
                           const ResolvedQuadrature& quad, bool differenced) {
  check_selection(selection, selection.scheme);
  const ExpectedPeriodogramModel model(selection.scheme, quad, differenced);
  std::array<std::vector<double>, 4> grad;
  const std::vector<double> fbar = model.evaluate(theta, grad);
  const std::vector<std::size_t> pos = selection.positions();
  ScoreWeights a;
  for (auto& v : a) v.resize(pos.size());
  for (std::size_t m = 0; m < pos.size(); ++m) {
    const double f = fbar[pos[m]];
    if (!(f > 0.0))
      throw NumericalError("expected periodogram is not positive at a selected frequency");
    for (int i = 0; i < 4; ++i) a[i][m] = grad[i][pos[m]] / (f * f);
  }
  return a;
}

Matrix4 expected_hessian(const WaveParams& theta, const FrequencySelection& selection,
                         const ResolvedQuadrature& quad, bool differenced) {
  check_selection(selection, selection.scheme);
  const ExpectedPeriodogramModel model(selection.scheme, quad, differenced);
  std::array<std::vector<double>, 4> grad;
  const std::vector<double> fbar = model.evaluate(theta, grad);
  Mat4 h = Mat4::Zero();
  for (std::size_t p : selection.positions()) {
    const double f = fbar[p];
    if (!(f > 0.0))
      throw NumericalError("expected periodogram is not positive at a selected frequency");
    Eigen::Vector4d g(grad[0][p], grad[1][p], grad[2][p], grad[3][p]);
    h.noalias() -= (g / f) * (g / f).transpose();
  }
  return from_eigen(symmetrised(h));
}

Matrix4 score_variance(const ScoreWeights& a, const FrequencySelection& selection,
                       const PeriodogramCovariance& cov) {
  check_selection(selection, cov.scheme);
  const std::vector<std::size_t> pos = selection.positions();
  for (const auto& v : a)
    if (v.size() != pos.size()) throw DomainError("score weights do not match the selection");
  const std::size_t s = pos.size();

  // b = C a, one selected row per iteration.
  std::vector<Eigen::Vector4d> b(s, Eigen::Vector4d::Zero());
  const auto rows = static_cast<std::ptrdiff_t>(s);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t mr = 0; mr < rows; ++mr) {
    const auto m = static_cast<std::size_t>(mr);
    Eigen::Vector4d acc = Eigen::Vector4d::Zero();
    for (std::size_t c = 0; c < s; ++c) {
      const double w = cov(pos[m], pos[c]);
      for (int i = 0; i < 4; ++i) acc[i] += w * a[i][c];
    }
    b[m] = acc;
  }
  Mat4 v = Mat4::Zero();
  for (std::size_t m = 0; m < s; ++m)
    for (int i = 0; i < 4; ++i) v.row(i) += a[i][m] * b[m].transpose();
  return from_eigen(symmetrised(v));
}

SandwichVariance sandwich(const Matrix4& hessian, const Matrix4& score_var) {
  SandwichVariance out;
  out.hessian_expect = hessian;
  out.score_var = score_var;
  // Invert the (positive semidefinite) information -H spectrally.
  const Eigen::SelfAdjointEigenSolver<Mat4> eig(-symmetrised(to_eigen(hessian)));
  if (eig.info() != Eigen::Success) throw NumericalError("eigen-decomposition of the Hessian failed");
  const Eigen::Vector4d lambda = eig.eigenvalues();
  const double cutoff = 1e-12 * std::max(std::abs(lambda.maxCoeff()), std::numeric_limits<double>::min());
  Eigen::Vector4d inv;
  for (int i = 0; i < 4; ++i) {
    if (lambda[i] > cutoff) {
      inv[i] = 1.0 / lambda[i];
    } else {
      inv[i] = 0.0;
      out.pseudo_inverse = true;
    }
  }
  const Mat4 info_inv = eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose();
  out.var_theta = from_eigen(symmetrised(info_inv * to_eigen(score_var) * info_inv));
  return out;
}

SandwichVariance debiased_whittle_variance(const WaveParams& theta, const FrequencySelection& selection,
                                           const ResolvedQuadrature& quad, bool differenced) {
  const Matrix4 h = expected_hessian(theta, selection, quad, differenced);
  const ScoreWeights a = score_weights(theta, selection, quad, differenced);
  const PeriodogramCovariance cov =
      full_periodogram_covariance(periodogram_covariance(theta, selection.scheme, quad, differenced));
  return sandwich(h, score_variance(a, selection, cov));
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("normal quantile needs 0 < p < 1");
  if (p == 0.975) return 1.959964;
  if (p == 0.025) return -1.959964;
  // Acklam's rational approximation, then one Halley step against erfc.
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                 1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                 6.680131188771972e+01,  -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                 -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                 3.754408661907416e+00};
  constexpr double p_low = 0.02425;
  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double e = 0.5 * std::erfc(-x / std::numbers::sqrt2) - p;
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

UncertaintyReport estimator_variance_and_ci(const FitResult& fit, double level) {
  if (!(level > 0.0 && level < 1.0)) throw ConfigError("confidence level must lie in (0, 1)");
  UncertaintyReport rep;
  rep.level = level;
  rep.z = normal_quantile(0.5 + 0.5 * level);
  rep.variance = debiased_whittle_variance(fit.theta_hat, fit.selection, fit.quadrature, fit.differenced);

  const ParamVector est = fit.theta_hat.free();
  // Parameter space: alpha, omega_p > 0, gamma >= 1, r > 1.
  const ParamVector floor{0.0, 0.0, 1.0, 1.0};
  for (int i = 0; i < 4; ++i) {
    ConfidenceInterval& ci = rep.intervals[i];
    const double sd = std::sqrt(std::max(rep.variance.var_theta[i][i], 0.0));
    ci.estimate = est[i];
    ci.lower = est[i] - rep.z * sd;
    ci.upper = est[i] + rep.z * sd;
    if (ci.lower < floor[i]) {
      ci.lower = floor[i];
      ci.clipped_lower = true;
    }
  }
  return rep;
}

}  // namespace wavespec
