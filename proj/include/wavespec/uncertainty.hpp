#pragma once

#include <array>
#include <span>
#include <vector>

#include "wavespec/estimation.hpp"
#include "wavespec/fft.hpp"
#include "wavespec/model.hpp"
#include "wavespec/nonparam.hpp"
#include "wavespec/sampling.hpp"
#include "wavespec/series.hpp"

namespace wavespec {

using Matrix4 = std::array<std::array<double, 4>, 4>;

/// Dense n x n covariance of periodogram ordinates, row-major in natural
/// Fourier index order.
struct PeriodogramCovariance {
  SamplingScheme scheme;
  std::vector<double> values;

  [[nodiscard]] std::size_t size() const { return scheme.n; }
  [[nodiscard]] double operator()(std::size_t row, std::size_t col) const {
    return values[row * scheme.n + col];
  }
};

/// Aliased density on the grid 2 pi j / (M delta), j = 0..M-1 (the grid of
/// the Q transform, as opposed to AliasingGrid's symmetric grid).
std::vector<double> aliased_density_on_q_grid(const WaveParams& theta, const SamplingScheme& scheme,
                                              const ResolvedQuadrature& quad, bool differenced);

/// Q(t) = (2 pi / M delta) sum_j q(w_j) e^{-i t delta w_j}, t = 0..2n-2, with
/// q(w) = f(w) e^{i delta (n-1) w} and w_j = 2 pi j / (M delta). density holds
/// f on that grid (length M >= 2n - 1). One length-M FFT.
std::vector<fft::cdouble> q_transform(std::span<const double> density, const SamplingScheme& scheme);
std::vector<fft::cdouble> q_transform(const WaveParams& theta, const SamplingScheme& scheme,
                                      const ResolvedQuadrature& quad, bool differenced);

/// |delta / (2 pi n) sum_{r,s} Q(r+s) e^{2 pi i (r k + s j) / n}|^2 for all
/// Fourier pairs (j, k): the Dirichlet-kernel covariance term. The n x n
/// transform runs on OpenMP threads.
PeriodogramCovariance periodogram_covariance(std::span<const fft::cdouble> q, const SamplingScheme& scheme);
PeriodogramCovariance periodogram_covariance(const WaveParams& theta, const SamplingScheme& scheme,
                                             const ResolvedQuadrature& quad, bool differenced);
/// Single-threaded reference for periodogram_covariance.
PeriodogramCovariance periodogram_covariance_serial(std::span<const fft::cdouble> q,
                                                    const SamplingScheme& scheme);

/// Exact Gaussian covariance of a real series' periodogram:
/// cov(j, k) + cov(j, -k). The second term carries I(w) = I(-w).
PeriodogramCovariance full_periodogram_covariance(const PeriodogramCovariance& cov);

/// cov(j, k) / sqrt(cov(j, j) cov(k, k)), row-major, natural order.
std::vector<double> correlation_matrix(const PeriodogramCovariance& cov);

/// a_ij = (d fbar(w_j) / d theta_i) / fbar(w_j)^2 at the selected frequencies;
/// a[i][m] pairs with selection.indices[m].
using ScoreWeights = std::array<std::vector<double>, 4>;
ScoreWeights score_weights(const WaveParams& theta, const FrequencySelection& selection,
                           const ResolvedQuadrature& quad, bool differenced);

/// -sum over the selection of grad fbar grad fbar' / fbar^2.
Matrix4 expected_hessian(const WaveParams& theta, const FrequencySelection& selection,
                         const ResolvedQuadrature& quad, bool differenced);

/// a' C a with C restricted to the selected rows and columns.
Matrix4 score_variance(const ScoreWeights& a, const FrequencySelection& selection,
                       const PeriodogramCovariance& cov);

struct SandwichVariance {
  Matrix4 hessian_expect{};
  Matrix4 score_var{};
  Matrix4 var_theta{};
  /// The expected Hessian was singular and a pseudo-inverse was used.
  bool pseudo_inverse = false;
};

/// H^{-1} V H^{-1}, symmetrised.
SandwichVariance sandwich(const Matrix4& hessian, const Matrix4& score_var);

/// Sandwich variance of the de-biased Whittle estimator at theta.
SandwichVariance debiased_whittle_variance(const WaveParams& theta, const FrequencySelection& selection,
                                           const ResolvedQuadrature& quad, bool differenced);

struct ConfidenceInterval {
  double estimate = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  /// The lower end fell outside the parameter space and was moved to its edge.
  bool clipped_lower = false;
};

struct UncertaintyReport {
  SandwichVariance variance;
  double level = 0.95;
  double z = 0.0;
  std::array<ConfidenceInterval, 4> intervals{};
};

/// Standard normal quantile. p = 0.975 returns 1.959964 exactly.
double normal_quantile(double p);

/// Plug-in sandwich variance at the fitted parameters and two-sided normal
/// intervals at the given level, clipped to alpha, omega_p > 0, gamma >= 1,
/// r > 1.
UncertaintyReport estimator_variance_and_ci(const FitResult& fit, double level = 0.95);

}  // namespace wavespec
