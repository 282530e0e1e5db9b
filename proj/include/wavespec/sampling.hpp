#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "wavespec/model.hpp"
#include "wavespec/series.hpp"

namespace wavespec {

/// Quadrature controls for the numerical autocovariance. Unset fields are
/// resolved by resolve_quadrature().
struct QuadratureConfig {
  /// Riemann grid size over [-pi/delta, pi/delta); default max(8192, 2n).
  std::optional<std::size_t> m;
  /// Aliasing truncation: folds k = -K..K are summed.
  std::optional<int> k_folds;
  /// Density below which folded tail contributions are dropped (m^2 s / rad).
  double tail_threshold = 1e-6;
};

struct ResolvedQuadrature {
  std::size_t m = 0;
  int k_folds = 0;
  double tail_threshold = 1e-6;
};

inline constexpr std::size_t kMinRiemannGrid = 8192;
inline constexpr int kMaxFolds = 4096;

/// Fills in M and K. K is the smallest fold count with (2K+1) pi / delta
/// beyond the peak, f((2K+1) pi / delta) < tail_threshold, and the dropped
/// folds adding up to less than tail_threshold anywhere in the band. Throws
/// ConfigError if M < 2n or K would exceed kMaxFolds.
ResolvedQuadrature resolve_quadrature(const QuadratureConfig& cfg, const WaveParams& theta,
                                      const SamplingScheme& scheme);

/// Model autocovariance at lags 0, delta, ..., (n-1) delta.
struct AcfSequence {
  std::vector<double> values;
  SamplingScheme scheme;
};

using AcfGradient = std::array<AcfSequence, 4>;
using GridGradient = std::array<std::vector<double>, 4>;

/// 4 sin^2(omega delta / 2): spectral transfer of first differencing.
double differencing_factor(double omega, double delta);

/// Spectrum of the differenced process, 4 sin^2(omega delta / 2) f(omega).
double differenced_spectrum(double omega, const WaveParams& theta, double delta);

/// Truncated aliased density sum_{k=-K..K} f(omega + 2 pi k / delta), optionally
/// multiplied by the differencing factor. |omega| must not exceed Nyquist.
double aliased_spectrum(double omega, const WaveParams& theta, const SamplingScheme& scheme,
                        const ResolvedQuadrature& quad, bool differenced = false);
ParamVector aliased_spectrum_gradient(double omega, const WaveParams& theta,
                                      const SamplingScheme& scheme, const ResolvedQuadrature& quad,
                                      bool differenced = false);

/// The folded density on the Riemann grid omega_j = -pi/delta + 2 pi j / (M delta),
/// j = 0..M-1. Fold abscissae and their logs are tabulated once so that repeated
/// evaluations at different parameters (the optimiser's inner loop) cost one
/// exp per fold term. Evaluation is an OpenMP-parallel loop over grid points.
class AliasingGrid {
 public:
  AliasingGrid(const SamplingScheme& scheme, const ResolvedQuadrature& quad, bool differenced);

  [[nodiscard]] std::size_t size() const { return quad_.m; }
  [[nodiscard]] double step() const;  // 2 pi / (M delta)
  [[nodiscard]] double omega(std::size_t j) const;
  [[nodiscard]] const SamplingScheme& scheme() const { return scheme_; }
  [[nodiscard]] const ResolvedQuadrature& quadrature() const { return quad_; }
  [[nodiscard]] bool differenced() const { return differenced_; }

  [[nodiscard]] std::vector<double> density(const Jonswap& model) const;
  [[nodiscard]] std::vector<double> density_and_gradient(const Jonswap& model, GridGradient& grad) const;

 private:
  SamplingScheme scheme_;
  ResolvedQuadrature quad_;
  bool differenced_;
  std::size_t folds_;                 // 2K + 1
  std::vector<double> rep_factor_;    // differencing factor per representative point
  std::vector<double> fold_omega_;    // |omega + 2 pi k / delta|, rep-major
  std::vector<double> fold_log_;      // log of the above
  std::vector<std::size_t> grid_rep_; // grid point -> representative point
};

/// Serial reference for AliasingGrid::density: direct fold sums at every grid
/// point, no tabulation and no symmetry.
std::vector<double> aliased_grid_density_serial(const WaveParams& theta, const SamplingScheme& scheme,
                                                const ResolvedQuadrature& quad, bool differenced);

/// Left-endpoint Riemann approximation of c(tau delta) = int f_delta(w) e^{i w tau delta} dw
/// from grid values via one length-M real FFT. grid_values must come from an
/// AliasingGrid of the same scheme (size M >= 2n).
AcfSequence acf_from_grid(std::span<const double> grid_values, const SamplingScheme& scheme);

AcfSequence approx_autocovariance(const WaveParams& theta, const SamplingScheme& scheme,
                                  const ResolvedQuadrature& quad, bool differenced = false);
AcfGradient approx_autocovariance_gradient(const WaveParams& theta, const SamplingScheme& scheme,
                                           const ResolvedQuadrature& quad, bool differenced = false);

/// E[I(omega)] at every Fourier frequency (natural order) from the triangle-
/// weighted transform of the autocovariance; one FFT.
std::vector<double> expected_periodogram(const AcfSequence& acf);
std::array<std::vector<double>, 4> expected_periodogram_gradient(const AcfGradient& acf_grads);

/// First difference y_t = x_{t+1} - x_t; length n - 1.
TimeSeries difference_series(const TimeSeries& x);

/// The de-biased model object: theta -> expected periodogram (and its
/// gradient) for a fixed scheme, quadrature and differencing choice.
class ExpectedPeriodogramModel {
 public:
  ExpectedPeriodogramModel(const SamplingScheme& scheme, const ResolvedQuadrature& quad,
                           bool differenced);

  [[nodiscard]] std::vector<double> evaluate(const WaveParams& theta) const;
  [[nodiscard]] std::vector<double> evaluate(const WaveParams& theta,
                                             std::array<std::vector<double>, 4>& grad) const;
  [[nodiscard]] AcfSequence autocovariance(const WaveParams& theta) const;
  [[nodiscard]] const AliasingGrid& grid() const { return grid_; }

 private:
  AliasingGrid grid_;
};

}  // namespace wavespec
