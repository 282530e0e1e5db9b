#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wavespec/model.hpp"
#include "wavespec/nonparam.hpp"
#include "wavespec/optimize.hpp"
#include "wavespec/sampling.hpp"
#include "wavespec/series.hpp"

namespace wavespec {

enum class Method { LS, BLS, Whittle, AliasedWhittle, DebiasedWhittle, GaussianML };

/// Stable short names used on the command line and in JSON: ls, bls,
/// whittle, aliased-whittle, dw, ml.
std::string_view method_name(Method m);
Method parse_method(std::string_view name);

/// Least squares compares the estimate against the continuous density (the
/// standard practice) or, optionally, the aliased one.
enum class LsModel { Continuous, Aliased };

/// Parameter box used by the optimiser.
struct ParamBounds {
  ParamVector lower{1e-6, 0.0, 1.0, 1.1};
  ParamVector upper{1e3, 0.0, 20.0, 20.0};
};

/// Box for a given frequency selection: omega_p between the lowest selected
/// positive frequency and Nyquist.
ParamBounds default_bounds(const FrequencySelection& selection);

struct FitConfig {
  Method method = Method::DebiasedWhittle;
  bool differenced = false;
  /// Bartlett segment length; defaults to round(100 / delta) for BLS.
  std::optional<std::size_t> segment_len;
  std::size_t ml_max_n = 4096;
  LsModel ls_model = LsModel::Continuous;
  QuadratureConfig quadrature;
  /// Starting point; the periodogram heuristics are used when absent.
  std::optional<WaveParams> init;
  /// Shape constants (sigma1, sigma2, s, smoothing) held fixed during the fit.
  WaveParams shape;
  SimplexOptions simplex;
  /// Projected Fisher-scoring refinement after the simplex (DW only).
  bool polish = true;
};

struct FitResult {
  WaveParams theta_hat;
  Method method = Method::DebiasedWhittle;
  bool differenced = false;
  std::optional<std::size_t> segment_len;
  /// Objective in its natural orientation: likelihoods are maximised, least
  /// squares minimised.
  double objective = 0.0;
  double objective_at_init = 0.0;
  FrequencySelection selection;
  ResolvedQuadrature quadrature;
  bool converged = false;
  std::size_t iterations = 0;
  std::size_t evaluations = 0;
  WaveParams init;
  bool init_tail_fallback = false;
  std::size_t polish_steps = 0;
  /// Scheme of the series the objective was evaluated on (n - 1 when differenced).
  SamplingScheme scheme;
};

struct Initialization {
  WaveParams theta;
  /// Fewer than two tail points: r fell back to 4.5.
  bool tail_fallback = false;
};

inline constexpr double kFallbackTail = 4.5;
inline constexpr double kInitialGamma = 3.0;

/// Periodogram heuristics: omega_p at the periodogram maximum, r from a log-log
/// tail regression, gamma = 3, alpha matching the area under the periodogram.
/// With differenced data the periodogram is divided by the differencing factor
/// before the peak and tail are read off, and the peak is not sought below half
/// the frequency of the differenced periodogram's maximum.
Initialization initialize(const SpectralEstimate& pgram, const FrequencySelection& selection,
                          bool differenced = false, const WaveParams& shape = {});
Initialization initialize(const TimeSeries& x, const FrequencySelection& selection,
                          bool differenced = false, const WaveParams& shape = {});

/// -sum [log m + d / m]; -inf when any model value is not positive.
double whittle_likelihood(std::span<const double> model, std::span<const double> data);

double objective_ls(const WaveParams& theta, const SpectralEstimate& estimate,
                    const FrequencySelection& selection, LsModel model = LsModel::Continuous,
                    const ResolvedQuadrature* quad = nullptr, bool differenced = false);

double objective_whittle(const WaveParams& theta, const SpectralEstimate& pgram,
                         const FrequencySelection& selection, bool aliased, bool differenced = false,
                         const ResolvedQuadrature* quad = nullptr);

double objective_debiased_whittle(const WaveParams& theta, const SpectralEstimate& pgram,
                                  const FrequencySelection& selection, const ResolvedQuadrature& quad,
                                  bool differenced = false);

/// Exact Gaussian log-likelihood of a zero-mean series with Toeplitz
/// covariance built from acf, via the Durbin-Levinson recursion (the
/// triangular LDL' factorisation of the inverse covariance, O(n^2)).
/// A non-positive-definite covariance is retried once with 1e-10 c(0) added to
/// the diagonal, then reported as NumericalError.
double gaussian_loglik(std::span<const double> x, std::span<const double> acf);

double objective_gaussian_ml(const WaveParams& theta, const TimeSeries& x,
                             const ResolvedQuadrature& quad, bool differenced = false);

/// Fits the model to x. The selection's band (omega_min, omega_max, zero /
/// Nyquist policy) is re-applied on the grid the method actually uses, which
/// differs from x's grid for differenced data and Bartlett segments.
FitResult fit(const TimeSeries& x, const FrequencySelection& selection, const FitConfig& config);

/// De-biased Whittle fit to a given periodogram on the scheme's grid. Used by
/// fit() and directly when the "data" is already in the frequency domain.
FitResult fit_debiased_whittle(const SpectralEstimate& pgram, const FrequencySelection& selection,
                               const FitConfig& config);

}  // namespace wavespec
