#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace wavespec {

/// Free parameter vector ordering used everywhere: (alpha, omega_p, gamma, r).
using ParamVector = std::array<double, 4>;

enum ParamIndex : std::size_t { kAlpha = 0, kOmegaP = 1, kGamma = 2, kTail = 3 };

inline constexpr std::array<std::string_view, 4> kParamNames{"alpha", "omega_p", "gamma", "r"};

/// Default steepness of the arctan-smoothed peak width when smoothing is
/// switched on without an explicit constant.
inline constexpr double kDefaultSmoothing = 1e4;

/// Generalised JONSWAP parameters. alpha, omega_p, gamma and r are free during
/// fitting; sigma1, sigma2 and s are fixed shape constants.
struct WaveParams {
  double alpha = 0.7;
  double omega_p = 0.7;
  double gamma = 3.3;
  double r = 4.0;
  double sigma1 = 0.07;
  double sigma2 = 0.09;
  double s = 4.0;
  /// When set, the left/right peak width step is replaced by a smooth arctan
  /// transition of this steepness.
  std::optional<double> smoothing;

  [[nodiscard]] ParamVector free() const { return {alpha, omega_p, gamma, r}; }
  [[nodiscard]] WaveParams with_free(const ParamVector& p) const {
    WaveParams out = *this;
    out.alpha = p[kAlpha];
    out.omega_p = p[kOmegaP];
    out.gamma = p[kGamma];
    out.r = p[kTail];
    return out;
  }
};

/// Throws DomainError unless alpha > 0, omega_p > 0, gamma >= 1, r > 1 and the
/// shape constants are positive and finite.
void validate(const WaveParams& theta);

/// Two-sided generalised JONSWAP density with the logs of the parameters
/// cached. Construction validates; evaluation is thread-safe.
class Jonswap {
 public:
  explicit Jonswap(const WaveParams& theta);

  [[nodiscard]] const WaveParams& params() const { return theta_; }

  /// f_G(omega | theta); exactly 0 at omega = 0 and even in omega.
  [[nodiscard]] double density(double omega) const;

  /// Partials with respect to (alpha, omega_p, gamma, r); zero at omega = 0,
  /// even in omega.
  [[nodiscard]] ParamVector gradient(double omega) const;

  /// Hot-path variants for a strictly positive frequency whose log is already
  /// known (grids reuse log|omega| across parameter values).
  [[nodiscard]] double density_positive(double omega, double log_omega) const;
  double density_and_gradient_positive(double omega, double log_omega, ParamVector& grad) const;

 private:
  struct PeakTerms {
    double delta;     // peak enhancement exponent
    double sigma;     // peak width in force at omega
    double x;         // omega / omega_p
    double x_pow_ms;  // (omega / omega_p)^(-s)
  };
  [[nodiscard]] PeakTerms peak_terms(double omega, double log_omega) const;
  [[nodiscard]] double log_density(double log_omega, const PeakTerms& pt) const;

  WaveParams theta_;
  double log_alpha_;
  double log_omega_p_;
  double log_gamma_;
};

double eval_spectrum(double omega, const WaveParams& theta);
ParamVector eval_spectrum_gradient(double omega, const WaveParams& theta);

}  // namespace wavespec
