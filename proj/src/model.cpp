#include "wavespec/model.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "wavespec/errors.hpp"

namespace wavespec {

namespace {

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

void validate(const WaveParams& theta) {
  std::ostringstream err;
  if (!finite_positive(theta.alpha)) err << " alpha=" << theta.alpha << " must be > 0;";
  if (!finite_positive(theta.omega_p)) err << " omega_p=" << theta.omega_p << " must be > 0;";
  if (!(std::isfinite(theta.gamma) && theta.gamma >= 1.0))
    err << " gamma=" << theta.gamma << " must be >= 1;";
  if (!(std::isfinite(theta.r) && theta.r > 1.0)) err << " r=" << theta.r << " must be > 1;";
  if (!finite_positive(theta.sigma1) || !finite_positive(theta.sigma2) || !finite_positive(theta.s))
    err << " shape constants sigma1, sigma2, s must be > 0;";
  if (theta.smoothing && !finite_positive(*theta.smoothing))
    err << " smoothing constant must be > 0;";
  const std::string msg = err.str();
  if (!msg.empty()) throw DomainError("invalid JONSWAP parameters:" + msg);
}

Jonswap::Jonswap(const WaveParams& theta) : theta_(theta) {
  validate(theta_);
  log_alpha_ = std::log(theta_.alpha);
  log_omega_p_ = std::log(theta_.omega_p);
  log_gamma_ = std::log(theta_.gamma);
}

Jonswap::PeakTerms Jonswap::peak_terms(double omega, double log_omega) const {
  PeakTerms pt{};
  pt.x = omega / theta_.omega_p;
  pt.x_pow_ms = std::exp(-theta_.s * (log_omega - log_omega_p_));
  if (theta_.smoothing) {
    const double c = *theta_.smoothing;
    pt.sigma = theta_.sigma1 + (theta_.sigma2 - theta_.sigma1) *
                                   (0.5 + std::atan(c * (omega - theta_.omega_p)) / std::numbers::pi);
  } else {
    pt.sigma = omega <= theta_.omega_p ? theta_.sigma1 : theta_.sigma2;
  }
  const double dev = pt.x - 1.0;
  const double q = dev * dev / (2.0 * pt.sigma * pt.sigma);
  pt.delta = std::exp(-q);
  return pt;
}

double Jonswap::log_density(double log_omega, const PeakTerms& pt) const {
  // x_pow_ms overflowing to +inf sends this to -inf and the density to 0.
  return log_alpha_ - theta_.r * log_omega - (theta_.r / theta_.s) * pt.x_pow_ms +
         pt.delta * log_gamma_;
}

double Jonswap::density_positive(double omega, double log_omega) const {
  const PeakTerms pt = peak_terms(omega, log_omega);
  return 0.5 * std::exp(log_density(log_omega, pt));
}

double Jonswap::density_and_gradient_positive(double omega, double log_omega,
                                              ParamVector& grad) const {
  const PeakTerms pt = peak_terms(omega, log_omega);
  const double f = 0.5 * std::exp(log_density(log_omega, pt));
  if (f == 0.0) {
    grad = {0.0, 0.0, 0.0, 0.0};
    return 0.0;
  }
  const double wp = theta_.omega_p;
  const double sig2 = pt.sigma * pt.sigma;

  double d_omega_p = pt.delta * log_gamma_ * omega * (omega - wp) / (sig2 * wp * wp * wp) -
                     (theta_.r / wp) * pt.x_pow_ms;
  if (theta_.smoothing && pt.delta > 0.0) {
    // sigma depends on omega_p through the arctan transition.
    const double c = *theta_.smoothing;
    const double dev = pt.x - 1.0;
    const double u = c * (omega - wp);
    const double dsigma_dwp = -(theta_.sigma2 - theta_.sigma1) * c / (std::numbers::pi * (1.0 + u * u));
    const double ddelta_dsigma = pt.delta * dev * dev / (sig2 * pt.sigma);
    d_omega_p += log_gamma_ * ddelta_dsigma * dsigma_dwp;
  }

  grad[kAlpha] = f / theta_.alpha;
  grad[kOmegaP] = f * d_omega_p;
  grad[kGamma] = f * pt.delta / theta_.gamma;
  grad[kTail] = f * (-log_omega - pt.x_pow_ms / theta_.s);
  return f;
}

double Jonswap::density(double omega) const {
  const double w = std::abs(omega);
  if (w == 0.0) return 0.0;
  return density_positive(w, std::log(w));
}

ParamVector Jonswap::gradient(double omega) const {
  ParamVector g{0.0, 0.0, 0.0, 0.0};
  const double w = std::abs(omega);
  if (w == 0.0) return g;
  density_and_gradient_positive(w, std::log(w), g);
  return g;
}

double eval_spectrum(double omega, const WaveParams& theta) { return Jonswap(theta).density(omega); }

ParamVector eval_spectrum_gradient(double omega, const WaveParams& theta) {
  return Jonswap(theta).gradient(omega);
}

}  // namespace wavespec
