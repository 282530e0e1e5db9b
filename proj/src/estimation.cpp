#include "wavespec/estimation.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <string>

#include "wavespec/errors.hpp"

namespace wavespec {

namespace {

constexpr double kGammaEps = 1e-8;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kMaxPolishSteps = 25;

std::vector<double> gather(std::span<const double> values, const std::vector<std::size_t>& pos) {
  std::vector<double> out;
  out.reserve(pos.size());
  for (std::size_t p : pos) out.push_back(values[p]);
  return out;
}

void check_selection_grid(const SpectralEstimate& est, const FrequencySelection& sel) {
  if (sel.scheme.n != est.values.size() || sel.scheme.delta != est.scheme.delta)
    throw ConfigError("frequency selection was made on a different Fourier grid");
  if (sel.indices.empty()) throw ConfigError("frequency selection is empty");
}

FrequencySelection reselect(const FrequencySelection& sel, const SamplingScheme& scheme) {
  if (sel.scheme.n == scheme.n && sel.scheme.delta == scheme.delta) return sel;
  return select_frequencies(scheme, sel.omega_min, sel.omega_max, sel.drop_zero_nyquist);
}

/// Continuous or aliased model density at each selected frequency, times the
/// differencing factor when requested.
std::vector<double> model_at(const WaveParams& theta, const std::vector<double>& omegas,
                             const SamplingScheme& scheme, const ResolvedQuadrature* quad,
                             bool differenced) {
  const Jonswap model(theta);
  const double period = 2.0 * std::numbers::pi / scheme.delta;
  const int k = quad ? quad->k_folds : 0;
  std::vector<double> out(omegas.size());
  for (std::size_t i = 0; i < omegas.size(); ++i) {
    double sum = 0.0;
    for (int f = -k; f <= k; ++f) sum += model.density(omegas[i] + f * period);
    out[i] = differenced ? sum * differencing_factor(omegas[i], scheme.delta) : sum;
  }
  return out;
}

double sum_squares(std::span<const double> model, std::span<const double> data) {
  double s = 0.0;
  for (std::size_t i = 0; i < model.size(); ++i) {
    const double d = model[i] - data[i];
    s += d * d;
  }
  return s;
}

// Optimiser coordinates: logs of the distances to the lower parameter-space
// boundaries, so the simplex never leaves the parameter space.
std::vector<double> to_search(const ParamVector& p) {
  return {std::log(p[kAlpha]), std::log(p[kOmegaP]), std::log(p[kGamma] - 1.0 + kGammaEps),
          std::log(p[kTail] - 1.0)};
}

ParamVector from_search(const std::vector<double>& u) {
  return {std::exp(u[0]), std::exp(u[1]), std::max(1.0, 1.0 + std::exp(u[2]) - kGammaEps),
          1.0 + std::exp(u[3])};
}

void search_box(const ParamBounds& b, std::vector<double>& lo, std::vector<double>& hi) {
  lo = {std::log(b.lower[kAlpha]), std::log(b.lower[kOmegaP]),
        std::log(b.lower[kGamma] - 1.0 + kGammaEps), std::log(b.lower[kTail] - 1.0)};
  hi = {std::log(b.upper[kAlpha]), std::log(b.upper[kOmegaP]),
        std::log(b.upper[kGamma] - 1.0 + kGammaEps), std::log(b.upper[kTail] - 1.0)};
}

ParamVector clamp_to(const ParamVector& p, const ParamBounds& b) {
  ParamVector out;
  for (std::size_t i = 0; i < 4; ++i) out[i] = std::clamp(p[i], b.lower[i], b.upper[i]);
  return out;
}

double lowest_positive(const FrequencySelection& sel) {
  const double step = sel.scheme.frequency_step();
  double best = kInf;
  for (long j : sel.indices)
    if (j > 0) best = std::min(best, static_cast<double>(j) * step);
  if (!std::isfinite(best)) throw ConfigError("frequency selection has no positive frequency");
  return best;
}

struct SearchOutcome {
  ParamVector theta;
  double value;  // minimised value
  SimplexResult simplex;
};

SearchOutcome simplex_search(const std::function<double(const WaveParams&)>& to_minimize,
                             const WaveParams& init, const ParamBounds& bounds,
                             const SimplexOptions& opt) {
  std::vector<double> lo, hi;
  search_box(bounds, lo, hi);
  const auto wrapped = [&](const std::vector<double>& u) {
    return to_minimize(init.with_free(from_search(u)));
  };
  SimplexResult res = minimize_simplex(wrapped, to_search(init.free()), lo, hi, opt);
  return {from_search(res.x), res.value, std::move(res)};
}

/// Projected Fisher scoring on the de-biased Whittle likelihood. Coordinates at
/// a bound whose score points outward are frozen for the step; a backtracking
/// line search only accepts improvements.
ParamVector polish_debiased(const ExpectedPeriodogramModel& model, const std::vector<double>& data,
                            const std::vector<std::size_t>& pos, const WaveParams& start,
                            double start_value, const ParamBounds& bounds, std::size_t& steps,
                            double& value) {
  WaveParams theta = start;
  value = start_value;
  steps = 0;
  const auto loglik = [&](const WaveParams& t) {
    try {
      return whittle_likelihood(gather(model.evaluate(t), pos), data);
    } catch (const DomainError&) {
      return -kInf;
    }
  };

  for (std::size_t it = 0; it < kMaxPolishSteps; ++it) {
    std::array<std::vector<double>, 4> grad_full;
    const std::vector<double> fbar = gather(model.evaluate(theta, grad_full), pos);
    Eigen::Vector4d score = Eigen::Vector4d::Zero();
    Eigen::Matrix4d fisher = Eigen::Matrix4d::Zero();
    for (std::size_t i = 0; i < pos.size(); ++i) {
      Eigen::Vector4d d;
      for (std::size_t p = 0; p < 4; ++p) d[static_cast<Eigen::Index>(p)] = grad_full[p][pos[i]];
      const double f = fbar[i];
      score += -(1.0 / f - data[i] / (f * f)) * d;
      fisher += d * d.transpose() / (f * f);
    }

    const ParamVector p = theta.free();
    std::vector<Eigen::Index> free_idx;
    for (std::size_t i = 0; i < 4; ++i) {
      const auto e = static_cast<Eigen::Index>(i);
      const bool at_lo = p[i] <= bounds.lower[i] && score[e] < 0.0;
      const bool at_hi = p[i] >= bounds.upper[i] && score[e] > 0.0;
      if (!at_lo && !at_hi) free_idx.push_back(e);
    }
    if (free_idx.empty()) break;
    const auto nf = static_cast<Eigen::Index>(free_idx.size());
    Eigen::MatrixXd fsub(nf, nf);
    Eigen::VectorXd ssub(nf);
    for (Eigen::Index a = 0; a < nf; ++a) {
      ssub[a] = score[free_idx[static_cast<std::size_t>(a)]];
      for (Eigen::Index b = 0; b < nf; ++b)
        fsub(a, b) = fisher(free_idx[static_cast<std::size_t>(a)], free_idx[static_cast<std::size_t>(b)]);
    }
    const Eigen::VectorXd dir = fsub.ldlt().solve(ssub);
    if (!dir.allFinite()) break;

    bool accepted = false;
    double t = 1.0;
    for (int ls = 0; ls < 12 && !accepted; ++ls, t *= 0.5) {
      ParamVector trial = p;
      for (Eigen::Index a = 0; a < nf; ++a)
        trial[static_cast<std::size_t>(free_idx[static_cast<std::size_t>(a)])] += t * dir[a];
      trial = clamp_to(trial, bounds);
      const WaveParams cand = theta.with_free(trial);
      const double v = loglik(cand);
      if (v > value) {
        const double gain = v - value;
        theta = cand;
        value = v;
        accepted = true;
        ++steps;
        if (gain < 1e-10 * (1.0 + std::abs(value))) return theta.free();
      }
    }
    if (!accepted) break;
  }
  return theta.free();
}

}  // namespace

std::string_view method_name(Method m) {
  switch (m) {
    case Method::LS: return "ls";
    case Method::BLS: return "bls";
    case Method::Whittle: return "whittle";
    case Method::AliasedWhittle: return "aliased-whittle";
    case Method::DebiasedWhittle: return "dw";
    case Method::GaussianML: return "ml";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  for (Method m : {Method::LS, Method::BLS, Method::Whittle, Method::AliasedWhittle,
                   Method::DebiasedWhittle, Method::GaussianML})
    if (method_name(m) == name) return m;
  throw ConfigError("unknown method '" + std::string(name) +
                    "' (expected ls, bls, whittle, aliased-whittle, dw, ml)");
}

ParamBounds default_bounds(const FrequencySelection& selection) {
  ParamBounds b;
  b.lower[kOmegaP] = lowest_positive(selection);
  b.upper[kOmegaP] = selection.scheme.nyquist();
  return b;
}

Initialization initialize(const SpectralEstimate& pgram, const FrequencySelection& selection,
                          bool differenced, const WaveParams& shape) {
  check_selection_grid(pgram, selection);
  const double delta = pgram.scheme.delta;

  std::vector<double> w, level, raw;
  for (std::size_t p : selection.positions()) {
    const double om = pgram.omegas[p];
    if (om <= 0.0) continue;
    w.push_back(om);
    raw.push_back(pgram.values[p]);
    const double factor = differenced ? differencing_factor(om, delta) : 1.0;
    level.push_back(factor > 0.0 ? pgram.values[p] / factor : 0.0);
  }
  if (w.empty()) throw ConfigError("frequency selection has no positive frequency");

  // Ascending frequencies with strict '>' keep the smallest frequency on ties.
  std::size_t peak = 0;
  if (differenced) {
    // Dividing by the differencing factor amplifies noise where it vanishes,
    // so search no lower than half the raw maximum's frequency.
    std::size_t raw_peak = 0;
    for (std::size_t i = 1; i < w.size(); ++i)
      if (raw[i] > raw[raw_peak]) raw_peak = i;
    while (peak < raw_peak && w[peak] < 0.5 * w[raw_peak]) ++peak;
  }
  for (std::size_t i = peak + 1; i < w.size(); ++i)
    if (level[i] > level[peak]) peak = i;

  Initialization init;
  init.theta = shape;
  init.theta.omega_p = w[peak];
  init.theta.gamma = kInitialGamma;

  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t count = 0;
  for (std::size_t i = peak + 1; i < w.size(); ++i) {
    if (!(level[i] > 0.0)) continue;
    const double lx = std::log(w[i]);
    const double ly = std::log(level[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++count;
  }
  const double denom = static_cast<double>(count) * sxx - sx * sx;
  if (count >= 2 && denom > 0.0) {
    const double slope = (static_cast<double>(count) * sxy - sx * sy) / denom;
    init.theta.r = std::clamp(-slope, 1.1, 20.0);
  } else {
    init.theta.r = kFallbackTail;
    init.tail_fallback = true;
  }

  // Rectangle rule on a uniform grid: the common width cancels.
  init.theta.alpha = 1.0;
  const Jonswap unit(init.theta);
  double model_area = 0.0, data_area = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double factor = differenced ? differencing_factor(w[i], delta) : 1.0;
    model_area += factor * unit.density(w[i]);
    data_area += raw[i];
  }
  init.theta.alpha = model_area > 0.0 && data_area > 0.0 ? data_area / model_area : 1.0;
  return init;
}

Initialization initialize(const TimeSeries& x, const FrequencySelection& selection, bool differenced,
                          const WaveParams& shape) {
  return initialize(periodogram(demean(x)), selection, differenced, shape);
}

double whittle_likelihood(std::span<const double> model, std::span<const double> data) {
  if (model.size() != data.size()) throw ConfigError("whittle: model/data size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < model.size(); ++i) {
    if (!(model[i] > 0.0)) return -kInf;
    s += std::log(model[i]) + data[i] / model[i];
  }
  return -s;
}

double objective_ls(const WaveParams& theta, const SpectralEstimate& estimate,
                    const FrequencySelection& selection, LsModel model_kind,
                    const ResolvedQuadrature* quad, bool differenced) {
  check_selection_grid(estimate, selection);
  if (model_kind == LsModel::Aliased && quad == nullptr)
    throw ConfigError("aliased least squares needs a quadrature configuration");
  const std::vector<double> model =
      model_at(theta, selection.omegas(), estimate.scheme,
               model_kind == LsModel::Aliased ? quad : nullptr, differenced);
  return sum_squares(model, gather(estimate.values, selection.positions()));
}

double objective_whittle(const WaveParams& theta, const SpectralEstimate& pgram,
                         const FrequencySelection& selection, bool aliased, bool differenced,
                         const ResolvedQuadrature* quad) {
  check_selection_grid(pgram, selection);
  if (aliased && quad == nullptr) throw ConfigError("aliased Whittle needs a quadrature configuration");
  const std::vector<double> model =
      model_at(theta, selection.omegas(), pgram.scheme, aliased ? quad : nullptr, differenced);
  return whittle_likelihood(model, gather(pgram.values, selection.positions()));
}

double objective_debiased_whittle(const WaveParams& theta, const SpectralEstimate& pgram,
                                  const FrequencySelection& selection, const ResolvedQuadrature& quad,
                                  bool differenced) {
  check_selection_grid(pgram, selection);
  const ExpectedPeriodogramModel model(pgram.scheme, quad, differenced);
  return whittle_likelihood(gather(model.evaluate(theta), selection.positions()),
                            gather(pgram.values, selection.positions()));
}

double gaussian_loglik(std::span<const double> x, std::span<const double> acf) {
  const std::size_t n = x.size();
  if (n == 0) throw DomainError("Gaussian likelihood of an empty series");
  if (acf.size() < n) throw ConfigError("autocovariance shorter than the series");

  const auto attempt = [&](double jitter, double& out) {
    const double c0 = acf[0] + jitter;
    if (!(c0 > 0.0)) return false;
    std::vector<double> phi(n, 0.0), prev(n, 0.0);
    double v = c0;
    double sum = std::log(v) + x[0] * x[0] / v;
    for (std::size_t k = 1; k < n; ++k) {
      // Reflection coefficient for order k.
      double num = acf[k];
      for (std::size_t j = 1; j < k; ++j) num -= prev[j] * acf[k - j];
      const double refl = num / v;
      phi[k] = refl;
      for (std::size_t j = 1; j < k; ++j) phi[j] = prev[j] - refl * prev[k - j];
      v *= (1.0 - refl * refl);
      if (!(v > 0.0) || !std::isfinite(v)) return false;
      double pred = 0.0;
      for (std::size_t j = 1; j <= k; ++j) pred += phi[j] * x[k - j];
      const double e = x[k] - pred;
      sum += std::log(v) + e * e / v;
      std::copy(phi.begin(), phi.begin() + static_cast<std::ptrdiff_t>(k + 1), prev.begin());
    }
    out = -0.5 * (static_cast<double>(n) * std::log(2.0 * std::numbers::pi) + sum);
    return std::isfinite(out);
  };

  double value = 0.0;
  if (attempt(0.0, value)) return value;
  if (attempt(1e-10 * acf[0], value)) return value;
  throw NumericalError("Toeplitz covariance is not positive definite");
}

double objective_gaussian_ml(const WaveParams& theta, const TimeSeries& x,
                             const ResolvedQuadrature& quad, bool differenced) {
  const AcfSequence acf = approx_autocovariance(theta, x.scheme(), quad, differenced);
  return gaussian_loglik(x.values, acf.values);
}

FitResult fit_debiased_whittle(const SpectralEstimate& pgram, const FrequencySelection& selection,
                               const FitConfig& config) {
  check_selection_grid(pgram, selection);
  const ParamBounds bounds = default_bounds(selection);

  FitResult res;
  res.method = Method::DebiasedWhittle;
  res.differenced = config.differenced;
  res.selection = selection;
  res.scheme = pgram.scheme;

  if (config.init) {
    res.init = *config.init;
  } else {
    const Initialization ini = initialize(pgram, selection, config.differenced, config.shape);
    res.init = ini.theta;
    res.init_tail_fallback = ini.tail_fallback;
  }
  res.init = res.init.with_free(clamp_to(res.init.free(), bounds));
  validate(res.init);
  res.quadrature = resolve_quadrature(config.quadrature, res.init, pgram.scheme);

  const ExpectedPeriodogramModel model(pgram.scheme, res.quadrature, config.differenced);
  const std::vector<std::size_t> pos = selection.positions();
  const std::vector<double> data = gather(pgram.values, pos);
  const auto neg_loglik = [&](const WaveParams& t) {
    return -whittle_likelihood(gather(model.evaluate(t), pos), data);
  };

  res.objective_at_init = -neg_loglik(res.init);
  if (!std::isfinite(res.objective_at_init))
    throw NumericalError("de-biased Whittle objective is not finite at the initial point "
                         "(alpha=" + std::to_string(res.init.alpha) + ", omega_p=" +
                         std::to_string(res.init.omega_p) + ")");

  const SearchOutcome out = simplex_search(neg_loglik, res.init, bounds, config.simplex);
  res.theta_hat = res.init.with_free(out.theta);
  res.objective = -out.value;
  res.converged = out.simplex.converged;
  res.iterations = out.simplex.iterations;
  res.evaluations = out.simplex.evaluations;

  if (config.polish) {
    double value = res.objective;
    const ParamVector polished =
        polish_debiased(model, data, pos, res.theta_hat, res.objective, bounds, res.polish_steps, value);
    res.theta_hat = res.theta_hat.with_free(polished);
    res.objective = value;
  }
  return res;
}

FitResult fit(const TimeSeries& x, const FrequencySelection& selection, const FitConfig& config) {
  validate(x.scheme(), 2);
  TimeSeries work = demean(x);
  if (config.differenced) work = difference_series(work);
  const SamplingScheme scheme = work.scheme();
  const FrequencySelection sel = reselect(selection, scheme);
  const SpectralEstimate pgram = periodogram(work);

  if (config.method == Method::DebiasedWhittle) return fit_debiased_whittle(pgram, sel, config);

  FitResult res;
  res.method = config.method;
  res.differenced = config.differenced;
  res.selection = sel;
  res.scheme = scheme;
  if (config.init) {
    res.init = *config.init;
  } else {
    const Initialization ini = initialize(pgram, sel, config.differenced, config.shape);
    res.init = ini.theta;
    res.init_tail_fallback = ini.tail_fallback;
  }

  // Least squares on Bartlett works on the segment grid.
  SpectralEstimate estimate = pgram;
  FrequencySelection est_sel = sel;
  if (config.method == Method::BLS) {
    const std::size_t len = config.segment_len.value_or(default_segment_len(x.delta));
    res.segment_len = len;
    estimate = bartlett(work, len);
    est_sel = reselect(sel, estimate.scheme);
  }

  const ParamBounds bounds = default_bounds(sel);
  res.init = res.init.with_free(clamp_to(res.init.free(), bounds));
  validate(res.init);
  res.quadrature = resolve_quadrature(config.quadrature, res.init, scheme);
  const ResolvedQuadrature* quad = &res.quadrature;
  const bool diff = config.differenced;

  std::function<double(const WaveParams&)> to_minimize;
  double sign = -1.0;  // natural objective = sign * minimised value
  std::optional<ExpectedPeriodogramModel> ml_model;
  switch (config.method) {
    case Method::LS:
    case Method::BLS:
      sign = 1.0;
      to_minimize = [&, quad, diff](const WaveParams& t) {
        return objective_ls(t, estimate, est_sel, config.ls_model, quad, diff);
      };
      break;
    case Method::Whittle:
    case Method::AliasedWhittle: {
      const bool aliased = config.method == Method::AliasedWhittle;
      to_minimize = [&, quad, diff, aliased](const WaveParams& t) {
        return -objective_whittle(t, pgram, sel, aliased, diff, quad);
      };
      break;
    }
    case Method::GaussianML:
      if (work.size() > config.ml_max_n)
        throw ConfigError("series length " + std::to_string(work.size()) +
                          " exceeds the Gaussian likelihood limit " + std::to_string(config.ml_max_n));
      ml_model.emplace(scheme, res.quadrature, diff);
      to_minimize = [&](const WaveParams& t) {
        try {
          return -gaussian_loglik(work.values, ml_model->autocovariance(t).values);
        } catch (const NumericalError&) {
          return kInf;
        }
      };
      break;
    case Method::DebiasedWhittle:
      break;
  }

  const double at_init = to_minimize(res.init);
  if (!std::isfinite(at_init))
    throw NumericalError(std::string(method_name(config.method)) +
                         " objective is not finite at the initial point; narrow the frequency band");
  res.objective_at_init = sign * at_init;

  const SearchOutcome out = simplex_search(to_minimize, res.init, bounds, config.simplex);
  res.theta_hat = res.init.with_free(out.theta);
  res.objective = sign * out.value;
  res.converged = out.simplex.converged;
  res.iterations = out.simplex.iterations;
  res.evaluations = out.simplex.evaluations;
  return res;
}

}  // namespace wavespec
