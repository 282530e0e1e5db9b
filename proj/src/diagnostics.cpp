#include "wavespec/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wavespec/errors.hpp"

namespace wavespec {

double ks_exponential(std::vector<double> sample) {
  if (sample.empty()) throw DomainError("KS statistic of an empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double cdf = sample[i] > 0.0 ? -std::expm1(-sample[i]) : 0.0;
    d = std::max({d, static_cast<double>(i + 1) / n - cdf, cdf - static_cast<double>(i) / n});
  }
  return std::clamp(d, 0.0, 1.0);
}

QqTable qq_table(std::vector<double> ratios) {
  if (ratios.empty()) throw DomainError("no ratios to tabulate");
  std::sort(ratios.begin(), ratios.end());
  QqTable out;
  out.rows.resize(ratios.size());
  const double n = static_cast<double>(ratios.size());
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    const double p = (static_cast<double>(i) + 0.5) / n;
    out.rows[i] = {ratios[i], -std::log1p(-p)};
  }
  out.ks_statistic = ks_exponential(std::move(ratios));
  return out;
}

QqTable qq_ratios(const SpectralEstimate& pgram, const WaveParams& theta,
                  const FrequencySelection& selection, const ResolvedQuadrature& quad,
                  bool differenced) {
  if (selection.scheme.n != pgram.values.size() || selection.scheme.delta != pgram.scheme.delta)
    throw ConfigError("frequency selection was made on a different Fourier grid");
  const ExpectedPeriodogramModel model(pgram.scheme, quad, differenced);
  const std::vector<double> fbar = model.evaluate(theta);
  std::vector<double> ratios;
  for (long j : selection.indices) {
    if (j <= 0) continue;
    const std::size_t p = grid::position(j, pgram.scheme.n);
    if (!(fbar[p] > 0.0))
      throw NumericalError("expected periodogram is zero at omega = " +
                           std::to_string(pgram.omegas[p]) + "; exclude it from the selection");
    ratios.push_back(pgram.values[p] / fbar[p]);
  }
  if (ratios.empty()) throw ConfigError("selection has no positive frequencies");
  return qq_table(std::move(ratios));
}

}  // namespace wavespec
