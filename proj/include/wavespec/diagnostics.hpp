#pragma once

#include <vector>

#include "wavespec/model.hpp"
#include "wavespec/nonparam.hpp"
#include "wavespec/sampling.hpp"

namespace wavespec {

struct QqRow {
  double empirical = 0.0;  // sorted ratio I / E[I]
  double exp1 = 0.0;       // -log(1 - p_i), p_i = (i - 0.5) / n
};

struct QqTable {
  std::vector<QqRow> rows;
  /// Kolmogorov-Smirnov distance between the ratios and Exp(1).
  double ks_statistic = 0.0;
};

/// Ratios of the periodogram to the expected periodogram at the selected
/// positive frequencies (I(-w) = I(w) adds nothing), with Exp(1) plotting
/// quantiles. Throws NumericalError if the expected periodogram vanishes at
/// a selected frequency.
QqTable qq_ratios(const SpectralEstimate& pgram, const WaveParams& theta,
                  const FrequencySelection& selection, const ResolvedQuadrature& quad,
                  bool differenced = false);

/// Same, from ratios already computed.
QqTable qq_table(std::vector<double> ratios);

/// sup_x |F_n(x) - (1 - e^{-x})| for the empirical cdf of the sample.
double ks_exponential(std::vector<double> sample);

}  // namespace wavespec
