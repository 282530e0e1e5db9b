#pragma once

#include <limits>
#include <vector>

#include "wavespec/series.hpp"

namespace wavespec {

enum class EstimateKind { Periodogram, Bartlett };

/// Non-parametric estimate on a Fourier grid, natural index order.
struct SpectralEstimate {
  std::vector<double> omegas;
  std::vector<double> values;
  EstimateKind kind = EstimateKind::Periodogram;
  /// Grid the estimate lives on (n is the segment length for Bartlett).
  SamplingScheme scheme;
};

/// Fourier indices entering an objective. Sorted, signed, symmetric in +-j
/// for band selections.
struct FrequencySelection {
  std::vector<long> indices;
  SamplingScheme scheme;
  double omega_min = 0.0;
  double omega_max = std::numeric_limits<double>::infinity();
  bool drop_zero_nyquist = true;

  [[nodiscard]] std::vector<std::size_t> positions() const;
  [[nodiscard]] std::vector<double> omegas() const;
  /// Grid indices inside the band that were removed (zero / Nyquist).
  [[nodiscard]] std::vector<long> dropped() const;
};

/// 2 pi j / (n delta) for j = -ceil(n/2)+1 .. floor(n/2).
std::vector<double> fourier_frequencies(const SamplingScheme& scheme);

/// delta / (2 pi n) |sum_t x_t e^{-i t delta omega}|^2 at the Fourier
/// frequencies. The caller removes the mean beforehand.
SpectralEstimate periodogram(const TimeSeries& x);

/// Average of floor(n / L) non-overlapping, unwindowed segment periodograms
/// on the length-L grid; trailing samples are discarded.
SpectralEstimate bartlett(const TimeSeries& x, std::size_t segment_len);

/// round(100 / delta): a spectral resolution of 0.2 pi rad/s.
std::size_t default_segment_len(double delta);

/// Indices with omega_min <= |omega_j| <= omega_max, excluding j = 0 and the
/// Nyquist index when drop_zero_nyquist. Throws ConfigError when empty.
FrequencySelection select_frequencies(const SamplingScheme& scheme, double omega_min = 0.0,
                                      double omega_max = std::numeric_limits<double>::infinity(),
                                      bool drop_zero_nyquist = true);

}  // namespace wavespec
