#pragma once

#include <cstddef>
#include <numbers>
#include <vector>

namespace wavespec {

/// Sampling interval delta (seconds) and record length n.
struct SamplingScheme {
  double delta = 1.0;
  std::size_t n = 0;

  [[nodiscard]] double nyquist() const { return std::numbers::pi / delta; }
  /// Spacing 2 pi / (n delta) of the Fourier grid.
  [[nodiscard]] double frequency_step() const {
    return 2.0 * std::numbers::pi / (static_cast<double>(n) * delta);
  }
};

/// Throws DomainError unless delta is positive and finite and n >= min_n.
void validate(const SamplingScheme& scheme, std::size_t min_n = 1);

/// Elevation record (metres) sampled every delta seconds.
struct TimeSeries {
  std::vector<double> values;
  double delta = 1.0;

  [[nodiscard]] SamplingScheme scheme() const { return {delta, values.size()}; }
  [[nodiscard]] std::size_t size() const { return values.size(); }
};

/// Copy of x with its sample mean subtracted.
TimeSeries demean(const TimeSeries& x);

/// Fourier grid indexing. Signed indices j run over
/// -ceil(n/2)+1, ..., floor(n/2); "natural" arrays store them in that
/// ascending order, position = j - first_index(n).
namespace grid {

inline long first_index(std::size_t n) { return 1 - static_cast<long>((n + 1) / 2); }
inline long last_index(std::size_t n) { return static_cast<long>(n / 2); }
inline std::size_t position(long j, std::size_t n) {
  return static_cast<std::size_t>(j - first_index(n));
}
inline long index_at(std::size_t position, std::size_t n) {
  return static_cast<long>(position) + first_index(n);
}
/// Bin of index j in standard FFT output order.
inline std::size_t fft_bin(long j, std::size_t n) {
  const long m = static_cast<long>(n);
  return static_cast<std::size_t>(((j % m) + m) % m);
}
/// True when n is even and j is the Nyquist index n/2.
inline bool is_nyquist(long j, std::size_t n) { return n % 2 == 0 && j == static_cast<long>(n / 2); }

}  // namespace grid

}  // namespace wavespec
