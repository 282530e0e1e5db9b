#include "wavespec/nonparam.hpp"

#include <cmath>
#include <numbers>
#include <span>
#include <string>

#include "wavespec/errors.hpp"
#include "wavespec/fft.hpp"

namespace wavespec {

namespace {

// |rdft|^2 scaled, laid out in natural index order.
std::vector<double> raw_periodogram(std::span<const double> x, double delta) {
  const std::size_t n = x.size();
  const std::vector<fft::cdouble> spec = fft::rdft(x);
  const double scale = delta / (2.0 * std::numbers::pi * static_cast<double>(n));
  std::vector<double> out(n);
  for (std::size_t p = 0; p < n; ++p) {
    const auto bin = static_cast<std::size_t>(std::abs(grid::index_at(p, n)));
    out[p] = scale * std::norm(spec[bin]);
  }
  return out;
}

}  // namespace

std::vector<std::size_t> FrequencySelection::positions() const {
  std::vector<std::size_t> out;
  out.reserve(indices.size());
  for (long j : indices) out.push_back(grid::position(j, scheme.n));
  return out;
}

std::vector<double> FrequencySelection::omegas() const {
  std::vector<double> out;
  out.reserve(indices.size());
  const double step = scheme.frequency_step();
  for (long j : indices) out.push_back(static_cast<double>(j) * step);
  return out;
}

std::vector<long> FrequencySelection::dropped() const {
  std::vector<long> out;
  if (!drop_zero_nyquist) return out;
  if (omega_min <= 0.0) out.push_back(0);
  if (scheme.n % 2 == 0 && scheme.nyquist() <= omega_max && scheme.nyquist() >= omega_min)
    out.push_back(grid::last_index(scheme.n));
  return out;
}

std::vector<double> fourier_frequencies(const SamplingScheme& scheme) {
  validate(scheme);
  std::vector<double> out(scheme.n);
  const double step = scheme.frequency_step();
  for (std::size_t p = 0; p < scheme.n; ++p)
    out[p] = static_cast<double>(grid::index_at(p, scheme.n)) * step;
  return out;
}

SpectralEstimate periodogram(const TimeSeries& x) {
  if (x.values.empty()) throw DomainError("periodogram of an empty series");
  validate(x.scheme());
  return {fourier_frequencies(x.scheme()), raw_periodogram(x.values, x.delta),
          EstimateKind::Periodogram, x.scheme()};
}

SpectralEstimate bartlett(const TimeSeries& x, std::size_t segment_len) {
  validate(x.scheme());
  if (segment_len == 0 || segment_len > x.values.size())
    throw DomainError("Bartlett segment length " + std::to_string(segment_len) +
                      " must lie in [1, " + std::to_string(x.values.size()) + "]");
  const std::size_t segments = x.values.size() / segment_len;
  const std::span<const double> all(x.values);
  std::vector<double> avg(segment_len, 0.0);
  for (std::size_t p = 0; p < segments; ++p) {
    const std::vector<double> seg = raw_periodogram(all.subspan(p * segment_len, segment_len), x.delta);
    for (std::size_t i = 0; i < segment_len; ++i) avg[i] += seg[i];
  }
  for (double& v : avg) v /= static_cast<double>(segments);
  const SamplingScheme seg_scheme{x.delta, segment_len};
  return {fourier_frequencies(seg_scheme), std::move(avg), EstimateKind::Bartlett, seg_scheme};
}

std::size_t default_segment_len(double delta) {
  if (!(delta > 0.0)) throw DomainError("sampling interval must be positive");
  return static_cast<std::size_t>(std::lround(100.0 / delta));
}

FrequencySelection select_frequencies(const SamplingScheme& scheme, double omega_min,
                                      double omega_max, bool drop_zero_nyquist) {
  validate(scheme);
  if (std::isnan(omega_min) || std::isnan(omega_max) || omega_min < 0.0)
    throw ConfigError("frequency band limits must be non-negative numbers");
  if (omega_min > scheme.nyquist())
    throw ConfigError("omega_min " + std::to_string(omega_min) + " exceeds Nyquist " +
                      std::to_string(scheme.nyquist()));
  FrequencySelection sel;
  sel.scheme = scheme;
  sel.omega_min = omega_min;
  sel.omega_max = omega_max;
  sel.drop_zero_nyquist = drop_zero_nyquist;
  const double step = scheme.frequency_step();
  for (long j = grid::first_index(scheme.n); j <= grid::last_index(scheme.n); ++j) {
    if (drop_zero_nyquist && (j == 0 || grid::is_nyquist(j, scheme.n))) continue;
    const double w = std::abs(static_cast<double>(j) * step);
    if (w >= omega_min && w <= omega_max) sel.indices.push_back(j);
  }
  if (sel.indices.empty()) throw ConfigError("frequency selection is empty");
  return sel;
}

}  // namespace wavespec
