#include "wavespec/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "wavespec/errors.hpp"
#include "wavespec/fft.hpp"

namespace wavespec {

namespace {

std::mt19937_64 stream_for(std::uint64_t seed, std::uint64_t rep) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(rep), static_cast<std::uint32_t>(rep >> 32),
                    0x9e3779b9u};
  return std::mt19937_64(seq);
}

}  // namespace

CirculantEmbedding::CirculantEmbedding(const AcfSequence& acf) : scheme_(acf.scheme) {
  const std::size_t n = acf.values.size();
  if (n == 0) throw DomainError("cannot embed an empty autocovariance");
  scheme_.n = n;
  const std::size_t m = n == 1 ? 1 : 2 * (n - 1);

  std::vector<double> row(m, 0.0);
  for (std::size_t k = 0; k < n; ++k) row[k] = acf.values[k];
  for (std::size_t k = 1; k + 1 < n; ++k) row[m - k] = acf.values[k];
  const std::vector<fft::cdouble> half = fft::rdft(row);

  // Symmetric real row: eigenvalues are real and lambda_k = lambda_{m-k}.
  std::vector<double> eig(m);
  for (std::size_t k = 0; k < m; ++k) eig[k] = half[k <= m / 2 ? k : m - k].real();
  report_.circulant_size = m;
  report_.min_eigenvalue = *std::min_element(eig.begin(), eig.end());
  report_.max_eigenvalue = *std::max_element(eig.begin(), eig.end());
  if (!(report_.max_eigenvalue > 0.0))
    throw NumericalError("embedding failed: circulant has no positive eigenvalue");
  if (report_.min_eigenvalue < -kEigenClipTolerance * report_.max_eigenvalue)
    throw NumericalError("embedding failed: minimum eigenvalue " +
                         std::to_string(report_.min_eigenvalue) + " vs maximum " +
                         std::to_string(report_.max_eigenvalue));
  report_.clipped = report_.min_eigenvalue < 0.0;

  sqrt_eig_.resize(m);
  for (std::size_t k = 0; k < m; ++k)
    sqrt_eig_[k] = std::sqrt(std::max(eig[k], 0.0) / static_cast<double>(m));
}

TimeSeries CirculantEmbedding::draw(std::uint64_t seed, std::uint64_t rep) const {
  const std::size_t m = sqrt_eig_.size();
  std::mt19937_64 rng = stream_for(seed, rep);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<fft::cdouble> weights(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double a = normal(rng);
    const double b = normal(rng);
    weights[k] = sqrt_eig_[k] * fft::cdouble(a, b);
  }
  const std::vector<fft::cdouble> field = fft::dft(weights, fft::Direction::Forward);
  // Real and imaginary parts are independent with the target covariance; one is used.
  TimeSeries out{std::vector<double>(scheme_.n), scheme_.delta};
  for (std::size_t t = 0; t < scheme_.n; ++t) out.values[t] = field[t].real();
  return out;
}

std::vector<TimeSeries> CirculantEmbedding::draw_many(std::uint64_t seed, std::size_t reps) const {
  std::vector<TimeSeries> out(reps);
  const auto nreps = static_cast<std::ptrdiff_t>(reps);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t r = 0; r < nreps; ++r)
    out[static_cast<std::size_t>(r)] = draw(seed, static_cast<std::uint64_t>(r));
  return out;
}

std::vector<TimeSeries> CirculantEmbedding::draw_many_serial(std::uint64_t seed,
                                                             std::size_t reps) const {
  std::vector<TimeSeries> out;
  out.reserve(reps);
  for (std::size_t r = 0; r < reps; ++r) out.push_back(draw(seed, r));
  return out;
}

SimulationBatch simulate_gaussian(const AcfSequence& acf, std::uint64_t seed, std::size_t reps) {
  const CirculantEmbedding emb(acf);
  return {emb.draw_many(seed, reps), emb.report()};
}

SimulationBatch simulate_gaussian(const WaveParams& theta, const SamplingScheme& scheme,
                                  const ResolvedQuadrature& quad, std::uint64_t seed,
                                  std::size_t reps) {
  return simulate_gaussian(approx_autocovariance(theta, scheme, quad), seed, reps);
}

}  // namespace wavespec
