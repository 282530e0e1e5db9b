#pragma once

#include <cstdint>
#include <vector>

#include "wavespec/model.hpp"
#include "wavespec/sampling.hpp"
#include "wavespec/series.hpp"

namespace wavespec {

struct EmbeddingReport {
  std::size_t circulant_size = 0;
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
  /// Small negative eigenvalues (quadrature noise) were set to zero.
  bool clipped = false;
};

/// Relative size of negative circulant eigenvalues tolerated (and clipped).
inline constexpr double kEigenClipTolerance = 1e-8;

/// Davies-Harte circulant embedding of a Toeplitz covariance. The eigenvalues
/// are computed once; draws are independent per (seed, rep) stream, so output
/// does not depend on how reps are scheduled across threads.
class CirculantEmbedding {
 public:
  /// Throws NumericalError("embedding failed") when the most negative
  /// eigenvalue is below -1e-8 times the largest.
  explicit CirculantEmbedding(const AcfSequence& acf);

  [[nodiscard]] const EmbeddingReport& report() const { return report_; }
  [[nodiscard]] TimeSeries draw(std::uint64_t seed, std::uint64_t rep) const;
  /// reps draws in parallel, rep indices 0..reps-1.
  [[nodiscard]] std::vector<TimeSeries> draw_many(std::uint64_t seed, std::size_t reps) const;
  /// Serial reference for draw_many.
  [[nodiscard]] std::vector<TimeSeries> draw_many_serial(std::uint64_t seed, std::size_t reps) const;

 private:
  SamplingScheme scheme_;
  std::vector<double> sqrt_eig_;  // sqrt(lambda_k / m)
  EmbeddingReport report_;
};

struct SimulationBatch {
  std::vector<TimeSeries> series;
  EmbeddingReport report;
};

/// Gaussian records whose covariance is the aliased model autocovariance.
SimulationBatch simulate_gaussian(const WaveParams& theta, const SamplingScheme& scheme,
                                  const ResolvedQuadrature& quad, std::uint64_t seed, std::size_t reps);
SimulationBatch simulate_gaussian(const AcfSequence& acf, std::uint64_t seed, std::size_t reps);

}  // namespace wavespec
