#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "wavespec/estimation.hpp"
#include "wavespec/model.hpp"
#include "wavespec/sampling.hpp"
#include "wavespec/series.hpp"

namespace wavespec {

/// Monte Carlo study: for each true theta, simulate reps records, fit each
/// method and summarise the estimates relative to the truth.
struct BenchmarkConfig {
  std::vector<WaveParams> grid;
  std::vector<Method> methods;
  SamplingScheme scheme{0.78125, 2304};
  double omega_min = 0.0;
  double omega_max = std::numeric_limits<double>::infinity();
  bool differenced = false;
  QuadratureConfig quadrature;
  std::optional<std::size_t> segment_len;
  std::size_t ml_max_n = 4096;
  std::uint64_t seed = 0;
  std::size_t reps = 1;
};

/// Percentages relative to the true value. SD uses the 1/reps normalisation
/// so that rmse^2 = bias^2 + sd^2.
struct ParamStats {
  double bias_pct = 0.0;
  double sd_pct = 0.0;
  double rmse_pct = 0.0;
};

ParamStats summarise(const std::vector<double>& estimates, double truth);

struct MethodRun {
  Method method = Method::DebiasedWhittle;
  /// estimates[g] holds the successful fits for grid point g.
  std::vector<std::vector<ParamVector>> estimates;
  std::vector<std::array<ParamStats, 4>> per_theta;
  /// Mean over the grid of each statistic.
  std::array<ParamStats, 4> average{};
  /// Fits that raised a numerical failure (excluded from the statistics).
  std::size_t failures = 0;

  /// Mean over parameters of the grid-averaged RMSE.
  [[nodiscard]] double mean_rmse() const;
};

struct BenchmarkReport {
  std::vector<WaveParams> grid;
  std::vector<MethodRun> methods;
  std::size_t reps = 0;
  double wall_seconds = 0.0;
};

/// Grid point g draws its records with seed + g; rep r uses stream r. Fits
/// run in parallel over reps.
BenchmarkReport run_benchmark(const BenchmarkConfig& config);

/// All 24 combinations alpha = 0.7; omega_p = 0.7, 0.9, 1.2; gamma = 1, 2,
/// 3.3, 5; r = 4, 5.
std::vector<WaveParams> table_grid();

}  // namespace wavespec
