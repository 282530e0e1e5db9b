#include "wavespec/harness.hpp"

#include <chrono>
#include <cmath>

#include "wavespec/errors.hpp"
#include "wavespec/nonparam.hpp"
#include "wavespec/simulation.hpp"

namespace wavespec {

ParamStats summarise(const std::vector<double>& estimates, double truth) {
  if (estimates.empty()) throw DomainError("no estimates to summarise");
  if (truth == 0.0) throw DomainError("percent statistics need a nonzero true value");
  const double n = static_cast<double>(estimates.size());
  double mean = 0.0;
  for (double e : estimates) mean += e;
  mean /= n;
  double var = 0.0;
  double mse = 0.0;
  for (double e : estimates) {
    var += (e - mean) * (e - mean);
    mse += (e - truth) * (e - truth);
  }
  const double scale = 100.0 / std::abs(truth);
  return {scale * (mean - truth), scale * std::sqrt(var / n), scale * std::sqrt(mse / n)};
}

double MethodRun::mean_rmse() const {
  double s = 0.0;
  for (const ParamStats& p : average) s += p.rmse_pct;
  return s / 4.0;
}

std::vector<WaveParams> table_grid() {
  std::vector<WaveParams> out;
  for (double wp : {0.7, 0.9, 1.2})
    for (double g : {1.0, 2.0, 3.3, 5.0})
      for (double r : {4.0, 5.0}) {
        WaveParams t;
        t.alpha = 0.7;
        t.omega_p = wp;
        t.gamma = g;
        t.r = r;
        out.push_back(t);
      }
  return out;
}

BenchmarkReport run_benchmark(const BenchmarkConfig& config) {
  if (config.grid.empty()) throw ConfigError("benchmark grid is empty");
  if (config.methods.empty()) throw ConfigError("no methods to benchmark");
  if (config.reps < 1) throw ConfigError("reps must be at least 1");
  validate(config.scheme, 2);
  const auto start = std::chrono::steady_clock::now();

  BenchmarkReport report;
  report.grid = config.grid;
  report.reps = config.reps;
  report.methods.resize(config.methods.size());
  for (std::size_t m = 0; m < config.methods.size(); ++m) {
    report.methods[m].method = config.methods[m];
    report.methods[m].estimates.resize(config.grid.size());
  }

  const FrequencySelection selection =
      select_frequencies(config.scheme, config.omega_min, config.omega_max);
  for (std::size_t g = 0; g < config.grid.size(); ++g) {
    const WaveParams& truth = config.grid[g];
    const ResolvedQuadrature quad = resolve_quadrature(config.quadrature, truth, config.scheme);
    const SimulationBatch batch =
        simulate_gaussian(truth, config.scheme, quad, config.seed + g, config.reps);

    for (std::size_t m = 0; m < config.methods.size(); ++m) {
      FitConfig fc;
      fc.method = config.methods[m];
      fc.differenced = config.differenced;
      fc.segment_len = config.segment_len;
      fc.ml_max_n = config.ml_max_n;
      fc.quadrature = config.quadrature;
      fc.shape = truth;

      std::vector<std::optional<ParamVector>> fits(config.reps);
      const auto nreps = static_cast<std::ptrdiff_t>(config.reps);
#pragma omp parallel for schedule(dynamic, 1)
      for (std::ptrdiff_t r = 0; r < nreps; ++r) {
        try {
          fits[static_cast<std::size_t>(r)] =
              fit(batch.series[static_cast<std::size_t>(r)], selection, fc).theta_hat.free();
        } catch (const NumericalError&) {
          // Counted below.
        }
      }
      MethodRun& run = report.methods[m];
      for (const auto& f : fits) {
        if (f) run.estimates[g].push_back(*f);
        else ++run.failures;
      }
    }
  }

  for (MethodRun& run : report.methods) {
    run.per_theta.resize(config.grid.size());
    for (std::size_t g = 0; g < config.grid.size(); ++g) {
      if (run.estimates[g].empty())
        throw NumericalError(std::string(method_name(run.method)) + " failed on every rep");
      const ParamVector truth = config.grid[g].free();
      for (int i = 0; i < 4; ++i) {
        std::vector<double> col;
        col.reserve(run.estimates[g].size());
        for (const ParamVector& e : run.estimates[g]) col.push_back(e[i]);
        run.per_theta[g][i] = summarise(col, truth[i]);
      }
    }
    const double ng = static_cast<double>(config.grid.size());
    for (int i = 0; i < 4; ++i) {
      ParamStats avg;
      for (const auto& pt : run.per_theta) {
        avg.bias_pct += pt[i].bias_pct / ng;
        avg.sd_pct += pt[i].sd_pct / ng;
        avg.rmse_pct += pt[i].rmse_pct / ng;
      }
      run.average[i] = avg;
    }
  }
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace wavespec
