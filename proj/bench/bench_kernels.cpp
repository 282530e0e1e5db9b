// Serial reference vs OpenMP kernel for the three hot loops. Thread count
// follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include "wavespec/simulation.hpp"
#include "wavespec/uncertainty.hpp"

using namespace wavespec;

namespace {

const WaveParams kTheta{};

SamplingScheme scheme(const benchmark::State& st) {
  return {0.78125, static_cast<std::size_t>(st.range(0))};
}

void BM_AliasedGridSerial(benchmark::State& st) {
  const SamplingScheme s = scheme(st);
  const ResolvedQuadrature q = resolve_quadrature({}, kTheta, s);
  for (auto _ : st) benchmark::DoNotOptimize(aliased_grid_density_serial(kTheta, s, q, false));
}

void BM_AliasedGridParallel(benchmark::State& st) {
  const SamplingScheme s = scheme(st);
  const ResolvedQuadrature q = resolve_quadrature({}, kTheta, s);
  const AliasingGrid grid(s, q, false);
  const Jonswap model(kTheta);
  for (auto _ : st) benchmark::DoNotOptimize(grid.density(model));
}

void BM_CovarianceSerial(benchmark::State& st) {
  const SamplingScheme s = scheme(st);
  const std::vector<fft::cdouble> q = q_transform(kTheta, s, resolve_quadrature({}, kTheta, s), false);
  for (auto _ : st) benchmark::DoNotOptimize(periodogram_covariance_serial(q, s));
}

void BM_CovarianceParallel(benchmark::State& st) {
  const SamplingScheme s = scheme(st);
  const std::vector<fft::cdouble> q = q_transform(kTheta, s, resolve_quadrature({}, kTheta, s), false);
  for (auto _ : st) benchmark::DoNotOptimize(periodogram_covariance(q, s));
}

CirculantEmbedding embedding(const SamplingScheme& s) {
  return CirculantEmbedding(approx_autocovariance(kTheta, s, resolve_quadrature({}, kTheta, s)));
}

void BM_DrawSerial(benchmark::State& st) {
  const CirculantEmbedding e = embedding(scheme(st));
  for (auto _ : st) benchmark::DoNotOptimize(e.draw_many_serial(1, 64));
}

void BM_DrawParallel(benchmark::State& st) {
  const CirculantEmbedding e = embedding(scheme(st));
  for (auto _ : st) benchmark::DoNotOptimize(e.draw_many(1, 64));
}

}  // namespace

BENCHMARK(BM_AliasedGridSerial)->Arg(2304)->Arg(13824)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_AliasedGridParallel)->Arg(2304)->Arg(13824)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_CovarianceSerial)->Arg(512)->Arg(2304)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CovarianceParallel)->Arg(512)->Arg(2304)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DrawSerial)->Arg(2304)->Arg(13824)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DrawParallel)->Arg(2304)->Arg(13824)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
