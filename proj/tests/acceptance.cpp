// Acceptance suite: one PASS/FAIL line per criterion, indented info lines
// with the measured numbers. Exit status 1 when any criterion fails, unless
// --no-gate is given (the ctest registration), in which case it is 0 once
// every criterion has been evaluated.

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "wavespec/errors.hpp"
#include "wavespec/harness.hpp"
#include "wavespec/nonparam.hpp"
#include "wavespec/sampling.hpp"
#include "wavespec/simulation.hpp"
#include "wavespec/uncertainty.hpp"

using namespace wavespec;

namespace {

constexpr const char* kNames[4] = {"alpha", "omega_p", "gamma", "r"};
const SamplingScheme kCanonical{0.78125, 2304};

int g_failed = 0;

void verdict(int id, const char* title, bool pass) {
  std::printf("%s  %2d  %s\n", pass ? "PASS" : "FAIL", id, title);
  std::fflush(stdout);
  if (!pass) ++g_failed;
}

template <typename... Args>
void info(const char* fmt, Args... args) {
  std::printf("          ");
  std::printf(fmt, args...);
  std::printf("\n");
  std::fflush(stdout);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

WaveParams theta(double alpha, double omega_p, double gamma, double r) {
  WaveParams t;
  t.alpha = alpha;
  t.omega_p = omega_p;
  t.gamma = gamma;
  t.r = r;
  return t;
}

// Linear interpolation between order statistics.
double quantile(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  const double h = p * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

double sample_sd(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

std::vector<double> column(const std::vector<ParamVector>& est, int i) {
  std::vector<double> out;
  out.reserve(est.size());
  for (const ParamVector& p : est) out.push_back(p[i]);
  return out;
}

BenchmarkReport monte_carlo(const WaveParams& t, std::vector<Method> methods, std::uint64_t seed,
                            std::size_t reps) {
  BenchmarkConfig cfg;
  cfg.grid = {t};
  cfg.methods = std::move(methods);
  cfg.scheme = kCanonical;
  cfg.seed = seed;
  cfg.reps = reps;
  return run_benchmark(cfg);
}

void print_stats(const MethodRun& run) {
  const auto& a = run.average;
  info("%-3s bias%% %7.2f %7.2f %7.2f %7.2f | sd%% %6.2f %6.2f %6.2f %6.2f | rmse%% mean %.2f | fits %zu failures %zu",
       std::string(method_name(run.method)).c_str(), a[0].bias_pct, a[1].bias_pct, a[2].bias_pct,
       a[3].bias_pct, a[0].sd_pct, a[1].sd_pct, a[2].sd_pct, a[3].sd_pct, run.mean_rmse(),
       run.estimates[0].size(), run.failures);
}

// ---------------------------------------------------------------------------

struct CanonicalRuns {
  MethodRun dw;
  MethodRun ls;
  MethodRun bls;
};

CanonicalRuns criteria_1_2() {
  const WaveParams t = theta(0.7, 0.7, 3.3, 4.0);
  const auto t0 = std::chrono::steady_clock::now();
  BenchmarkReport dw = monte_carlo(t, {Method::DebiasedWhittle}, 1, 200);
  const double wall = seconds_since(t0);
  BenchmarkReport other = monte_carlo(t, {Method::LS, Method::BLS}, 1, 200);

  CanonicalRuns runs{dw.methods[0], other.methods[0], other.methods[1]};
  const auto& a = runs.dw.average;
  const double bias_lim[4] = {3.0, 3.0, 8.0, 3.0};
  const double sd_lim[4] = {13.0, 1.5, 26.0, 3.5};
  bool pass = runs.dw.failures == 0 && wall < 15.0 * 60.0;
  for (int i = 0; i < 4; ++i) {
    const bool ok = std::abs(a[i].bias_pct) < bias_lim[i] && a[i].sd_pct <= sd_lim[i];
    pass = pass && ok;
  }
  verdict(1, "canonical DW recovery (200 reps, full band)", pass);
  print_stats(runs.dw);
  for (int i = 0; i < 4; ++i)
    info("%-7s |bias| %.2f%% (< %.0f%%)  sd %.2f%% (<= %.1f%%)%s", kNames[i], std::abs(a[i].bias_pct),
         bias_lim[i], a[i].sd_pct, sd_lim[i],
         std::abs(a[i].bias_pct) < bias_lim[i] && a[i].sd_pct <= sd_lim[i] ? "" : "  <-- exceeds");
  info("wall %.1f s on %d thread(s) (target < 900 s on 4 cores)", wall, omp_get_max_threads());

  const double ls_r = runs.ls.average[kTail].sd_pct;
  const double dw_r = runs.dw.average[kTail].sd_pct;
  const bool ordering = runs.dw.mean_rmse() < runs.ls.mean_rmse() && runs.dw.mean_rmse() < runs.bls.mean_rmse();
  verdict(2, "estimator ordering (LS r sd >= 3x DW, DW smallest mean RMSE)", ls_r >= 3.0 * dw_r && ordering);
  print_stats(runs.ls);
  print_stats(runs.bls);
  info("r sd%%: LS %.2f vs 3 x DW %.2f; mean RMSE%% DW %.2f LS %.2f BLS %.2f", ls_r, 3.0 * dw_r,
       runs.dw.mean_rmse(), runs.ls.mean_rmse(), runs.bls.mean_rmse());
  return runs;
}

void criterion_3(const CanonicalRuns& r4) {
  const BenchmarkReport r5 = monte_carlo(theta(0.7, 0.7, 3.3, 5.0), {Method::DebiasedWhittle, Method::LS}, 2, 200);
  const std::vector<double> dw4 = column(r4.dw.estimates[0], kTail);
  const std::vector<double> ls4 = column(r4.ls.estimates[0], kTail);
  const std::vector<double> dw5 = column(r5.methods[0].estimates[0], kTail);
  const std::vector<double> ls5 = column(r5.methods[1].estimates[0], kTail);
  const double dw4_hi = quantile(dw4, 0.99), dw5_lo = quantile(dw5, 0.01);
  const double ls4_hi = quantile(ls4, 0.99), ls5_lo = quantile(ls5, 0.01);
  const bool dw_disjoint = dw4_hi < dw5_lo;
  const bool ls_overlap = ls4_hi >= ls5_lo;
  verdict(3, "tail distinguishability r=4 vs r=5 (DW disjoint, LS overlapping)", dw_disjoint && ls_overlap);
  info("DW: r=4 99th pct %.4f, r=5 1st pct %.4f", dw4_hi, dw5_lo);
  info("LS: r=4 99th pct %.4f, r=5 1st pct %.4f", ls4_hi, ls5_lo);
  info("LS r range: r=4 [%.3f, %.3f], r=5 [%.3f, %.3f]", quantile(ls4, 0.0), quantile(ls4, 1.0),
       quantile(ls5, 0.0), quantile(ls5, 1.0));
}

void criterion_4() {
  const WaveParams t = theta(0.7, 0.7, 3.3, 4.0);
  double worst = 0.0, wall = 0.0;
  std::vector<double> per_n;
  for (std::size_t n : {4u, 8u, 16u}) {
    const SamplingScheme s{0.78125, n};
    QuadratureConfig qc;
    qc.m = 4096;
    const ResolvedQuadrature q = resolve_quadrature(qc, t, s);
    const auto t0 = std::chrono::steady_clock::now();
    const PeriodogramCovariance cov = periodogram_covariance(t, s, q, false);
    wall += seconds_since(t0);
    const std::vector<double> ref = oracle::brute_covariance(t, s, q.k_folds, 4096);
    // pairs that vanish in exact arithmetic come out near 1e-34 from both
    // routes; the floor keeps them out of the relative measure
    double scale = 0.0;
    for (double v : ref) scale = std::max(scale, v);
    double w = 0.0;
    for (std::size_t i = 0; i < n * n; ++i)
      w = std::max(w, std::abs(cov.values[i] - ref[i]) / std::max(ref[i], 1e-20 * scale));
    per_n.push_back(w);
    worst = std::max(worst, w);
  }
  verdict(4, "2D-FFT periodogram covariance vs brute-force integral", worst < 1e-8 && wall < 1.0);
  info("max relative error n=4 %.3e, n=8 %.3e, n=16 %.3e (< 1e-8)", per_n[0], per_n[1], per_n[2]);
  info("covariance time %.4f s for the three sizes (< 1 s)", wall);
}

void criterion_5() {
  const double delta = 0.78125;
  const SamplingScheme pg_scheme{delta, 256};
  std::vector<double> omegas;
  for (int i = 0; i < 50; ++i) omegas.push_back((i + 1) / 51.0 * (std::numbers::pi / delta));
  // 50 Fourier indices spread over the positive half of the n = 256 grid
  std::vector<std::size_t> pos;
  for (int i = 0; i < 50; ++i) pos.push_back(grid::position(1 + (i * 126) / 49, pg_scheme.n));

  double worst[3] = {0.0, 0.0, 0.0};
  auto relative = [](const std::vector<double>& a, const std::vector<double>& n) {
    double peak = 0.0;
    for (double v : n) peak = std::max(peak, std::abs(v));
    double w = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k)
      w = std::max(w, std::abs(a[k] - n[k]) / std::max(std::abs(n[k]), 1e-8 * peak));
    return w;
  };

  std::size_t points = 0;
  for (double alpha : {0.3, 0.7, 1.5})
    for (double wp : {0.5, 0.7, 1.2})
      for (double gamma : {1.5, 3.3, 6.0})
        for (double r : {3.0, 4.0, 5.0}) {
          const WaveParams t = theta(alpha, wp, gamma, r);
          const ResolvedQuadrature q = resolve_quadrature({}, t, pg_scheme);
          const ExpectedPeriodogramModel model(pg_scheme, q, false);
          std::array<std::vector<double>, 4> g;
          (void)model.evaluate(t, g);
          for (int i = 0; i < 4; ++i) {
            std::vector<double> an[3], nu[3];
            for (double w : omegas) {
              an[0].push_back(eval_spectrum_gradient(w, t)[i]);
              nu[0].push_back(oracle::jonswap_central_difference(w, t, i, 1e-6));
              an[1].push_back(aliased_spectrum_gradient(w, t, pg_scheme, q)[i]);
              double fold = 0.0;
              for (int k = -q.k_folds; k <= q.k_folds; ++k)
                fold += oracle::jonswap_central_difference(w + 2.0 * std::numbers::pi * k / delta, t, i, 1e-6);
              nu[1].push_back(fold);
            }
            // fourth-order central difference of the pipeline value
            const double h = 1e-4 * std::abs(t.free()[i]);
            auto at = [&](double step) {
              ParamVector p = t.free();
              p[i] += step;
              return model.evaluate(t.with_free(p));
            };
            const std::vector<double> p1 = at(h), m1 = at(-h), p2 = at(2 * h), m2 = at(-2 * h);
            for (std::size_t k : pos) {
              an[2].push_back(g[i][k]);
              nu[2].push_back((8.0 * (p1[k] - m1[k]) - (p2[k] - m2[k])) / (12.0 * h));
            }
            for (int c = 0; c < 3; ++c) worst[c] = std::max(worst[c], relative(an[c], nu[c]));
          }
          ++points;
        }
  const double all = std::max({worst[0], worst[1], worst[2]});
  verdict(5, "analytic gradients vs central differences (81 theta x 50 frequencies)", all < 1e-5);
  info("max relative error: spectrum %.2e, aliased %.2e, expected periodogram %.2e over %zu theta",
       worst[0], worst[1], worst[2], points);
}

void criterion_6() {
  const WaveParams t = theta(0.7, 0.7, 3.3, 4.0);
  const SamplingScheme s{0.78125, 256};
  const auto t0 = std::chrono::steady_clock::now();
  const ResolvedQuadrature q = resolve_quadrature({}, t, s);
  const std::vector<double> fbar = expected_periodogram(approx_autocovariance(t, s, q));
  const std::size_t reps = 10000;
  const SimulationBatch batch = simulate_gaussian(t, s, q, 6, reps);
  std::vector<double> mean(s.n, 0.0);
  for (const TimeSeries& x : batch.series) {
    const SpectralEstimate p = periodogram(x);
    for (std::size_t k = 0; k < s.n; ++k) mean[k] += p.values[k] / static_cast<double>(reps);
  }
  const double wall = seconds_since(t0);
  // I(-w) = I(w), so only j = 1..n/2 are distinct
  double worst = 0.0, worst_omega = 0.0, z2 = 0.0;
  std::size_t used = 0;
  const std::vector<double> om = fourier_frequencies(s);
  for (long j = 1; j <= grid::last_index(s.n); ++j) {
    const std::size_t k = grid::position(j, s.n);
    if (fbar[k] <= 1e-3) continue;
    ++used;
    const double e = std::abs(mean[k] - fbar[k]) / fbar[k];
    z2 += e * e * static_cast<double>(reps);
    if (e > worst) {
      worst = e;
      worst_omega = om[k];
    }
  }
  verdict(6, "mean of 10000 simulated periodograms vs expected periodogram", worst < 0.03 && wall < 120.0);
  info("max relative error %.4f at omega %.3f over %zu distinct ordinates with fbar > 1e-3 (< 0.03); %.1f s (< 120 s)",
       worst, worst_omega, used, wall);
  info("standard error of each mean is about %.4f relative; rms standardised error %.3f (1 if unbiased)",
       1.0 / std::sqrt(static_cast<double>(reps)), std::sqrt(z2 / static_cast<double>(used)));
}

void criterion_7() {
  const WaveParams t = theta(0.7, 0.7, 3.3, 4.0);
  double parseval = 0.0, sum_rule = 0.0;
  for (std::size_t n : {2304u, 255u}) {
    const SamplingScheme s{0.78125, n};
    const ResolvedQuadrature q = resolve_quadrature({}, t, s);
    const TimeSeries x = simulate_gaussian(t, s, q, 7, 1).series[0];
    const SpectralEstimate p = periodogram(x);
    double lhs = 0.0, rhs = 0.0;
    for (double v : p.values) lhs += v;
    lhs *= s.frequency_step();
    for (double v : x.values) rhs += v * v;
    rhs /= static_cast<double>(n);
    parseval = std::max(parseval, std::abs(lhs - rhs) / rhs);
    for (bool diff : {false, true}) {
      const AcfSequence c = approx_autocovariance(t, s, q, diff);
      const std::vector<double> fbar = expected_periodogram(c);
      double total = 0.0;
      for (double v : fbar) total += v;
      total *= s.frequency_step();
      sum_rule = std::max(sum_rule, std::abs(total - c.values[0]) / c.values[0]);
    }
  }
  verdict(7, "Parseval and expected-periodogram sum rule", parseval < 1e-10 && sum_rule < 1e-10);
  info("Parseval relative error %.2e, sum rule relative error %.2e (both < 1e-10)", parseval, sum_rule);
}

double max_offdiagonal_correlation(const WaveParams& t, const SamplingScheme& s, bool diff, double& from) {
  const ResolvedQuadrature q = resolve_quadrature({}, t, s);
  const std::vector<double> corr = correlation_matrix(periodogram_covariance(t, s, q, diff));
  // positive frequencies below Nyquist, lowest 5% removed
  const long last = static_cast<long>(s.n / 2) - 1;
  const long skip = static_cast<long>(std::ceil(0.05 * static_cast<double>(last)));
  from = static_cast<double>(skip + 1) * s.frequency_step();
  double m = 0.0;
  for (long j = 1 + skip; j <= last; ++j)
    for (long k = 1 + skip; k <= last; ++k)
      if (j != k) m = std::max(m, std::abs(corr[grid::position(j, s.n) * s.n + grid::position(k, s.n)]));
  return m;
}

void criterion_8() {
  // r = 5: with the slower r = 4 tail, peak leakage barely shows near Nyquist
  const WaveParams t = theta(0.7, 0.7, 3.3, 5.0);
  const SamplingScheme s{0.25, 1024};
  double from = 0.0;
  const double plain = max_offdiagonal_correlation(t, s, false, from);
  const double diff = max_offdiagonal_correlation(t, s, true, from);
  verdict(8, "differencing decorrelates the periodogram (4 Hz, r = 5)", plain > 0.5 && diff < 0.2);
  info("max off-diagonal correlation above omega %.3f: undifferenced %.3f (> 0.5), differenced %.3f (< 0.2)",
       from, plain, diff);
  const WaveParams t4 = theta(0.7, 0.7, 3.3, 4.0);
  info("same with r = 4 (not gated): undifferenced %.3f, differenced %.3f",
       max_offdiagonal_correlation(t4, s, false, from), max_offdiagonal_correlation(t4, s, true, from));
}

void criterion_9() {
  const WaveParams t = theta(0.7, 0.7, 3.3, 4.0);
  const SamplingScheme s = kCanonical;
  const FrequencySelection sel = select_frequencies(s, 0.35);
  const ResolvedQuadrature q = resolve_quadrature({}, t, s);
  const std::size_t reps = 500;
  const SimulationBatch batch = simulate_gaussian(t, s, q, 9, reps);

  std::vector<ParamVector> est(reps);
  std::vector<int> covered(reps, 0), ok(reps, 0);
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < reps; ++i) {
    try {
      FitConfig cfg;
      const FitResult f = fit(batch.series[i], sel, cfg);
      const UncertaintyReport u = estimator_variance_and_ci(f, 0.95);
      est[i] = f.theta_hat.free();
      covered[i] = u.intervals[kTail].lower <= t.r && t.r <= u.intervals[kTail].upper;
      ok[i] = 1;
    } catch (const NumericalError&) {
    }
  }
  std::vector<ParamVector> good;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < reps; ++i)
    if (ok[i]) {
      good.push_back(est[i]);
      hits += static_cast<std::size_t>(covered[i]);
    }
  const SandwichVariance v = debiased_whittle_variance(t, sel, q, false);
  const double coverage = static_cast<double>(hits) / static_cast<double>(good.size());
  bool pass = good.size() == reps && coverage >= 0.90 && coverage <= 0.98;
  double ratio[4];
  for (int i = 0; i < 4; ++i) {
    ratio[i] = std::sqrt(v.var_theta[i][i]) / sample_sd(column(good, i));
    pass = pass && ratio[i] >= 1.0 / 1.5 && ratio[i] <= 1.5;
  }
  verdict(9, "sandwich calibration (500 reps, band [0.35, Nyquist])", pass);
  for (int i = 0; i < 4; ++i) {
    const ParamStats st = summarise(column(good, i), t.free()[i]);
    info("%-7s sandwich sd %.4g, Monte Carlo sd %.4g, ratio %.3f (within [0.667, 1.5]); bias %.2f%% sd %.2f%%",
         kNames[i], std::sqrt(v.var_theta[i][i]), sample_sd(column(good, i)), ratio[i], st.bias_pct,
         st.sd_pct);
  }
  info("r interval coverage %.3f at nominal 0.95 (within [0.90, 0.98]); %zu of %zu fits succeeded", coverage,
       good.size(), reps);
}

void criterion_10() {
  const BenchmarkReport rep = monte_carlo(theta(0.7, 0.7, 1.0, 5.0), {Method::DebiasedWhittle}, 10, 200);
  const MethodRun& run = rep.methods[0];
  const std::vector<double> g = column(run.estimates[0], kGamma);
  const auto at_edge = static_cast<double>(std::count_if(g.begin(), g.end(), [](double v) { return v - 1.0 <= 1e-3; }));
  const double frac = at_edge / static_cast<double>(g.size());
  const double r_sd = run.average[kTail].sd_pct;
  verdict(10, "gamma = 1 boundary behaviour (200 reps)", frac >= 0.20 && r_sd <= 5.0 && run.failures == 0);
  print_stats(run);
  info("gamma-hat within 1e-3 of 1: %.1f%% (>= 20%%); r sd %.2f%% (<= 5%%)", 100.0 * frac, r_sd);
}

}  // namespace

int main(int argc, char** argv) {
  // Optional criterion numbers restrict the run; criterion 3 reuses the
  // runs of 1 and 2.
  bool gate = true;
  std::vector<bool> want(11, argc <= 1);
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--no-gate") == 0) {
      gate = false;
      if (argc == 2) std::fill(want.begin(), want.end(), true);
      continue;
    }
    const int id = std::atoi(argv[i]);
    if (id < 1 || id > 10) {
      std::fprintf(stderr, "usage: acceptance [--no-gate] [criterion numbers 1..10]\n");
      return 2;
    }
    want[id] = true;
  }
  const auto t0 = std::chrono::steady_clock::now();
  std::printf("wavespec acceptance suite (%d thread(s))\n", omp_get_max_threads());
  int evaluated = 0;
  if (want[1] || want[2] || want[3]) {
    const CanonicalRuns runs = criteria_1_2();
    evaluated += 2;
    if (want[3]) {
      criterion_3(runs);
      ++evaluated;
    }
  }
  void (*const rest[])() = {criterion_4, criterion_5, criterion_6, criterion_7,
                            criterion_8, criterion_9, criterion_10};
  for (int id = 4; id <= 10; ++id)
    if (want[id]) {
      rest[id - 4]();
      ++evaluated;
    }
  std::printf("%d of %d criteria failed; total %.0f s\n", g_failed, evaluated, seconds_since(t0));
  return gate && g_failed > 0 ? 1 : 0;
}
