#include "commands.hpp"

#include <omp.h>

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include "io.hpp"
#include "wavespec/diagnostics.hpp"
#include "wavespec/errors.hpp"
#include "wavespec/harness.hpp"

namespace wavespec::cli {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct ThetaOpts {
  double alpha = 0.7;
  double omega_p = 0.7;
  double gamma = 3.3;
  double r = 4.0;

  void add(CLI::App* app) {
    app->add_option("--alpha", alpha, "Scale alpha")->capture_default_str();
    app->add_option("--omega-p", omega_p, "Peak frequency (rad/s)")->capture_default_str();
    app->add_option("--gamma", gamma, "Peak enhancement")->capture_default_str();
    app->add_option("--r", r, "Tail decay index")->capture_default_str();
  }
  [[nodiscard]] WaveParams params() const {
    WaveParams t;
    t.alpha = alpha;
    t.omega_p = omega_p;
    t.gamma = gamma;
    t.r = r;
    validate(t);
    return t;
  }
};

struct LengthOpts {
  std::optional<std::size_t> n;
  std::optional<double> duration;

  void add(CLI::App* app) {
    auto* on = app->add_option("--n", n, "Record length in samples");
    auto* od = app->add_option("--duration", duration, "Record length in seconds");
    on->excludes(od);
  }
  [[nodiscard]] std::size_t resolve(double delta) const {
    if (n.has_value() == duration.has_value())
      throw ConfigError("give exactly one of --n and --duration");
    if (n) return *n;
    if (!(*duration > 0.0)) throw ConfigError("--duration must be positive");
    return static_cast<std::size_t>(std::llround(*duration / delta));
  }
};

struct QuadOpts {
  std::optional<std::size_t> m;
  std::optional<int> k;
  double threshold = 1e-6;

  void add(CLI::App* app) {
    app->add_option("--quad-m", m, "Riemann grid size M (default max(8192, 2n))");
    app->add_option("--quad-k", k, "Aliasing folds K (default from the tail threshold)");
    app->add_option("--quad-threshold", threshold, "Tail threshold for choosing K")->capture_default_str();
  }
  [[nodiscard]] QuadratureConfig config() const { return {m, k, threshold}; }
};

struct BandOpts {
  double omega_min = 0.0;
  std::optional<double> omega_max;

  void add(CLI::App* app) {
    app->add_option("--omega-min", omega_min, "Lowest |omega| used (rad/s)")->capture_default_str();
    app->add_option("--omega-max", omega_max, "Highest |omega| used (default Nyquist)");
  }
  [[nodiscard]] double max() const { return omega_max.value_or(kInf); }
};

std::optional<double> sidecar_delta(const fs::path& csv, std::optional<std::uint64_t>* seed = nullptr) {
  const fs::path side = sidecar_path(csv);
  if (!fs::exists(side)) return std::nullopt;
  const json j = read_json(side);
  if (seed && j.contains("seed") && j["seed"].is_number_unsigned()) *seed = j["seed"].get<std::uint64_t>();
  if (j.contains("delta") && j["delta"].is_number()) return j["delta"].get<double>();
  return std::nullopt;
}

TimeSeries load_series(const fs::path& csv, std::optional<double> delta_flag,
                       std::optional<double> fallback = std::nullopt) {
  std::optional<double> delta = delta_flag;
  if (!delta) delta = sidecar_delta(csv);
  if (!delta) delta = fallback;
  if (!delta) throw ConfigError("sampling interval unknown: pass --delta or provide " +
                                sidecar_path(csv).string());
  TimeSeries x{read_series_csv(csv), *delta};
  validate(x.scheme(), 2);
  return x;
}

std::vector<Method> parse_methods(const std::vector<std::string>& names) {
  std::vector<Method> out;
  for (const std::string& item : names) {
    std::stringstream ss(item);
    std::string tok;
    while (std::getline(ss, tok, ','))
      if (!tok.empty()) out.push_back(parse_method(tok));
  }
  return out;
}

// ---- simulate ------------------------------------------------------------

struct SimulateOpts {
  ThetaOpts theta;
  LengthOpts length;
  QuadOpts quad;
  double delta = 0.78125;
  std::uint64_t seed = 0;
  std::size_t reps = 1;
  std::string out = "series.csv";
};

void cmd_simulate(const SimulateOpts& o) {
  const WaveParams theta = o.theta.params();
  if (o.reps < 1) throw ConfigError("--reps must be at least 1");
  const SamplingScheme scheme{o.delta, o.length.resolve(o.delta)};
  validate(scheme, 2);
  const ResolvedQuadrature quad = resolve_quadrature(o.quad.config(), theta, scheme);
  const SimulationBatch batch = simulate_gaussian(theta, scheme, quad, o.seed, o.reps);

  const fs::path out(o.out);
  json files = json::array();
  for (std::size_t r = 0; r < o.reps; ++r) {
    fs::path p = out;
    if (o.reps > 1) {
      p = out.parent_path() /
          (out.stem().string() + "_" + std::to_string(r) + out.extension().string());
    }
    write_series_csv(p, batch.series[r].values);
    files.push_back(p.string());
    if (o.reps > 1) {
      write_json(sidecar_path(p), {{"theta", params_json(theta)}, {"delta", o.delta},
                                   {"n", scheme.n}, {"seed", o.seed}, {"rep", r}});
    }
  }
  json side{{"theta", params_json(theta)},
            {"shape", shape_json(theta)},
            {"delta", o.delta},
            {"n", scheme.n},
            {"seed", o.seed},
            {"reps", o.reps},
            {"quadrature", quadrature_json(quad)},
            {"embedding", embedding_json(batch.report)},
            {"files", files}};
  write_json(sidecar_path(out), side);
}

// ---- fit -----------------------------------------------------------------

struct FitOpts {
  std::string input;
  std::optional<double> delta;
  std::string method = "dw";
  BandOpts band;
  bool difference = false;
  std::optional<std::uint64_t> seed;
  std::size_t ml_max_n = 4096;
  std::optional<std::size_t> segment_len;
  QuadOpts quad;
  std::string out = "-";
};

void cmd_fit(const FitOpts& o) {
  const fs::path in(o.input);
  std::optional<std::uint64_t> seed = o.seed;
  if (!seed) sidecar_delta(in, &seed);
  const TimeSeries x = load_series(in, o.delta);
  const FrequencySelection sel = select_frequencies(x.scheme(), o.band.omega_min, o.band.max());
  FitConfig cfg;
  cfg.method = parse_method(o.method);
  cfg.differenced = o.difference;
  cfg.segment_len = o.segment_len;
  cfg.ml_max_n = o.ml_max_n;
  cfg.quadrature = o.quad.config();
  const FitResult res = fit(x, sel, cfg);
  json j = fit_json(res, seed);
  j["input"] = o.input;
  j["delta"] = x.delta;
  j["n"] = x.size();
  emit_json(o.out, j);
}

// ---- ci ------------------------------------------------------------------

struct CiOpts {
  std::string fit;
  double level = 0.95;
  std::string out = "-";
};

void cmd_ci(const CiOpts& o) {
  const FitResult fit = fit_from_json(read_json(o.fit));
  const UncertaintyReport rep = estimator_variance_and_ci(fit, o.level);
  json j = uncertainty_json(rep);
  j["fit"] = o.fit;
  j["method"] = std::string(method_name(fit.method));
  if (fit.method != Method::DebiasedWhittle)
    j["note"] = "variance computed for the de-biased Whittle estimator at the reported estimate";
  emit_json(o.out, j);
}

// ---- diagnose ------------------------------------------------------------

struct DiagnoseOpts {
  std::string input;
  std::string fit;
  std::optional<double> delta;
  std::string kind = "qq";
  std::string out = "diagnose.csv";
};

void write_line(std::ofstream& out, std::initializer_list<double> values) {
  char buf[64];
  bool first = true;
  for (double v : values) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << (first ? "" : ",") << buf;
    first = false;
  }
  out << '\n';
}

double decibel(double v) { return 10.0 * std::log10(v); }

void cmd_diagnose(const DiagnoseOpts& o) {
  const json doc = read_json(o.fit);
  const FitResult fit = fit_from_json(doc);
  std::optional<double> from_fit;
  if (doc.contains("delta") && doc["delta"].is_number()) from_fit = doc["delta"].get<double>();
  TimeSeries x = demean(load_series(o.input, o.delta, from_fit));
  if (fit.differenced) x = difference_series(x);
  if (x.scheme().n != fit.scheme.n || x.delta != fit.scheme.delta)
    throw ConfigError("series does not match the record the fit was made on");
  const SpectralEstimate pgram = periodogram(x);

  std::ofstream out(o.out);
  if (!out) throw ConfigError("cannot write " + o.out);
  json summary{{"kind", o.kind}, {"out", o.out}, {"fit", o.fit}};

  if (o.kind == "qq") {
    const QqTable t = qq_ratios(pgram, fit.theta_hat, fit.selection, fit.quadrature, fit.differenced);
    out << "empirical,exponential\n";
    for (const QqRow& row : t.rows) write_line(out, {row.empirical, row.exp1});
    summary["rows"] = t.rows.size();
    summary["ks_statistic"] = t.ks_statistic;
  } else if (o.kind == "corr") {
    const PeriodogramCovariance cov =
        periodogram_covariance(fit.theta_hat, fit.scheme, fit.quadrature, fit.differenced);
    const std::vector<double> corr = correlation_matrix(cov);
    std::vector<std::size_t> pos;
    for (long j : fit.selection.indices)
      if (j > 0) pos.push_back(grid::position(j, fit.scheme.n));
    out << "omega";
    char buf[64];
    for (std::size_t p : pos) {
      std::snprintf(buf, sizeof buf, ",%.17g", pgram.omegas[p]);
      out << buf;
    }
    out << '\n';
    for (std::size_t p : pos) {
      std::snprintf(buf, sizeof buf, "%.17g", pgram.omegas[p]);
      out << buf;
      for (std::size_t c : pos) {
        std::snprintf(buf, sizeof buf, ",%.17g", corr[p * fit.scheme.n + c]);
        out << buf;
      }
      out << '\n';
    }
    summary["rows"] = pos.size();
  } else if (o.kind == "overlay") {
    const ExpectedPeriodogramModel model(fit.scheme, fit.quadrature, fit.differenced);
    const std::vector<double> fbar = model.evaluate(fit.theta_hat);
    std::vector<bool> selected(fit.scheme.n, false);
    for (std::size_t p : fit.selection.positions()) selected[p] = true;
    out << "omega,periodogram,expected,periodogram_db,expected_db,selected\n";
    std::size_t rows = 0;
    for (std::size_t p = 0; p < fit.scheme.n; ++p) {
      if (pgram.omegas[p] <= 0.0) continue;
      write_line(out, {pgram.omegas[p], pgram.values[p], fbar[p], decibel(pgram.values[p]),
                       decibel(fbar[p]), selected[p] ? 1.0 : 0.0});
      ++rows;
    }
    summary["rows"] = rows;
  } else {
    throw ConfigError("unknown diagnostic kind '" + o.kind + "' (qq, corr, overlay)");
  }
  if (!out) throw ConfigError("failed writing " + o.out);
  std::cout << summary.dump(2) << '\n';
}

// ---- benchmark -----------------------------------------------------------

struct BenchmarkOpts {
  std::string grid = "canonical";
  ThetaOpts theta;
  LengthOpts length;
  QuadOpts quad;
  BandOpts band;
  std::vector<std::string> methods{"ls,bls,dw"};
  double delta = 0.78125;
  bool difference = false;
  std::uint64_t seed = 0;
  std::size_t reps = 200;
  std::optional<std::size_t> segment_len;
  std::size_t ml_max_n = 4096;
  std::string out = "benchmark.csv";
};

void cmd_benchmark(const BenchmarkOpts& o) {
  BenchmarkConfig cfg;
  if (o.grid == "canonical") cfg.grid = {o.theta.params()};
  else if (o.grid == "table") cfg.grid = table_grid();
  else throw ConfigError("unknown grid '" + o.grid + "' (canonical, table)");
  cfg.methods = parse_methods(o.methods);
  cfg.scheme = {o.delta, o.length.n || o.length.duration ? o.length.resolve(o.delta) : 2304};
  cfg.omega_min = o.band.omega_min;
  cfg.omega_max = o.band.max();
  cfg.differenced = o.difference;
  cfg.quadrature = o.quad.config();
  cfg.segment_len = o.segment_len;
  cfg.ml_max_n = o.ml_max_n;
  cfg.seed = o.seed;
  cfg.reps = o.reps;
  const BenchmarkReport rep = run_benchmark(cfg);

  std::ofstream out(o.out);
  if (!out) throw ConfigError("cannot write " + o.out);
  out << "method,parameter,bias_pct,sd_pct,rmse_pct\n";
  char buf[160];
  json methods = json::array();
  for (const MethodRun& run : rep.methods) {
    const std::string name(method_name(run.method));
    for (std::size_t i = 0; i < 4; ++i) {
      const ParamStats& s = run.average[i];
      std::snprintf(buf, sizeof buf, "%s,%s,%.17g,%.17g,%.17g\n", name.c_str(),
                    std::string(kParamNames[i]).c_str(), s.bias_pct, s.sd_pct, s.rmse_pct);
      out << buf;
    }
    json per_theta = json::array();
    for (std::size_t g = 0; g < rep.grid.size(); ++g) {
      json stats;
      for (std::size_t i = 0; i < 4; ++i) {
        const ParamStats& s = run.per_theta[g][i];
        stats[std::string(kParamNames[i])] = {
            {"bias_pct", s.bias_pct}, {"sd_pct", s.sd_pct}, {"rmse_pct", s.rmse_pct}};
      }
      per_theta.push_back({{"theta", params_json(rep.grid[g])},
                           {"fits", run.estimates[g].size()},
                           {"stats", stats}});
    }
    methods.push_back({{"method", name},
                       {"failures", run.failures},
                       {"mean_rmse_pct", run.mean_rmse()},
                       {"per_theta", per_theta}});
  }
  if (!out) throw ConfigError("failed writing " + o.out);
  json side{{"reps", rep.reps},
            {"wall_seconds", rep.wall_seconds},
            {"seed", o.seed},
            {"delta", cfg.scheme.delta},
            {"n", cfg.scheme.n},
            {"differenced", cfg.differenced},
            {"omega_min", cfg.omega_min},
            {"omega_max", std::isfinite(cfg.omega_max) ? json(cfg.omega_max) : json(nullptr)},
            {"methods", methods}};
  write_json(sidecar_path(o.out), side);
}

void apply_thread_cap() {
  const char* env = std::getenv("WAVESPEC_THREADS");
  if (!env || !*env) return;
  char* end = nullptr;
  const long n = std::strtol(env, &end, 10);
  if (*end != '\0' || n < 1) throw ConfigError("WAVESPEC_THREADS must be a positive integer");
  omp_set_num_threads(static_cast<int>(n));
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Spectral estimation for ocean wave records"};
  app.require_subcommand(1);

  SimulateOpts sim;
  auto* s = app.add_subcommand("simulate", "Simulate Gaussian records with a JONSWAP spectrum");
  sim.theta.add(s);
  sim.length.add(s);
  sim.quad.add(s);
  s->add_option("--delta", sim.delta, "Sampling interval (s)")->capture_default_str();
  s->add_option("--seed", sim.seed, "RNG seed")->capture_default_str();
  s->add_option("--reps", sim.reps, "Number of records")->capture_default_str();
  s->add_option("--out", sim.out, "Output CSV (reps > 1 appends _<rep>)")->capture_default_str();

  FitOpts fo;
  auto* f = app.add_subcommand("fit", "Fit the JONSWAP model to a record");
  f->add_option("input", fo.input, "Elevation CSV")->required();
  f->add_option("--delta", fo.delta, "Sampling interval (s); read from the sidecar JSON if absent");
  f->add_option("--method", fo.method, "ls, bls, whittle, aliased-whittle, dw or ml")->capture_default_str();
  fo.band.add(f);
  f->add_flag("--difference", fo.difference, "Fit the first-differenced record");
  f->add_option("--seed", fo.seed, "Seed recorded in the output");
  f->add_option("--ml-max-n", fo.ml_max_n, "Largest n for exact Gaussian likelihood")->capture_default_str();
  f->add_option("--segment-len", fo.segment_len, "Bartlett segment length (bls)");
  fo.quad.add(f);
  f->add_option("--out", fo.out, "Output JSON (- for stdout)")->capture_default_str();

  CiOpts co;
  auto* c = app.add_subcommand("ci", "Sandwich variance and confidence intervals for a fit");
  c->add_option("fit", co.fit, "Fit JSON")->required();
  c->add_option("--level", co.level, "Confidence level")->capture_default_str();
  c->add_option("--out", co.out, "Output JSON (- for stdout)")->capture_default_str();

  DiagnoseOpts dopt;
  auto* d = app.add_subcommand("diagnose", "Q-Q, correlation and overlay tables for a fit");
  d->add_option("input", dopt.input, "Elevation CSV the fit was made on")->required();
  d->add_option("--fit", dopt.fit, "Fit JSON")->required();
  d->add_option("--delta", dopt.delta, "Sampling interval (s)");
  d->add_option("--kind", dopt.kind, "qq, corr or overlay")->capture_default_str();
  d->add_option("--out", dopt.out, "Output CSV")->capture_default_str();

  BenchmarkOpts bo;
  auto* b = app.add_subcommand("benchmark", "Monte Carlo comparison of estimators");
  b->add_option("--grid", bo.grid, "canonical (the --alpha.. point) or table (24 points)")
      ->capture_default_str();
  bo.theta.add(b);
  bo.length.add(b);
  bo.quad.add(b);
  bo.band.add(b);
  b->add_option("--method", bo.methods, "Methods, comma separated or repeated")->capture_default_str();
  b->add_option("--delta", bo.delta, "Sampling interval (s)")->capture_default_str();
  b->add_flag("--difference", bo.difference, "Fit first-differenced records");
  b->add_option("--seed", bo.seed, "RNG seed")->capture_default_str();
  b->add_option("--reps", bo.reps, "Records per parameter point")->capture_default_str();
  b->add_option("--segment-len", bo.segment_len, "Bartlett segment length");
  b->add_option("--ml-max-n", bo.ml_max_n, "Largest n for exact Gaussian likelihood")->capture_default_str();
  b->add_option("--out", bo.out, "Output CSV; a JSON sidecar is written next to it")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    apply_thread_cap();
    if (*s) cmd_simulate(sim);
    else if (*f) cmd_fit(fo);
    else if (*c) cmd_ci(co);
    else if (*d) cmd_diagnose(dopt);
    else if (*b) cmd_benchmark(bo);
    return kExitOk;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DomainError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  }
}

}  // namespace wavespec::cli
