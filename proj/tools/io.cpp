#include "io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include "wavespec/errors.hpp"

namespace wavespec::cli {

namespace {

bool parse_double(const std::string& text, double& out) {
  std::istringstream in(text);
  in >> out;
  if (in.fail()) return false;
  in >> std::ws;
  return in.eof();
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double finite_or_inf(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::infinity() : j.get<double>();
}

json inf_as_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

void write_series_csv(const fs::path& path, const std::vector<double>& values) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << "elevation\n";
  char buf[64];
  for (double v : values) {
    std::snprintf(buf, sizeof buf, "%.17g\n", v);
    out << buf;
  }
  if (!out) throw ConfigError("failed writing " + path.string());
}

std::vector<double> read_series_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::vector<double> values;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty()) continue;
    double v;
    if (parse_double(t, v)) {
      if (!std::isfinite(v))
        throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": non-finite value");
      values.push_back(v);
    } else if (values.empty() && lineno == 1) {
      continue;  // header
    } else {
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": not a number: " + t);
    }
  }
  if (values.empty()) throw ConfigError(path.string() + " holds no data");
  return values;
}

fs::path sidecar_path(const fs::path& csv) {
  fs::path p = csv;
  p.replace_extension(".json");
  return p;
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

void emit_json(const std::string& path, const json& j) {
  if (path.empty() || path == "-") {
    std::cout << j.dump(2) << '\n';
  } else {
    write_json(path, j);
  }
}

json params_json(const WaveParams& theta) {
  return {{"alpha", theta.alpha}, {"omega_p", theta.omega_p}, {"gamma", theta.gamma}, {"r", theta.r}};
}

json shape_json(const WaveParams& theta) {
  return {{"sigma1", theta.sigma1},
          {"sigma2", theta.sigma2},
          {"s", theta.s},
          {"smoothing", theta.smoothing ? json(*theta.smoothing) : json(nullptr)}};
}

WaveParams params_from_json(const json& free, const json* shape) {
  WaveParams t;
  try {
    t.alpha = free.at("alpha").get<double>();
    t.omega_p = free.at("omega_p").get<double>();
    t.gamma = free.at("gamma").get<double>();
    t.r = free.at("r").get<double>();
    if (shape && shape->is_object()) {
      t.sigma1 = shape->value("sigma1", t.sigma1);
      t.sigma2 = shape->value("sigma2", t.sigma2);
      t.s = shape->value("s", t.s);
      if (shape->contains("smoothing") && !shape->at("smoothing").is_null())
        t.smoothing = shape->at("smoothing").get<double>();
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed parameter object: ") + e.what());
  }
  return t;
}

json quadrature_json(const ResolvedQuadrature& q) {
  return {{"M", q.m}, {"K", q.k_folds}, {"threshold", q.tail_threshold}};
}

json embedding_json(const EmbeddingReport& r) {
  return {{"circulant_size", r.circulant_size},
          {"min_eigenvalue", r.min_eigenvalue},
          {"max_eigenvalue", r.max_eigenvalue},
          {"clipped", r.clipped}};
}

json fit_json(const FitResult& fit, std::optional<std::uint64_t> seed) {
  json j;
  j["method"] = std::string(method_name(fit.method));
  j["theta_hat"] = params_json(fit.theta_hat);
  j["init"] = params_json(fit.init);
  j["init_tail_fallback"] = fit.init_tail_fallback;
  j["shape"] = shape_json(fit.theta_hat);
  j["objective"] = fit.objective;
  j["objective_at_init"] = fit.objective_at_init;
  j["converged"] = fit.converged;
  j["iterations"] = fit.iterations;
  j["evaluations"] = fit.evaluations;
  j["polish_steps"] = fit.polish_steps;
  j["selection"] = {{"omega_min", fit.selection.omega_min},
                    {"omega_max", inf_as_null(fit.selection.omega_max)},
                    {"drop_zero_nyquist", fit.selection.drop_zero_nyquist},
                    {"count", fit.selection.indices.size()},
                    {"dropped", fit.selection.dropped()}};
  j["differenced"] = fit.differenced;
  j["segment_len"] = fit.segment_len ? json(*fit.segment_len) : json(nullptr);
  j["quadrature"] = quadrature_json(fit.quadrature);
  j["scheme"] = {{"delta", fit.scheme.delta}, {"n", fit.scheme.n}};
  j["seed"] = seed ? json(*seed) : json(nullptr);
  return j;
}

FitResult fit_from_json(const json& doc) {
  FitResult fit;
  try {
    fit.method = parse_method(doc.at("method").get<std::string>());
    const json* shape = doc.contains("shape") ? &doc.at("shape") : nullptr;
    fit.theta_hat = params_from_json(doc.at("theta_hat"), shape);
    if (doc.contains("init")) fit.init = params_from_json(doc.at("init"), shape);
    fit.objective = doc.value("objective", 0.0);
    fit.converged = doc.value("converged", false);
    fit.differenced = doc.at("differenced").get<bool>();
    const json& sc = doc.at("scheme");
    fit.scheme = {sc.at("delta").get<double>(), sc.at("n").get<std::size_t>()};
    const json& q = doc.at("quadrature");
    fit.quadrature = {q.at("M").get<std::size_t>(), q.at("K").get<int>(), q.at("threshold").get<double>()};
    const json& sel = doc.at("selection");
    fit.selection = select_frequencies(fit.scheme, sel.at("omega_min").get<double>(),
                                       finite_or_inf(sel.at("omega_max")),
                                       sel.value("drop_zero_nyquist", true));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed fit document: ") + e.what());
  }
  validate(fit.scheme, 2);
  validate(fit.theta_hat);
  return fit;
}

json matrix_json(const Matrix4& m) {
  json rows = json::array();
  for (const auto& row : m) rows.push_back(row);
  return rows;
}

json uncertainty_json(const UncertaintyReport& rep) {
  json j;
  j["level"] = rep.level;
  j["z"] = rep.z;
  j["parameters"] = kParamNames;
  j["var_theta"] = matrix_json(rep.variance.var_theta);
  j["hessian_expect"] = matrix_json(rep.variance.hessian_expect);
  j["score_var"] = matrix_json(rep.variance.score_var);
  j["pseudo_inverse"] = rep.variance.pseudo_inverse;
  json intervals;
  json clipped = json::array();
  for (std::size_t i = 0; i < 4; ++i) {
    const ConfidenceInterval& ci = rep.intervals[i];
    const std::string name(kParamNames[i]);
    intervals[name] = {{"estimate", ci.estimate},
                       {"sd", std::sqrt(std::max(rep.variance.var_theta[i][i], 0.0))},
                       {"lower", ci.lower},
                       {"upper", ci.upper},
                       {"clipped_lower", ci.clipped_lower}};
    if (ci.clipped_lower) clipped.push_back(name);
  }
  j["intervals"] = intervals;
  j["clipped"] = clipped;
  return j;
}

}  // namespace wavespec::cli
