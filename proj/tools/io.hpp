#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "wavespec/estimation.hpp"
#include "wavespec/series.hpp"
#include "wavespec/simulation.hpp"
#include "wavespec/uncertainty.hpp"

namespace wavespec::cli {

using nlohmann::json;
namespace fs = std::filesystem;

/// One elevation per line under an `elevation` header, 17 significant digits.
void write_series_csv(const fs::path& path, const std::vector<double>& values);

/// Reads one value per line. A non-numeric first line is taken as a header;
/// blank lines are skipped. Throws ConfigError on anything else.
std::vector<double> read_series_csv(const fs::path& path);

/// data.csv -> data.json
fs::path sidecar_path(const fs::path& csv);

json read_json(const fs::path& path);
void write_json(const fs::path& path, const json& j);
/// Writes to stdout when path is empty or "-".
void emit_json(const std::string& path, const json& j);

json params_json(const WaveParams& theta);
json shape_json(const WaveParams& theta);
/// Free parameters from {alpha, omega_p, gamma, r}; shape constants from an
/// optional shape object.
WaveParams params_from_json(const json& free, const json* shape = nullptr);

json quadrature_json(const ResolvedQuadrature& q);
json embedding_json(const EmbeddingReport& r);

/// The FitResult document (see README for the schema).
json fit_json(const FitResult& fit, std::optional<std::uint64_t> seed);
/// Rebuilds what the variance and diagnostics need from a fit document.
FitResult fit_from_json(const json& doc);

json matrix_json(const Matrix4& m);
json uncertainty_json(const UncertaintyReport& rep);

}  // namespace wavespec::cli
