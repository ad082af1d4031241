#pragma once

// On-disk formats. Matrices are CSV with %.17g entries, so a write/read
// round trip is exact. Everything else is JSON carrying "schema_version".
// Labels are 1-based in files and 0-based in memory.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "mvw/inference.hpp"
#include "mvw/model.hpp"
#include "mvw/preprocess.hpp"

namespace mvw::io {

namespace fs = std::filesystem;
using nlohmann::json;

inline constexpr int kSchemaVersion = 1;

/// Raised for unreadable or malformed files.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Writes through a sibling temp file and renames it into place.
void write_text_atomic(const fs::path& path, const std::string& text);
std::string read_text(const fs::path& path);

std::string format_matrix_csv(const Eigen::MatrixXd& m);
void write_matrix_csv(const fs::path& path, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_matrix_csv(const fs::path& path);

void write_json(const fs::path& path, const json& j);
json read_json(const fs::path& path);

enum class Payload { matrix, timeseries };

struct SubjectEntry {
  std::string id;
  std::string path;  // relative to the manifest directory
};

struct Manifest {
  int n = 0;
  int p = 0;
  int t_ori = 0;
  MatrixKind kind = MatrixKind::correlation;
  Payload payload = Payload::matrix;
  std::vector<std::string> node_names;
  std::vector<SubjectEntry> subjects;
  json provenance = json::object();
};

json to_json(const Manifest& m);
Manifest manifest_from_json(const json& j);
Manifest read_manifest(const fs::path& path);

/// Manifest path for a directory or file argument.
fs::path manifest_path(const fs::path& dataset);

/// Loads a dataset; time-series payloads become empirical correlations.
Dataset load_dataset(const fs::path& dataset, Manifest* manifest_out = nullptr);

/// Raw T x p series of a time-series dataset.
std::vector<Eigen::MatrixXd> load_series(const fs::path& dataset, const Manifest& manifest);

/// Writes manifest.json plus one CSV per subject under dir/subjects.
void write_dataset(const fs::path& dir, const Dataset& data, const json& provenance,
                   const std::string& manifest_name = "manifest.json");

json to_json(const GroundTruth& truth);
GroundTruth truth_from_json(const json& j);

struct ModelFile {
  FitResult fit;
  int p = 0;
  int n = 0;
  std::vector<std::string> node_names;
  std::vector<std::string> subject_ids;
  json extra = json::object();  // selection and run metadata
};

json to_json(const ModelFile& model);
ModelFile model_from_json(const json& j);
ModelFile read_model(const fs::path& path);

/// One row per restart: rank, restart, seed, log posterior, views, T, iterations, converged.
std::string format_summary_csv(std::span<const FitResult> results, int top_k);

void write_whiten_report(const fs::path& dir, const WhitenReport& report, const json& provenance);
/// whiten.json itself, its folder, or the dataset directory holding whiten/.
fs::path locate_whiten_report(const fs::path& where);
WhitenReport read_whiten_report(const fs::path& where);

}  // namespace mvw::io
