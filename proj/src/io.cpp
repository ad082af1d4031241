#include "mvw/io.hpp"

#include <cctype>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <system_error>

#include "mvw/labels.hpp"

namespace mvw::io {

namespace {

std::string kind_name(MatrixKind k) { return k == MatrixKind::correlation ? "correlation" : "covariance"; }

MatrixKind parse_kind(const std::string& s) {
  if (s == "correlation") return MatrixKind::correlation;
  if (s == "covariance") return MatrixKind::covariance;
  throw FormatError("unknown matrix kind '" + s + "'");
}

void check_schema(const json& j, const std::string& what) {
  if (!j.is_object() || !j.contains("schema_version")) throw FormatError(what + " has no schema_version");
  const int v = j.at("schema_version").get<int>();
  if (v != kSchemaVersion) {
    throw FormatError(what + " has schema_version " + std::to_string(v) + ", expected " +
                      std::to_string(kSchemaVersion));
  }
}

std::vector<int> to_one_based(const std::vector<int>& labels) {
  std::vector<int> out(labels);
  for (auto& l : out) ++l;
  return out;
}

std::vector<int> from_one_based(const std::vector<int>& labels, const std::string& what) {
  std::vector<int> out(labels);
  for (auto& l : out) {
    if (l < 1) throw FormatError(what + ": labels must be >= 1");
    --l;
  }
  return out;
}

std::string safe_file_stem(const std::string& id) {
  std::string s;
  for (char c : id) s += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.') ? c : '_';
  return s.empty() ? "_" : s;
}

}  // namespace

void write_text_atomic(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << text;
    out.flush();
    if (!out) throw std::runtime_error("failed writing " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw std::runtime_error("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
  }
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string format_matrix_csv(const Eigen::MatrixXd& m) {
  std::string out;
  char buf[32];
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out += ',';
      std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
      out += buf;
    }
    out += '\n';
  }
  return out;
}

void write_matrix_csv(const fs::path& path, const Eigen::MatrixXd& m) { write_text_atomic(path, format_matrix_csv(m)); }

Eigen::MatrixXd read_matrix_csv(const fs::path& path) {
  const std::string text = read_text(path);
  std::vector<std::vector<double>> rows;
  std::istringstream lines(text);
  std::string line;
  int line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<double> row;
    std::size_t pos = 0;
    while (pos <= line.size()) {
      const std::size_t comma = line.find(',', pos);
      const std::string cell = line.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
      char* end = nullptr;
      errno = 0;
      const double v = std::strtod(cell.c_str(), &end);
      const std::string rest(end);
      if (end == cell.c_str() || rest.find_first_not_of(" \t") != std::string::npos || errno == ERANGE) {
        throw FormatError(path.string() + ":" + std::to_string(line_no) + ": bad number '" + cell + "'");
      }
      row.push_back(v);
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": ragged row");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw FormatError(path.string() + ": empty matrix file");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  }
  return m;
}

void write_json(const fs::path& path, const json& j) { write_text_atomic(path, j.dump(2) + "\n"); }

json read_json(const fs::path& path) {
  try {
    return json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw FormatError(path.string() + ": invalid JSON: " + e.what());
  }
}

json to_json(const Manifest& m) {
  json subjects = json::array();
  for (const auto& s : m.subjects) subjects.push_back({{"id", s.id}, {"path", s.path}});
  return {
      {"schema_version", kSchemaVersion},
      {"n", m.n},
      {"p", m.p},
      {"t_ori", m.t_ori},
      {"kind", kind_name(m.kind)},
      {"payload", m.payload == Payload::matrix ? "matrix" : "timeseries"},
      {"node_names", m.node_names},
      {"subjects", subjects},
      {"provenance", m.provenance},
  };
}

Manifest manifest_from_json(const json& j) {
  check_schema(j, "manifest");
  try {
    Manifest m;
    m.n = j.at("n").get<int>();
    m.p = j.at("p").get<int>();
    m.t_ori = j.at("t_ori").get<int>();
    m.kind = parse_kind(j.value("kind", std::string("correlation")));
    const std::string payload = j.value("payload", std::string("matrix"));
    if (payload == "matrix") {
      m.payload = Payload::matrix;
    } else if (payload == "timeseries") {
      m.payload = Payload::timeseries;
    } else {
      throw FormatError("unknown payload '" + payload + "'");
    }
    if (j.contains("node_names")) m.node_names = j.at("node_names").get<std::vector<std::string>>();
    for (const auto& s : j.at("subjects")) m.subjects.push_back({s.at("id").get<std::string>(), s.at("path").get<std::string>()});
    if (j.contains("provenance")) m.provenance = j.at("provenance");
    if (static_cast<int>(m.subjects.size()) != m.n) throw FormatError("manifest n differs from the subject count");
    if (!m.node_names.empty() && static_cast<int>(m.node_names.size()) != m.p) {
      throw FormatError("manifest node_names length differs from p");
    }
    return m;
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed manifest: ") + e.what());
  }
}

Manifest read_manifest(const fs::path& path) { return manifest_from_json(read_json(path)); }

fs::path manifest_path(const fs::path& dataset) {
  return fs::is_directory(dataset) ? dataset / "manifest.json" : dataset;
}

std::vector<Eigen::MatrixXd> load_series(const fs::path& dataset, const Manifest& m) {
  const fs::path base = manifest_path(dataset).parent_path();
  std::vector<Eigen::MatrixXd> out;
  for (const auto& s : m.subjects) {
    Eigen::MatrixXd x = read_matrix_csv(base / s.path);
    if (x.cols() != m.p) throw FormatError("subject " + s.id + ": series has " + std::to_string(x.cols()) + " columns, expected p");
    out.push_back(std::move(x));
  }
  return out;
}

Dataset load_dataset(const fs::path& dataset, Manifest* manifest_out) {
  const fs::path mpath = manifest_path(dataset);
  const Manifest m = read_manifest(mpath);
  Dataset d;
  d.t_ori = m.t_ori;
  d.kind = m.kind;
  d.node_names = m.node_names;
  const fs::path base = mpath.parent_path();
  for (const auto& s : m.subjects) {
    d.subject_ids.push_back(s.id);
    Eigen::MatrixXd x = read_matrix_csv(base / s.path);
    if (m.payload == Payload::timeseries) {
      if (x.cols() != m.p) throw FormatError("subject " + s.id + ": series has the wrong number of columns");
      try {
        x = empirical_correlation(x);
      } catch (const std::exception& e) {
        throw FormatError("subject " + s.id + ": " + e.what());
      }
      d.kind = MatrixKind::correlation;
    } else if (x.rows() != m.p || x.cols() != m.p) {
      throw FormatError("subject " + s.id + ": matrix is not p x p");
    }
    d.matrices.push_back(std::move(x));
  }
  d.validate();
  if (manifest_out != nullptr) *manifest_out = m;
  return d;
}

void write_dataset(const fs::path& dir, const Dataset& data, const json& provenance, const std::string& manifest_name) {
  Manifest m;
  m.n = data.n();
  m.p = data.p();
  m.t_ori = data.t_ori;
  m.kind = data.kind;
  m.node_names = data.node_names;
  m.provenance = provenance;
  const int width = std::max(3, static_cast<int>(std::to_string(data.n()).size()));
  for (int i = 0; i < data.n(); ++i) {
    std::string id = data.subject_id(i);
    if (data.subject_ids.empty()) {
      std::string num = std::to_string(i + 1);
      id = "s" + std::string(static_cast<std::size_t>(width) - std::min<std::size_t>(num.size(), width), '0') + num;
    }
    const std::string rel = "subjects/" + safe_file_stem(id) + ".csv";
    write_matrix_csv(dir / rel, data.matrices[static_cast<std::size_t>(i)]);
    m.subjects.push_back({id, rel});
  }
  write_json(dir / manifest_name, to_json(m));
}

json to_json(const GroundTruth& truth) {
  json clusters = json::array();
  for (const auto& z : truth.cluster_labels) clusters.push_back(to_one_based(z));
  return {{"schema_version", kSchemaVersion}, {"view_labels", to_one_based(truth.view_labels)}, {"cluster_labels", clusters}};
}

GroundTruth truth_from_json(const json& j) {
  check_schema(j, "ground truth");
  GroundTruth t;
  try {
    t.view_labels = from_one_based(j.at("view_labels").get<std::vector<int>>(), "view_labels");
    for (const auto& z : j.at("cluster_labels")) t.cluster_labels.push_back(from_one_based(z.get<std::vector<int>>(), "cluster_labels"));
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed ground truth: ") + e.what());
  }
  return t;
}

json to_json(const ModelFile& model) {
  const ModelState& s = model.fit.state;
  json views = json::array();
  for (int v = 0; v < s.view_count(); ++v) {
    views.push_back({
        {"nodes", to_one_based(s.view_nodes(v))},
        {"node_clusters", to_one_based(s.y[static_cast<std::size_t>(v)])},
        {"object_clusters", to_one_based(s.z[static_cast<std::size_t>(v)])},
    });
  }
  const auto& d = model.fit.diagnostics;
  return {
      {"schema_version", kSchemaVersion},
      {"p", model.p},
      {"n", model.n},
      {"node_names", model.node_names},
      {"subject_ids", model.subject_ids},
      {"view_labels", to_one_based(s.u)},
      {"views", views},
      {"dof", s.dof},
      {"log_posterior", model.fit.log_posterior},
      {"seed", model.fit.seed},
      {"restart", model.fit.restart},
      {"iterations", model.fit.iterations},
      {"converged", model.fit.converged},
      {"diagnostics",
       {{"log_posterior_trace", d.log_posterior_trace},
        {"moves_accepted",
         {{"view", d.moves_accepted[0]},
          {"node_cluster", d.moves_accepted[1]},
          {"object_cluster", d.moves_accepted[2]},
          {"dof", d.moves_accepted[3]}}}}},
      {"run", model.extra},
  };
}

ModelFile model_from_json(const json& j) {
  check_schema(j, "model");
  ModelFile m;
  try {
    m.p = j.at("p").get<int>();
    m.n = j.at("n").get<int>();
    m.node_names = j.value("node_names", std::vector<std::string>{});
    m.subject_ids = j.value("subject_ids", std::vector<std::string>{});
    ModelState& s = m.fit.state;
    s.u = from_one_based(j.at("view_labels").get<std::vector<int>>(), "view_labels");
    for (const auto& v : j.at("views")) {
      s.y.push_back(from_one_based(v.at("node_clusters").get<std::vector<int>>(), "node_clusters"));
      s.z.push_back(from_one_based(v.at("object_clusters").get<std::vector<int>>(), "object_clusters"));
    }
    s.dof = j.at("dof").get<int>();
    m.fit.log_posterior = j.at("log_posterior").get<double>();
    m.fit.seed = j.at("seed").get<std::uint64_t>();
    m.fit.restart = j.value("restart", 0);
    m.fit.iterations = j.value("iterations", 0);
    m.fit.converged = j.value("converged", false);
    if (j.contains("diagnostics")) {
      const auto& d = j.at("diagnostics");
      m.fit.diagnostics.log_posterior_trace = d.value("log_posterior_trace", std::vector<double>{});
      if (d.contains("moves_accepted")) {
        const auto& mv = d.at("moves_accepted");
        m.fit.diagnostics.moves_accepted = {mv.value("view", 0L), mv.value("node_cluster", 0L),
                                            mv.value("object_cluster", 0L), mv.value("dof", 0L)};
      }
    }
    if (j.contains("run")) m.extra = j.at("run");
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed model file: ") + e.what());
  }
  validate_state(m.fit.state, m.n, m.p);
  return m;
}

ModelFile read_model(const fs::path& path) { return model_from_json(read_json(path)); }

std::string format_summary_csv(std::span<const FitResult> results, int top_k) {
  std::string out = "rank,restart,seed,log_posterior,views,dof,iterations,converged\n";
  char buf[256];
  const int k = std::min<int>(top_k, static_cast<int>(results.size()));
  for (int r = 0; r < k; ++r) {
    const auto& f = results[static_cast<std::size_t>(r)];
    std::snprintf(buf, sizeof buf, "%d,%d,%llu,%.17g,%d,%d,%d,%d\n", r + 1, f.restart,
                  static_cast<unsigned long long>(f.seed), f.log_posterior, f.state.view_count(), f.state.dof,
                  f.iterations, f.converged ? 1 : 0);
    out += buf;
  }
  return out;
}

void write_whiten_report(const fs::path& dir, const WhitenReport& report, const json& provenance) {
  write_matrix_csv(dir / "mean_matrix.csv", report.mean_matrix);
  write_matrix_csv(dir / "mean_inv_sqrt.csv", report.mean_inv_sqrt);
  write_matrix_csv(dir / "mean_sqrt.csv", report.mean_sqrt);
  write_json(dir / "whiten.json", {{"schema_version", kSchemaVersion},
                                   {"p", report.mean_matrix.rows()},
                                   {"mean_matrix", "mean_matrix.csv"},
                                   {"mean_inv_sqrt", "mean_inv_sqrt.csv"},
                                   {"mean_sqrt", "mean_sqrt.csv"},
                                   {"provenance", provenance}});
}

fs::path locate_whiten_report(const fs::path& where) {
  if (!fs::is_directory(where)) return where;
  // Accept the preprocessed dataset directory as well as its whiten/ folder.
  if (!fs::exists(where / "whiten.json") && fs::exists(where / "whiten" / "whiten.json")) {
    return where / "whiten" / "whiten.json";
  }
  return where / "whiten.json";
}

WhitenReport read_whiten_report(const fs::path& where) {
  const fs::path json_path = locate_whiten_report(where);
  if (!fs::exists(json_path)) throw FormatError("no whitening report at " + json_path.string());
  const json j = read_json(json_path);
  check_schema(j, "whitening report");
  const fs::path base = json_path.parent_path();
  WhitenReport r;
  try {
    r.mean_matrix = read_matrix_csv(base / j.at("mean_matrix").get<std::string>());
    r.mean_inv_sqrt = read_matrix_csv(base / j.at("mean_inv_sqrt").get<std::string>());
    r.mean_sqrt = read_matrix_csv(base / j.at("mean_sqrt").get<std::string>());
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed whitening report: ") + e.what());
  }
  return r;
}

}  // namespace mvw::io
