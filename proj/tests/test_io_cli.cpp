#include <doctest.h>

#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "mvw/cli.hpp"
#include "mvw/errors.hpp"
#include "mvw/io.hpp"

namespace fs = std::filesystem;
using mvw::io::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "mvwishart");
  std::ostringstream out, err;
  const int code = mvw::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

void write_series_dataset(const fs::path& dir, const std::vector<Eigen::MatrixXd>& series) {
  mvw::io::Manifest m;
  m.n = int(series.size());
  m.p = int(series.front().cols());
  m.t_ori = int(series.front().rows());
  m.payload = mvw::io::Payload::timeseries;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const std::string rel = "subjects/ts" + std::to_string(i) + ".csv";
    mvw::io::write_matrix_csv(dir / rel, series[i]);
    m.subjects.push_back({"sub" + std::to_string(i), rel});
  }
  mvw::io::write_json(dir / "manifest.json", mvw::io::to_json(m));
}

}  // namespace

TEST_CASE("matrix CSV round trip is exact") {
  mvw::testing::TempDir tmp;
  mvw::Rng rng(1);
  Eigen::MatrixXd m(3, 4);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal() * 1e-7 + rng.uniform();
  m(0, 0) = 1.0 / 3.0;
  mvw::io::write_matrix_csv(tmp / "m.csv", m);
  CHECK(mvw::io::read_matrix_csv(tmp / "m.csv") == m);
}

TEST_CASE("malformed CSV is reported") {
  mvw::testing::TempDir tmp;
  mvw::io::write_text_atomic(tmp / "ragged.csv", "1,2\n3\n");
  CHECK_THROWS_AS(mvw::io::read_matrix_csv(tmp / "ragged.csv"), mvw::io::FormatError);
  mvw::io::write_text_atomic(tmp / "word.csv", "1,x\n");
  CHECK_THROWS_AS(mvw::io::read_matrix_csv(tmp / "word.csv"), mvw::io::FormatError);
  CHECK_THROWS(mvw::io::read_matrix_csv(tmp / "missing.csv"));
}

TEST_CASE("dataset, truth and model round trips") {
  mvw::testing::TempDir tmp;
  auto bench = mvw::testing::small_benchmark(2);
  bench.data.node_names = {"a", "b", "c", "d", "e", "f", "g", "h", "i", "j", "k", "l"};
  mvw::io::write_dataset(tmp.path(), bench.data, {{"note", "test"}});
  mvw::io::Manifest manifest;
  const auto back = mvw::io::load_dataset(tmp.path(), &manifest);
  CHECK(back.matrices == bench.data.matrices);
  CHECK(back.t_ori == bench.data.t_ori);
  CHECK(back.node_names == bench.data.node_names);
  CHECK(manifest.provenance["note"] == "test");
  CHECK(mvw::io::read_json(tmp / "manifest.json")["schema_version"] == mvw::io::kSchemaVersion);

  const auto truth = mvw::io::truth_from_json(mvw::io::to_json(bench.truth));
  CHECK(truth.view_labels == bench.truth.view_labels);
  CHECK(truth.cluster_labels == bench.truth.cluster_labels);
  CHECK(mvw::io::to_json(bench.truth)["view_labels"][0] == 1);  // 1-based on disk

  mvw::Hyperparams h;
  mvw::io::ModelFile model;
  model.fit = mvw::icm_fit(bench.data, h, 4);
  model.p = bench.data.p();
  model.n = bench.data.n();
  model.extra = {{"run", "x"}};
  const auto again = mvw::io::model_from_json(json::parse(mvw::io::to_json(model).dump()));
  CHECK(again.fit.state == model.fit.state);
  CHECK(again.fit.log_posterior == model.fit.log_posterior);
  CHECK(again.fit.seed == model.fit.seed);
  CHECK(again.fit.diagnostics.log_posterior_trace == model.fit.diagnostics.log_posterior_trace);
  CHECK(again.fit.diagnostics.moves_accepted == model.fit.diagnostics.moves_accepted);
}

TEST_CASE("schema and manifest validation") {
  json j = {{"schema_version", 99}, {"n", 1}, {"p", 1}, {"t_ori", 5}, {"subjects", json::array()}};
  CHECK_THROWS_AS(mvw::io::manifest_from_json(j), mvw::io::FormatError);
  j["schema_version"] = mvw::io::kSchemaVersion;
  CHECK_THROWS_AS(mvw::io::manifest_from_json(j), mvw::io::FormatError);  // n disagrees with subjects
}

TEST_CASE("command line exit codes") {
  mvw::testing::TempDir tmp;
  CHECK(cli({}).code == mvw::kExitUsage);
  CHECK(cli({"frobnicate"}).code == mvw::kExitUsage);
  CHECK(cli({"--help"}).code == mvw::kExitOk);
  CHECK(cli({"simulate"}).code == mvw::kExitUsage);  // --out missing
  const auto bad_w = cli({"simulate", "--w", "1.5", "--out", (tmp / "x").string()});
  CHECK(bad_w.code == mvw::kExitUsage);
  CHECK(bad_w.err.find("--w") != std::string::npos);
  CHECK(cli({"simulate", "--p", "10", "--out", (tmp / "y").string()}).code == mvw::kExitUsage);
  CHECK(cli({"fit", "--in", (tmp / "nowhere").string(), "--out", (tmp / "f").string()}).code == mvw::kExitRuntime);
}

TEST_CASE("the worker default comes from the environment") {
  mvw::testing::TempDir tmp;
  const std::string data = (tmp / "d").string();
  REQUIRE(cli({"simulate", "--p", "6", "--n", "10", "--views", "2", "--clusters", "2", "--seed", "1", "--out", data}).code == 0);
  ::setenv(mvw::kWorkersEnv, "zero", 1);
  CHECK(cli({"fit", "--in", data, "--out", (tmp / "f").string(), "--restarts", "2"}).code == mvw::kExitUsage);
  ::setenv(mvw::kWorkersEnv, "3", 1);
  CHECK(cli({"fit", "--in", data, "--out", (tmp / "f").string(), "--restarts", "2"}).code == mvw::kExitOk);
  ::unsetenv(mvw::kWorkersEnv);
}

TEST_CASE("simulate is reproducible byte for byte") {
  mvw::testing::TempDir tmp;
  const std::vector<std::string> common{"simulate", "--p", "9", "--n", "12", "--seed", "7", "--balanced"};
  auto a = common, b = common;
  a.insert(a.end(), {"--out", (tmp / "a").string()});
  b.insert(b.end(), {"--out", (tmp / "b").string()});
  REQUIRE(cli(a).code == 0);
  REQUIRE(cli(b).code == 0);
  for (const auto& entry : fs::recursive_directory_iterator(tmp / "a")) {
    if (!entry.is_regular_file()) continue;
    const auto rel = fs::relative(entry.path(), tmp / "a");
    CHECK(mvw::io::read_text(entry.path()) == mvw::io::read_text(tmp / "b" / rel));
  }
  const auto truth = mvw::io::read_json(tmp / "a" / "truth.json");
  CHECK(truth["view_labels"].size() == 9);
}

TEST_CASE("preprocess without steps copies the subject files") {
  mvw::testing::TempDir tmp;
  const std::string in = (tmp / "in").string(), out = (tmp / "out").string();
  REQUIRE(cli({"simulate", "--p", "6", "--n", "5", "--views", "2", "--seed", "3", "--out", in}).code == 0);
  REQUIRE(cli({"preprocess", "--in", in, "--out", out}).code == 0);
  const auto m = mvw::io::read_manifest(tmp / "out" / "manifest.json");
  for (const auto& s : m.subjects) {
    CHECK(mvw::io::read_text(tmp / "in" / s.path) == mvw::io::read_text(tmp / "out" / s.path));
  }
  CHECK(cli({"preprocess", "--in", in, "--out", out, "--mean-from", in}).code == mvw::kExitUsage);
  CHECK(cli({"preprocess", "--in", in, "--out", out, "--regularize"}).code == mvw::kExitUsage);
}

TEST_CASE("preprocess regularizes and whitens time series") {
  mvw::testing::TempDir tmp;
  mvw::Rng rng(5);
  std::vector<Eigen::MatrixXd> series;
  for (int i = 0; i < 6; ++i) {
    Eigen::MatrixXd x(8, 10);  // fewer samples than nodes
    for (Eigen::Index k = 0; k < x.size(); ++k) x.data()[k] = rng.normal();
    series.push_back(x);
  }
  write_series_dataset(tmp / "ts", series);
  // Without shrinkage the correlations are rank-deficient.
  CHECK_THROWS_AS(mvw::io::load_dataset(tmp / "ts"), mvw::NotPositiveDefinite);
  const auto run = cli({"preprocess", "--in", (tmp / "ts").string(), "--out", (tmp / "pp").string(), "--regularize", "--whiten"});
  REQUIRE(run.code == 0);
  const auto d = mvw::io::load_dataset(tmp / "pp");
  CHECK(d.n() == 6);
  CHECK(d.subject_ids.front() == "sub0");
  const auto rep = mvw::io::read_whiten_report(tmp / "pp" / "whiten");
  CHECK(rep.mean_sqrt.rows() == 10);
  CHECK(mvw::io::read_whiten_report(tmp / "pp").mean_sqrt == rep.mean_sqrt);
  const auto man = mvw::io::read_json(tmp / "pp" / "manifest.json");
  CHECK(man["provenance"]["preprocess"]["steps"][0]["shrinkage"].size() == 6);
}

TEST_CASE("fit, evaluate and importance from the command line") {
  mvw::testing::TempDir tmp;
  const std::string data = (tmp / "d").string(), white = (tmp / "w").string(), model = (tmp / "m").string();
  REQUIRE(cli({"simulate", "--type", "2", "--w", "0.1", "--p", "8", "--n", "16", "--views", "2", "--clusters", "2",
               "--balanced", "--seed", "11", "--out", data})
              .code == 0);
  REQUIRE(cli({"preprocess", "--in", data, "--out", white, "--whiten"}).code == 0);
  REQUIRE(cli({"fit", "--in", white, "--out", model, "--restarts", "12", "--seed", "5", "--workers", "2"}).code == 0);
  const auto mj = mvw::io::read_json(tmp / "m" / "model.json");
  CHECK(mj["schema_version"] == mvw::io::kSchemaVersion);
  CHECK(mj["view_labels"].size() == 8);
  CHECK(!mj["run"].contains("workers"));
  CHECK(mvw::io::read_text(tmp / "m" / "summary.csv").rfind("rank,restart,seed,log_posterior", 0) == 0);

  const std::string model_file = (tmp / "m" / "model.json").string();
  const auto ev = cli({"evaluate", "--model", model_file, "--truth", (tmp / "d" / "truth.json").string(), "--out",
                       (tmp / "e").string()});
  CHECK(ev.code == 0);
  CHECK(fs::exists(tmp / "e" / "report.json"));

  const auto self = cli({"evaluate", "--model", model_file, "--model-b", model_file, "--data", white, "--data-b",
                         white, "--perms", "50", "--out", (tmp / "s").string()});
  CHECK(self.code == 0);
  CHECK(fs::exists(tmp / "s" / "view_agreement.csv"));
  CHECK(cli({"evaluate", "--model", model_file, "--truth", "t.json", "--model-b", model_file}).code == mvw::kExitUsage);

  const std::string report = (tmp / "w" / "whiten").string();
  const auto imp = cli({"importance", "--model", model_file, "--report", report, "--view", "1", "--top", "99"});
  CHECK(imp.code == 0);
  CHECK(imp.out.rfind("rank,node,name,importance,in_view\n", 0) == 0);
  CHECK(imp.err.find("warning") != std::string::npos);
  CHECK(cli({"importance", "--model", model_file, "--report", report, "--view", "9"}).code == mvw::kExitUsage);
  const auto missing = cli({"importance", "--model", model_file, "--report", (tmp / "none").string()});
  CHECK(missing.code == mvw::kExitRuntime);
  CHECK(missing.err.find("preprocess --whiten") != std::string::npos);
}
