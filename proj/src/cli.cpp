#include "mvw/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "mvw/errors.hpp"
#include "mvw/inference.hpp"
#include "mvw/io.hpp"
#include "mvw/labels.hpp"
#include "mvw/linalg.hpp"
#include "mvw/metrics.hpp"
#include "mvw/preprocess.hpp"
#include "mvw/synthgen.hpp"

namespace mvw {

namespace {

namespace fs = std::filesystem;
using io::json;

// Permutation streams for `evaluate`, kept apart for reproducibility.
constexpr std::uint64_t kDiceStream = 1;
constexpr std::uint64_t kAriStream = 2;

struct Streams {
  std::ostream& out;
  std::ostream& err;
};

/// Distinguishes bad input data (exit 1) from bad flags (exit 2).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

int default_workers() {
  if (const char* env = std::getenv(kWorkersEnv); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1) throw UsageError(std::string(kWorkersEnv) + " must be a positive integer");
    return static_cast<int>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string fmt_short(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", x);
  return buf;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
  int type = 1;
  SynthConfig config;
  std::string out;
};

void add_simulate(CLI::App& app, SimulateArgs& a) {
  app.add_option("--type", a.type, "1: independent views, 2: background correlation 0.2")
      ->check(CLI::IsMember({1, 2}));
  app.add_option("--w", a.config.w, "noise weight in [0, 1]")->check(CLI::Range(0.0, 1.0));
  app.add_option("--p", a.config.p, "number of nodes")->check(CLI::PositiveNumber);
  app.add_option("--n", a.config.n, "number of objects")->check(CLI::PositiveNumber);
  app.add_option("--views", a.config.views, "number of views (must divide p)")->check(CLI::PositiveNumber);
  app.add_option("--clusters", a.config.clusters, "object clusters per view")->check(CLI::PositiveNumber);
  app.add_option("--t", a.config.t, "samples per object (default p + 10)")->check(CLI::NonNegativeNumber);
  app.add_option("--seed", a.config.seed, "random seed");
  app.add_flag("--balanced", a.config.balanced, "exactly equal cluster sizes");
  app.add_option("--out", a.out, "output directory")->required();
}

int cmd_simulate(SimulateArgs& a, Streams s) {
  a.config.background = a.type == 2 ? 0.2 : 0.0;
  try {
    a.config.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const SynthData sim = generate(a.config);
  const auto& c = a.config;
  const json provenance = {
      {"generator",
       {{"type", a.type},
        {"w", c.w},
        {"background", c.background},
        {"p", c.p},
        {"n", c.n},
        {"views", c.views},
        {"clusters", c.clusters},
        {"t", c.samples()},
        {"balanced", c.balanced}}},
      {"seed", c.seed},
  };
  const fs::path dir(a.out);
  io::write_dataset(dir, sim.data, provenance);
  io::write_json(dir / "truth.json", io::to_json(sim.truth));
  s.out << "wrote " << sim.data.n() << " matrices of size " << c.p << "x" << c.p << " to " << dir.string() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// preprocess

struct PreprocessArgs {
  std::string in;
  std::string out;
  bool regularize = false;
  bool whiten = false;
  std::vector<std::string> mean_from;
};

void add_preprocess(CLI::App& app, PreprocessArgs& a) {
  app.add_option("--in", a.in, "input dataset (directory or manifest)")->required();
  app.add_option("--out", a.out, "output directory")->required();
  app.add_flag("--regularize", a.regularize, "Ledoit-Wolf shrinkage (time-series input)");
  app.add_flag("--whiten", a.whiten, "map the mean matrix to the identity");
  app.add_option("--mean-from", a.mean_from, "datasets whose pooled mean is used for whitening")
      ->expected(1, -1);
}

// Regularized (optional) matrices of one dataset; shrinkage per subject when regularizing.
Dataset prepare(const fs::path& path, bool regularize, std::vector<double>* shrinkage, io::Manifest* manifest) {
  io::Manifest m = io::read_manifest(io::manifest_path(path));
  if (!regularize) return io::load_dataset(path, manifest);
  if (m.payload != io::Payload::timeseries) {
    throw UsageError("--regularize needs a time-series dataset; " + path.string() + " holds matrices");
  }
  const auto series = io::load_series(path, m);
  Dataset d;
  d.t_ori = m.t_ori;
  d.kind = m.kind;
  d.node_names = m.node_names;
  for (std::size_t i = 0; i < series.size(); ++i) {
    d.subject_ids.push_back(m.subjects[i].id);
    ShrinkageEstimate est;
    try {
      est = m.kind == MatrixKind::correlation ? ledoit_wolf_correlation(series[i]) : ledoit_wolf(series[i]);
    } catch (const std::exception& e) {
      throw std::runtime_error("subject " + m.subjects[i].id + ": " + e.what());
    }
    if (shrinkage != nullptr) shrinkage->push_back(est.shrinkage);
    d.matrices.push_back(std::move(est.covariance));
  }
  d.validate();
  if (manifest != nullptr) *manifest = m;
  return d;
}

int cmd_preprocess(const PreprocessArgs& a, Streams s) {
  if (!a.mean_from.empty() && !a.whiten) throw UsageError("--mean-from requires --whiten");
  const fs::path in(a.in);
  const fs::path out(a.out);
  const fs::path in_manifest = io::manifest_path(in);

  if (!a.regularize && !a.whiten) {
    io::Manifest m = io::read_manifest(in_manifest);
    const fs::path base = in_manifest.parent_path();
    for (const auto& subj : m.subjects) io::write_text_atomic(out / subj.path, io::read_text(base / subj.path));
    m.provenance["preprocess"] = {{"source", in.string()}, {"steps", json::array()},
                                  {"note", "identity pipeline: subject files copied unchanged"}};
    io::write_json(out / "manifest.json", io::to_json(m));
    s.out << "copied " << m.n << " subjects unchanged\n";
    return kExitOk;
  }

  io::Manifest m;
  std::vector<double> shrinkage;
  Dataset d = prepare(in, a.regularize, &shrinkage, &m);
  json steps = json::array();
  if (a.regularize) steps.push_back({{"step", "ledoit_wolf"}, {"shrinkage", shrinkage}});

  if (a.whiten) {
    std::optional<Eigen::MatrixXd> mean;
    if (!a.mean_from.empty()) {
      std::vector<Dataset> pool;
      for (const auto& path : a.mean_from) pool.push_back(prepare(path, a.regularize, nullptr, nullptr));
      mean = pooled_mean_matrix(pool);
    }
    WhitenResult w = whiten(d, mean);
    for (int i = 0; i < w.data.n(); ++i) {
      const std::string who = "subject " + w.data.subject_id(i);
      try {
        (void)cholesky_lower(w.data.matrices[static_cast<std::size_t>(i)], who.c_str());
      } catch (const NotPositiveDefinite& e) {
        throw std::runtime_error(std::string(e.what()) + " after whitening");
      }
    }
    const json report_provenance = {{"source", in.string()}, {"mean_from", a.mean_from}};
    io::write_whiten_report(out / "whiten", w.report, report_provenance);
    steps.push_back({{"step", "whiten"}, {"mean_from", a.mean_from}, {"report", "whiten/whiten.json"}});
    d = std::move(w.data);
  }

  json provenance = m.provenance;
  provenance["preprocess"] = {{"source", in.string()}, {"steps", steps}};
  io::write_dataset(out, d, provenance);
  s.out << "wrote " << d.n() << " preprocessed matrices to " << out.string() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// fit

struct FitArgs {
  std::string in;
  std::string out;
  Hyperparams hyper;
  std::optional<double> alpha;
  std::optional<int> workers;
  int top_k = 30;
  int top_n = 5;
  int stability_perms = 0;
  bool no_warm_start = false;
};

void add_fit(CLI::App& app, FitArgs& a) {
  app.add_option("--in", a.in, "input dataset (directory or manifest)")->required();
  app.add_option("--out", a.out, "output directory")->required();
  app.add_option("--restarts", a.hyper.restarts, "number of random initializations")->check(CLI::PositiveNumber);
  app.add_option("--alpha", a.alpha, "CRP concentration for views, node and object clusters")
      ->check(CLI::PositiveNumber);
  app.add_option("--alpha-view", a.hyper.alpha_view, "CRP concentration for views")->check(CLI::PositiveNumber);
  app.add_option("--alpha-node", a.hyper.alpha_node, "CRP concentration for node clusters")->check(CLI::PositiveNumber);
  app.add_option("--alpha-object", a.hyper.alpha_object, "CRP concentration for object clusters")
      ->check(CLI::PositiveNumber);
  app.add_option("--delta", a.hyper.delta, "spacing of the degree-of-freedom grid")->check(CLI::PositiveNumber);
  app.add_option("--max-iter", a.hyper.max_iter, "sweep budget per restart")->check(CLI::NonNegativeNumber);
  app.add_option("--max-stability", a.hyper.max_stability, "stable sweeps needed to stop")->check(CLI::PositiveNumber);
  app.add_option("--epsilon", a.hyper.epsilon, "improvement below which a sweep counts as stable")
      ->check(CLI::PositiveNumber);
  app.add_option("--seed", a.hyper.seed, "master seed");
  app.add_option("--workers", a.workers, std::string("worker threads (default $") + kWorkersEnv + " or all cores)")
      ->check(CLI::PositiveNumber);
  app.add_option("--top-k", a.top_k, "rows in summary.csv")->check(CLI::PositiveNumber);
  app.add_option("--top-n", a.top_n, "candidates for stable model selection")->check(CLI::PositiveNumber);
  app.add_option("--stability-perms", a.stability_perms, "permutations for the view stability null")
      ->check(CLI::NonNegativeNumber);
  app.add_flag("--no-warm-start", a.no_warm_start, "skip the object-cluster pass before the first sweep");
}

int cmd_fit(FitArgs& a, Streams s) {
  Hyperparams h = a.hyper;
  if (a.alpha) h.set_alpha(*a.alpha);
  h.workers = a.workers ? *a.workers : default_workers();
  h.warm_start = !a.no_warm_start;
  const Dataset d = io::load_dataset(a.in);

  std::vector<FitResult> results;
  try {
    results = run_restarts(d, h);
  } catch (const EmptyDofGrid& e) {
    throw std::runtime_error(std::string(e.what()) +
                             "; hint: supply longer series (t_ori) or fewer nodes so that max(2p, t_ori) >= p + 5");
  }
  const StableSelection sel =
      select_stable_model(results, a.top_n, 30, a.stability_perms, derive_seed(h.seed, 0xabcdefULL));
  if (sel.fallback) s.err << "warning: fewer than two restarts; returning the best fit without stability selection\n";

  io::ModelFile model;
  model.fit = sel.model;
  model.p = d.p();
  model.n = d.n();
  model.node_names = d.node_names;
  model.subject_ids = d.subject_ids;
  json stability = json::array();
  for (std::size_t v = 0; v < sel.stability.mean_dice.size(); ++v) {
    json row = {{"view", v + 1}, {"mean_dice", sel.stability.mean_dice[v]}};
    if (v < sel.stability.null_quantile.size()) row["null_q95"] = sel.stability.null_quantile[v];
    stability.push_back(row);
  }
  model.extra = {
      {"hyperparameters",
       {{"alpha_view", h.alpha_view},
        {"alpha_node", h.alpha_node},
        {"alpha_object", h.alpha_object},
        {"delta", h.delta},
        {"restarts", h.restarts},
        {"max_iter", h.max_iter},
        {"max_stability", h.max_stability},
        {"epsilon", h.epsilon},
        {"master_seed", h.seed},
        {"warm_start", h.warm_start}}},
      {"selection",
       {{"rank", sel.rank + 1},
        {"partner_rank", sel.partner_rank + 1},
        {"pair_ari", sel.pair_ari},
        {"fallback", sel.fallback},
        {"best_log_posterior", results.front().log_posterior}}},
      {"stability", stability},
  };
  const fs::path out(a.out);
  io::write_json(out / "model.json", io::to_json(model));
  io::write_text_atomic(out / "summary.csv", io::format_summary_csv(results, a.top_k));
  s.out << "selected restart " << sel.model.restart << " (rank " << sel.rank + 1 << "): log posterior "
        << fmt_short(sel.model.log_posterior) << ", " << sel.model.state.view_count() << " views, T = "
        << sel.model.state.dof << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// evaluate

struct EvaluateArgs {
  std::string model;
  std::string truth;
  std::string model_b;
  std::string data;
  std::string data_b;
  std::optional<double> match_dof;
  int perms = 1000;
  double fdr_level = 0.05;
  std::uint64_t seed = 0;
  std::string out;
};

void add_evaluate(CLI::App& app, EvaluateArgs& a) {
  app.add_option("--model", a.model, "model file")->required();
  auto* truth = app.add_option("--truth", a.truth, "ground-truth file from simulate");
  auto* model_b = app.add_option("--model-b", a.model_b, "second model to compare against");
  truth->excludes(model_b);
  app.add_option("--data", a.data, "dataset of --model, for subject matching");
  app.add_option("--data-b", a.data_b, "dataset of --model-b, for subject matching");
  app.add_option("--match-dof", a.match_dof, "degree of freedom for subject matching (default: model T)")
      ->check(CLI::PositiveNumber);
  app.add_option("--perms", a.perms, "permutations per test")->check(CLI::PositiveNumber);
  app.add_option("--fdr-level", a.fdr_level, "FDR level for significant view pairs")->check(CLI::Range(0.0, 1.0));
  app.add_option("--seed", a.seed, "permutation seed");
  app.add_option("--out", a.out, "output directory for report.json and CSV tables");
}

int evaluate_truth(const EvaluateArgs& a, const io::ModelFile& model, Streams s) {
  const GroundTruth truth = io::truth_from_json(io::read_json(a.truth));
  const RecoveryReport rep = recovery_score(truth, model.fit.state);
  json per_view = json::array();
  std::string csv = "true_view,cluster_ari\n";
  for (std::size_t v = 0; v < rep.cluster_ari_per_true_view.size(); ++v) {
    per_view.push_back(rep.cluster_ari_per_true_view[v]);
    csv += std::to_string(v + 1) + "," + fmt(rep.cluster_ari_per_true_view[v]) + "\n";
  }
  const json report = {{"schema_version", io::kSchemaVersion},
                       {"view_ari", rep.view_ari},
                       {"cluster_ari_per_true_view", per_view},
                       {"grand_mean_cluster_ari", rep.grand_mean_cluster_ari}};
  if (!a.out.empty()) {
    io::write_json(fs::path(a.out) / "report.json", report);
    io::write_text_atomic(fs::path(a.out) / "recovery.csv", csv);
  }
  s.out << "view ARI " << fmt_short(rep.view_ari) << "\n";
  for (std::size_t v = 0; v < per_view.size(); ++v) {
    s.out << "true view " << v + 1 << ": cluster ARI " << fmt_short(rep.cluster_ari_per_true_view[v]) << "\n";
  }
  s.out << "grand mean cluster ARI " << fmt_short(rep.grand_mean_cluster_ari) << "\n";
  return kExitOk;
}

int evaluate_pair(const EvaluateArgs& a, const io::ModelFile& ma, Streams s) {
  const io::ModelFile mb = io::read_model(a.model_b);
  if (ma.p != mb.p || ma.n != mb.n) throw DimensionMismatch("models differ in node or object count");
  const ModelState& sa = ma.fit.state;
  const ModelState& sb = mb.fit.state;
  const auto matches = match_views_by_dice(sa.u, sb.u);
  const int nv = sa.view_count();

  Rng dice_rng(derive_seed(a.seed, kDiceStream));
  Rng ari_rng(derive_seed(a.seed, kAriStream));
  struct Row {
    int view_b = -1;
    double dice = 0, dice_p = 1, dice_null = 0, ari = 0, ari_p = 1, ari_null = 0;
  };
  std::vector<Row> rows(static_cast<std::size_t>(nv));
  for (int v = 0; v < nv; ++v) {
    Row& r = rows[static_cast<std::size_t>(v)];
    r.view_b = matches[static_cast<std::size_t>(v)].other;
    r.dice = matches[static_cast<std::size_t>(v)].dice;
    if (r.view_b < 0) continue;
    const auto nodes_a = sa.view_nodes(v);
    const int jb = r.view_b;
    const LabelStatistic dice_stat = [&](std::span<const int> u) {
      std::vector<int> members;
      for (std::size_t i = 0; i < u.size(); ++i) {
        if (u[i] == jb) members.push_back(static_cast<int>(i));
      }
      return dice(nodes_a, members);
    };
    const auto dp = permutation_quantile(r.dice, dice_stat, sb.u, a.perms, 0.95, dice_rng);
    r.dice_p = dp.p_value;
    r.dice_null = dp.quantile;
    const auto& za = sa.z[static_cast<std::size_t>(v)];
    r.ari = adjusted_rand_index(za, sb.z[static_cast<std::size_t>(jb)]);
    const LabelStatistic ari_stat = [&](std::span<const int> z) { return adjusted_rand_index(za, z); };
    const auto ap = permutation_quantile(r.ari, ari_stat, sb.z[static_cast<std::size_t>(jb)], a.perms, 0.95, ari_rng);
    r.ari_p = ap.p_value;
    r.ari_null = ap.quantile;
  }
  std::vector<double> dice_p, ari_p;
  for (const auto& r : rows) {
    dice_p.push_back(r.dice_p);
    ari_p.push_back(r.ari_p);
  }
  const auto dice_q = fdr_adjust(dice_p);
  const auto ari_q = fdr_adjust(ari_p);

  std::optional<Dataset> da, db;
  if (!a.data.empty() && !a.data_b.empty()) {
    da = io::load_dataset(a.data);
    db = io::load_dataset(a.data_b);
    if (da->p() != ma.p || db->p() != mb.p) throw DimensionMismatch("datasets do not match the models' node count");
  } else if (!a.data.empty() || !a.data_b.empty()) {
    throw UsageError("subject matching needs both --data and --data-b");
  }

  json table = json::array();
  std::string csv =
      "view_a,view_b,nodes_a,nodes_b,dice,dice_p,dice_q,dice_null_q95,ari,ari_p,ari_q,ari_null_q95,"
      "match_b_to_a,match_a_to_b\n";
  for (int v = 0; v < nv; ++v) {
    const Row& r = rows[static_cast<std::size_t>(v)];
    const auto nodes_a = sa.view_nodes(v);
    const auto nodes_b = r.view_b >= 0 ? sb.view_nodes(r.view_b) : std::vector<int>{};
    json row = {{"view_a", v + 1},
                {"view_b", r.view_b >= 0 ? json(r.view_b + 1) : json(nullptr)},
                {"nodes_a", nodes_a.size()},
                {"nodes_b", nodes_b.size()},
                {"dice", r.dice},
                {"dice_p", r.dice_p},
                {"dice_q", dice_q[static_cast<std::size_t>(v)]},
                {"dice_null_q95", r.dice_null},
                {"ari", r.ari},
                {"ari_p", r.ari_p},
                {"ari_q", ari_q[static_cast<std::size_t>(v)]},
                {"ari_null_q95", r.ari_null}};
    std::string b_to_a, a_to_b;
    if (da && r.view_b >= 0 && ari_q[static_cast<std::size_t>(v)] < a.fdr_level) {
      const double dof_a = a.match_dof ? *a.match_dof : double(sa.dof);
      const double dof_b = a.match_dof ? *a.match_dof : double(sb.dof);
      const MatchResult m1 = match_subjects(*da, *db, nodes_a, dof_a);
      const MatchResult m2 = match_subjects(*db, *da, nodes_b, dof_b);
      if (m1.ties + m2.ties > 0) s.err << "warning: view " << v + 1 << ": ties in subject matching broken by index\n";
      row["match_b_to_a"] = m1.accuracy;
      row["match_a_to_b"] = m2.accuracy;
      b_to_a = fmt(m1.accuracy);
      a_to_b = fmt(m2.accuracy);
    }
    table.push_back(row);
    csv += std::to_string(v + 1) + "," + (r.view_b >= 0 ? std::to_string(r.view_b + 1) : "") + "," +
           std::to_string(nodes_a.size()) + "," + std::to_string(nodes_b.size()) + "," + fmt(r.dice) + "," +
           fmt(r.dice_p) + "," + fmt(dice_q[static_cast<std::size_t>(v)]) + "," + fmt(r.dice_null) + "," +
           fmt(r.ari) + "," + fmt(r.ari_p) + "," + fmt(ari_q[static_cast<std::size_t>(v)]) + "," +
           fmt(r.ari_null) + "," + b_to_a + "," + a_to_b + "\n";
    s.out << "view " << v + 1 << " -> " << (r.view_b >= 0 ? std::to_string(r.view_b + 1) : "-") << ": Dice "
          << fmt_short(r.dice) << " (q " << fmt_short(dice_q[static_cast<std::size_t>(v)]) << "), ARI "
          << fmt_short(r.ari) << " (q " << fmt_short(ari_q[static_cast<std::size_t>(v)]) << ")";
    if (!b_to_a.empty()) s.out << ", matching " << fmt_short(row["match_b_to_a"]) << " / " << fmt_short(row["match_a_to_b"]);
    s.out << "\n";
  }
  const json report = {{"schema_version", io::kSchemaVersion},
                       {"view_ari", adjusted_rand_index(sa.u, sb.u)},
                       {"perms", a.perms},
                       {"seed", a.seed},
                       {"views", table}};
  if (!a.out.empty()) {
    io::write_json(fs::path(a.out) / "report.json", report);
    io::write_text_atomic(fs::path(a.out) / "view_agreement.csv", csv);
  }
  s.out << "view membership ARI " << fmt_short(report["view_ari"]) << "\n";
  return kExitOk;
}

int cmd_evaluate(const EvaluateArgs& a, Streams s) {
  if (a.truth.empty() == a.model_b.empty()) throw UsageError("give exactly one of --truth or --model-b");
  const io::ModelFile model = io::read_model(a.model);
  return a.truth.empty() ? evaluate_pair(a, model, s) : evaluate_truth(a, model, s);
}

// ---------------------------------------------------------------------------
// importance

struct ImportanceArgs {
  std::string model;
  std::string report;
  int view = 1;
  int top = 10;
  bool raw = false;
  std::string out;
};

void add_importance(CLI::App& app, ImportanceArgs& a) {
  app.add_option("--model", a.model, "model file fitted on whitened data")->required();
  app.add_option("--report", a.report, "output of preprocess --whiten (dataset or whiten/ directory)")->required();
  app.add_option("--view", a.view, "view number (1-based)")->check(CLI::PositiveNumber);
  app.add_option("--top", a.top, "rows to print")->check(CLI::PositiveNumber);
  app.add_flag("--raw", a.raw, "use raw square-root entries instead of normalized ones");
  app.add_option("--out", a.out, "CSV file for the full ranking");
}

int cmd_importance(const ImportanceArgs& a, Streams s) {
  const io::ModelFile model = io::read_model(a.model);
  const fs::path report_path(a.report);
  const fs::path json_path = io::locate_whiten_report(report_path);
  if (!fs::exists(json_path)) {
    throw std::runtime_error("no whitening report at " + json_path.string() +
                             "; importance maps whitened views back to original nodes and needs the report "
                             "written by `preprocess --whiten`");
  }
  const WhitenReport report = io::read_whiten_report(report_path);
  if (report.mean_sqrt.rows() != model.p) throw DimensionMismatch("whitening report and model differ in node count");
  const ModelState& st = model.fit.state;
  if (a.view > st.view_count()) {
    throw UsageError("--view " + std::to_string(a.view) + " exceeds the model's " + std::to_string(st.view_count()) +
                     " views");
  }
  const auto nodes = st.view_nodes(a.view - 1);
  const auto scores =
      importance_profile(nodes, report, a.raw ? ImportanceScale::raw : ImportanceScale::normalized);
  std::vector<int> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return scores[static_cast<std::size_t>(x)] > scores[static_cast<std::size_t>(y)]; });

  int top = a.top;
  if (top > model.p) {
    s.err << "warning: --top " << top << " exceeds p = " << model.p << "; showing all nodes\n";
    top = model.p;
  }
  auto name_of = [&](int i) {
    return model.node_names.empty() ? std::string() : model.node_names[static_cast<std::size_t>(i)];
  };
  s.out << "rank,node,name,importance,in_view\n";
  std::string csv = "rank,node,name,importance,in_view\n";
  for (std::size_t r = 0; r < order.size(); ++r) {
    const int i = order[r];
    const bool member = st.u[static_cast<std::size_t>(i)] == a.view - 1;
    const std::string line = std::to_string(r + 1) + "," + std::to_string(i + 1) + "," + name_of(i) + "," +
                             fmt(scores[static_cast<std::size_t>(i)]) + "," + (member ? "1" : "0") + "\n";
    if (static_cast<int>(r) < top) s.out << line;
    csv += line;
  }
  if (!a.out.empty()) io::write_text_atomic(a.out, csv);
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-view clustering of correlation matrices with Wishart mixtures"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "mvwishart 0.1.0");

  SimulateArgs sim;
  PreprocessArgs pre;
  FitArgs fit;
  EvaluateArgs ev;
  ImportanceArgs imp;
  add_simulate(*app.add_subcommand("simulate", "generate a planted synthetic benchmark"), sim);
  add_preprocess(*app.add_subcommand("preprocess", "shrinkage and whitening of a dataset"), pre);
  add_fit(*app.add_subcommand("fit", "fit views, node clusters and object clusters"), fit);
  add_evaluate(*app.add_subcommand("evaluate", "score a model against truth or another model"), ev);
  add_importance(*app.add_subcommand("importance", "rank original nodes for a whitened view"), imp);

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    (void)app.exit(e, out, err);
    return kExitUsage;
  }

  const Streams streams{out, err};
  try {
    const auto* cmd = app.get_subcommands().front();
    const std::string name = cmd->get_name();
    if (name == "simulate") return cmd_simulate(sim, streams);
    if (name == "preprocess") return cmd_preprocess(pre, streams);
    if (name == "fit") return cmd_fit(fit, streams);
    if (name == "evaluate") return cmd_evaluate(ev, streams);
    return cmd_importance(imp, streams);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

int run_cli(int argc, const char* const* argv) {
  std::vector<std::string> args(argv, argv + argc);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace mvw
