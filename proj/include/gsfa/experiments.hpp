#pragma once

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "gsfa/builders.hpp"
#include "gsfa/datagen.hpp"
#include "gsfa/estimators.hpp"
#include "gsfa/free_response.hpp"
#include "gsfa/hierarchy.hpp"
#include "gsfa/io.hpp"
#include "gsfa/labels.hpp"
#include "gsfa/solver.hpp"

namespace gsfa::exp {

namespace fs = std::filesystem;

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Bad flag values that only show up after parsing (unknown kinds, missing
/// inputs for the chosen kind). Reported with exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

[[noreturn]] inline void usage(const std::string& msg) { throw UsageError(msg); }

/// Default output root: $GSFA_OUTPUT_ROOT, else ./gsfa_runs.
inline fs::path output_root() {
  const char* env = std::getenv("GSFA_OUTPUT_ROOT");
  return env && *env ? fs::path(env) : fs::path("gsfa_runs");
}

inline fs::path run_dir(const std::string& out, const std::string& command) {
  return out.empty() ? output_root() / command : fs::path(out);
}

/// Collects log lines and library warnings for one run; written to log.txt.
class RunLog {
 public:
  explicit RunLog(std::ostream& echo) : echo_(echo), sink_([this](const std::string& m) { line("warning: " + m); }) {}

  void line(const std::string& s) {
    text_ += s + '\n';
    echo_ << s << '\n';
  }
  const std::string& text() const { return text_; }

 private:
  std::ostream& echo_;
  std::string text_;
  ScopedWarningSink sink_;
};

inline void finish_run(const fs::path& dir, const Json& config, const RunLog& log) {
  io::write_json(dir / "config.json", config);
  io::write_text(dir / "log.txt", log.text());
}

/// Runs a command body, mapping errors to exit codes.
template <typename F>
int guarded_run(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << e.what() << '\n';
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

inline std::string join(const std::vector<Index>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + std::to_string(xs[i]);
  return s;
}

inline Vector index_labels(Index n) { return Vector::LinSpaced(n, 0.0, static_cast<double>(n - 1)); }

// ---------------------------------------------------------------------------
// build-graph

struct BuildGraphConfig {
  std::string kind;                        // reordering | clustered | serial | ell | compact
  Index n = 30;
  Index k = 15;                            // serial groups
  std::string variant = "self_loop_extended";
  std::vector<Index> class_sizes;          // clustered
  std::string labels_csv;                  // serial/ell raw labels (else 0…n−1)
  std::string labels_file;                 // ell: label-set JSON
  Index total_labels = 1;                  // ell from raw labels: 1 + auxiliaries
  Index classes = 8;                       // compact
  Index per_class = 4;                     // compact
  Index count = 7;                         // compact label count L
  bool truncate = false;
  bool nonnegative = false;
  std::optional<double> edge_sum;
  std::string out;

  Json to_json() const {
    Json j{{"command", "build-graph"}, {"kind", kind}};
    if (kind == "reordering") j.update({{"n", n}, {"variant", variant}});
    if (kind == "clustered") j["class_sizes"] = class_sizes;
    if (kind == "serial") j.update({{"n", n}, {"k", k}, {"labels_csv", labels_csv}, {"truncate", truncate}});
    if (kind == "ell")
      j.update({{"n", n}, {"labels_csv", labels_csv}, {"labels_file", labels_file}, {"total_labels", total_labels}});
    if (kind == "compact") j.update({{"classes", classes}, {"per_class", per_class}, {"count", count}});
    if (kind == "ell" || kind == "compact") {
      j["nonnegative"] = nonnegative;
      j["edge_sum"] = edge_sum ? Json(*edge_sum) : Json(nullptr);
    }
    return j;
  }
};

inline TrainingGraph build_graph(const BuildGraphConfig& c) {
  auto raw_labels = [&] { return c.labels_csv.empty() ? index_labels(c.n) : load_label_column(c.labels_csv); };
  if (c.kind == "reordering" || c.kind == "linear") {
    LinearVariant v;
    if (c.variant == "self_loop_extended") v = LinearVariant::self_loop_extended;
    else if (c.variant == "endpoint_halved") v = LinearVariant::endpoint_halved_vertex_weights;
    else usage("unknown linear variant '" + c.variant + "'");
    return build_linear_graph(c.n, v);
  }
  if (c.kind == "clustered") {
    if (c.class_sizes.empty()) usage("clustered graphs need --class-sizes");
    return build_clustered_graph(c.class_sizes);
  }
  if (c.kind == "serial")
    return build_serial_graph(raw_labels(), c.k, c.truncate ? RemainderPolicy::truncate : RemainderPolicy::strict).graph;
  EllOptions opts;
  opts.edge_sum = c.edge_sum;
  opts.nonnegative = c.nonnegative;
  if (c.kind == "ell") {
    if (!c.labels_file.empty()) return build_ell_graph(load_labels(c.labels_file), opts);
    const Vector l = raw_labels();
    return build_ell_graph(label_with_auxiliaries(l, c.total_labels, Vector::Ones(l.size())), opts);
  }
  if (c.kind == "compact") {
    const auto code = compact_binary_labels(static_cast<int>(c.classes), static_cast<int>(c.count));
    std::vector<Index> ids;
    for (Index k = 0; k < c.classes; ++k) ids.insert(ids.end(), static_cast<std::size_t>(c.per_class), k);
    return build_ell_graph(expand_compact_labels(code, ids), opts);
  }
  usage("unknown graph kind '" + c.kind + "'");
}

inline Json consistency_json(const TrainingGraph& g) {
  const auto rep = check_consistency(g);
  return {{"n", g.size()},
          {"q", g.q_sum()},
          {"r", g.r_sum()},
          {"consistent", rep.consistent},
          {"max_abs_residual", rep.max_abs_residual},
          {"tolerance", rep.tolerance},
          {"min_weight", g.min_weight()}};
}

inline int cmd_build_graph(const BuildGraphConfig& c, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  return guarded_run(err, [&] {
    RunLog log(out);
    const TrainingGraph g = build_graph(c);
    const fs::path dir = run_dir(c.out, "build-graph");
    save_graph(dir / "graph.json", g);
    const Json rep = consistency_json(g);
    io::write_json(dir / "consistency.json", rep);
    log.line("graph " + c.kind + ": N=" + std::to_string(g.size()) + " Q=" + format_double(g.q_sum()) +
             " R=" + format_double(g.r_sum()) + " consistent=" + (rep["consistent"].get<bool>() ? "yes" : "no"));
    finish_run(dir, c.to_json(), log);
    return kExitOk;
  });
}

// ---------------------------------------------------------------------------
// spectrum

struct SpectrumConfig {
  std::string graph;
  Index responses = 5;
  std::string out;

  Json to_json() const { return {{"command", "spectrum"}, {"graph", graph}, {"responses", responses}}; }
};

struct SpectrumSummary {
  Index n = 0;
  Index below_two = 0;
};

/// Writes spectrum.csv, responses.csv (the slowest feasible responses) and
/// summary.json under `dir`.
inline SpectrumSummary write_spectrum(const fs::path& dir, const std::string& prefix, const TrainingGraph& g,
                                      Index responses) {
  const auto s = optimal_free_responses(g);
  io::write_text(dir / (prefix + "spectrum.csv"), spectrum_csv(s));
  const Index k = std::min<Index>(responses, static_cast<Index>(s.feasible_indices().size()));
  std::vector<std::string> names;
  for (Index j = 0; j < k; ++j) names.push_back("y" + std::to_string(j + 1));
  io::write_text(dir / (prefix + "responses.csv"), matrix_csv(s.feasible_responses(k).transpose(), names));
  SpectrumSummary sum{g.size(), s.count_below()};
  io::write_json(dir / (prefix + "summary.json"),
                 Json{{"n", sum.n}, {"delta_below_2", sum.below_two}, {"feasible", s.feasible_indices().size()}});
  return sum;
}

inline int cmd_spectrum(const SpectrumConfig& c, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  return guarded_run(err, [&] {
    if (c.graph.empty()) usage("spectrum needs --graph");
    RunLog log(out);
    const fs::path dir = run_dir(c.out, "spectrum");
    const auto sum = write_spectrum(dir, "", load_graph(c.graph), c.responses);
    log.line("N=" + std::to_string(sum.n) + " responses with delta<2: " + std::to_string(sum.below_two));
    finish_run(dir, c.to_json(), log);
    return kExitOk;
  });
}

// ---------------------------------------------------------------------------
// gen-data, make-labels

struct GenDataConfig {
  std::string kind = "regression";  // regression | classification
  RegressionSpec regression;
  ClassificationSpec classification;
  std::string format = "csv";       // csv | bin
  std::string out;

  Json to_json() const {
    Json j{{"command", "gen-data"}, {"kind", kind}, {"format", format}};
    j["spec"] = kind == "regression" ? spec_json(regression) : spec_json(classification);
    return j;
  }
};

inline int cmd_gen_data(const GenDataConfig& c, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  return guarded_run(err, [&] {
    if (c.format != "csv" && c.format != "bin") usage("format must be csv or bin");
    RunLog log(out);
    const fs::path dir = run_dir(c.out, "gen-data");
    const std::string data_name = "data." + c.format;
    if (c.kind == "regression") {
      const auto d = gen_regression(c.regression);
      save_data(dir / data_name, d.x);
      save_label_column(dir / "labels.csv", d.labels);
      io::write_json(dir / "metadata.json", d.metadata);
      log.line("regression data: I=" + std::to_string(d.x.rows()) + " N=" + std::to_string(d.x.cols()));
    } else if (c.kind == "classification") {
      const auto d = gen_classification(c.classification);
      save_data(dir / data_name, d.x);
      Vector ids(static_cast<Index>(d.class_ids.size()));
      for (std::size_t n = 0; n < d.class_ids.size(); ++n) ids[static_cast<Index>(n)] = static_cast<double>(d.class_ids[n]);
      save_label_column(dir / "classes.csv", ids, "class");
      io::write_json(dir / "metadata.json", d.metadata);
      log.line("classification data: I=" + std::to_string(d.x.rows()) + " N=" + std::to_string(d.x.cols()));
    } else {
      usage("unknown data kind '" + c.kind + "'");
    }
    finish_run(dir, c.to_json(), log);
    return kExitOk;
  });
}

struct MakeLabelsConfig {
  std::string labels_csv;     // raw label column; with total_labels
  Index total_labels = 1;
  std::string classes_csv;    // class ids; with compact_count
  Index compact_count = 0;
  std::string out;

  Json to_json() const {
    return {{"command", "make-labels"},      {"labels_csv", labels_csv},   {"total_labels", total_labels},
            {"classes_csv", classes_csv},    {"compact_count", compact_count}};
  }
};

inline int cmd_make_labels(const MakeLabelsConfig& c, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  return guarded_run(err, [&] {
    RunLog log(out);
    const fs::path dir = run_dir(c.out, "make-labels");
    LabelSet ls;
    if (!c.labels_csv.empty()) {
      const Vector l = load_label_column(c.labels_csv);
      ls = label_with_auxiliaries(l, c.total_labels, Vector::Ones(l.size()));
    } else if (!c.classes_csv.empty()) {
      const Vector raw = load_label_column(c.classes_csv);
      std::vector<Index> ids;
      for (Index n = 0; n < raw.size(); ++n) ids.push_back(static_cast<Index>(std::llround(raw[n])));
      const Index classes = *std::max_element(ids.begin(), ids.end()) + 1;
      const Index count = c.compact_count > 0 ? c.compact_count : classes - 1;
      ls = expand_compact_labels(compact_binary_labels(static_cast<int>(classes), static_cast<int>(count)), ids);
    } else {
      usage("make-labels needs --labels-csv or --classes-csv");
    }
    save_labels(dir / "labels.json", ls);
    log.line("label set: L=" + std::to_string(ls.count()) + " N=" + std::to_string(ls.samples()));
    finish_run(dir, c.to_json(), log);
    return kExitOk;
  });
}

// ---------------------------------------------------------------------------
// train

struct TrainConfig {
  std::string data;
  std::string graph;
  Index out_dims = 3;
  std::string expansion = "identity";
  std::optional<Index> pca_dims;
  std::string architecture;  // when set, trains a hierarchical network
  std::string out;

  Json to_json() const {
    return {{"command", "train"},       {"data", data},
            {"graph", graph},           {"out_dims", out_dims},
            {"expansion", expansion},   {"pca_dims", pca_dims ? Json(*pca_dims) : Json(nullptr)},
            {"architecture", architecture}};
  }
};

inline std::string delta_report(const Vector& deltas) {
  std::string s = "feature,delta\n";
  for (Index j = 0; j < deltas.size(); ++j) s += std::to_string(j + 1) + ',' + format_double(deltas[j]) + '\n';
  return s;
}

inline int cmd_train(const TrainConfig& c, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  return guarded_run(err, [&] {
    if (c.data.empty() || c.graph.empty()) usage("train needs --data and --graph");
    RunLog log(out);
    const fs::path dir = run_dir(c.out, "train");
    const Matrix x = load_data(c.data);
    const TrainingGraph g = load_graph(c.graph);
    require(x.cols() == g.size(), ErrorKind::dimension,
            "data has " + std::to_string(x.cols()) + " samples but the graph has " + std::to_string(g.size()) +
                " vertices");
    if (!c.architecture.empty()) {
      const auto arch = architecture_from_json(io::read_json(c.architecture));
      const auto net = train_hgsfa(x, g, arch.layers, arch.input_shape);
      save_network(dir / "network", net);
      const Matrix y = network_extract(net, x);
      Vector deltas(y.rows());
      for (Index j = 0; j < y.rows(); ++j) deltas[j] = weighted_delta(g, y.row(j).transpose());
      io::write_text(dir / "report.csv", delta_report(deltas));
      io::write_text(dir / "architecture.csv", net.report.table());
      log.line("trained " + std::to_string(arch.layers.size()) + "-layer network, top output " +
               std::to_string(y.rows()));
    } else {
      const GsfaNode node = train_node(x, g, c.pca_dims, parse_expansion(c.expansion), c.out_dims);
      save_model(dir / "model.json", node);
      io::write_text(dir / "report.csv", delta_report(node.gsfa.deltas));
      log.line("trained GSFA: I=" + std::to_string(x.rows()) + " J=" + std::to_string(c.out_dims) +
               " delta1=" + format_double(node.gsfa.deltas[0]));
    }
    finish_run(dir, c.to_json(), log);
    return kExitOk;
  });
}

// ---------------------------------------------------------------------------
// evaluate

struct EvaluateConfig {
  std::string train_data, train_labels, test_data, test_labels;
  std::string graph;
  std::string expansion = "identity";
  Index d_min = 1;
  Index d_max = 5;
  std::vector<std::string> estimators{"linear_scaling", "linear_regression", "soft_gc"};
  std::optional<Index> soft_gc_classes;
  std::string out;

  Json to_json() const {
    return {{"command", "evaluate"},
            {"train_data", train_data},
            {"train_labels", train_labels},
            {"test_data", test_data},
            {"test_labels", test_labels},
            {"graph", graph},
            {"expansion", expansion},
            {"d_min", d_min},
            {"d_max", d_max},
            {"estimators", estimators},
            {"soft_gc_classes", soft_gc_classes ? Json(*soft_gc_classes) : Json(nullptr)}};
  }
};

struct EvalRow {
  std::string graph, estimator;
  Index d = 0;
  double train_rmse = 0, test_rmse = 0, train_chance = 0, test_chance = 0;
};

/// Fits each estimator on the d slowest training features and scores it on
/// both splits. linear_scaling reads only y₁, so its rows repeat across d.
inline std::vector<EvalRow> evaluate_features(const std::string& graph_name, const Matrix& y_train,
                                              const Vector& l_train, const Matrix& y_test, const Vector& l_test,
                                              const EvaluateConfig& c) {
  require(c.d_min >= 1 && c.d_min <= c.d_max && c.d_max <= y_train.rows(), ErrorKind::parameter,
          "feature range [" + std::to_string(c.d_min) + ", " + std::to_string(c.d_max) + "] exceeds the " +
              std::to_string(y_train.rows()) + " available features");
  std::vector<EvalRow> rows;
  const double chance_train = chance_rmse(l_train);
  const double chance_test = chance_rmse(l_test);
  for (const auto& name : c.estimators) {
    const EstimatorKind kind = parse_estimator_kind(name);
    for (Index d = c.d_min; d <= c.d_max; ++d) {
      const Matrix yt = y_train.topRows(d);
      LabelEstimator e;
      switch (kind) {
        case EstimatorKind::linear_scaling: e = fit_linear_scaling(yt.row(0).transpose(), l_train); break;
        case EstimatorKind::linear_regression: e = fit_linear_regression(yt, l_train); break;
        case EstimatorKind::soft_gc:
          e = fit_soft_gc(yt, l_train, c.soft_gc_classes.value_or(default_soft_gc_classes(l_train)));
          break;
      }
      rows.push_back({graph_name, name, d, rmse(predict(e, yt), l_train), rmse(predict(e, y_test.topRows(d)), l_test),
                      chance_train, chance_test});
    }
  }
  return rows;
}

inline std::string eval_csv(const std::vector<EvalRow>& rows) {
  std::string s = "graph,estimator,d,train_rmse,test_rmse,train_chance_rmse,test_chance_rmse\n";
  for (const auto& r : rows)
    s += r.graph + ',' + r.estimator + ',' + std::to_string(r.d) + ',' + format_double(r.train_rmse) + ',' +
         format_double(r.test_rmse) + ',' + format_double(r.train_chance) + ',' + format_double(r.test_chance) + '\n';
  return s;
}

inline int cmd_evaluate(const EvaluateConfig& c, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  return guarded_run(err, [&] {
    if (c.train_data.empty() || c.train_labels.empty() || c.test_data.empty() || c.test_labels.empty() ||
        c.graph.empty())
      usage("evaluate needs --train-data, --train-labels, --test-data, --test-labels and --graph");
    for (const auto& e : c.estimators)
      if (e != "linear_scaling" && e != "linear_regression" && e != "soft_gc") usage("unknown estimator '" + e + "'");
    RunLog log(out);
    const fs::path dir = run_dir(c.out, "evaluate");
    const Matrix xtr = load_data(c.train_data);
    const Matrix xte = load_data(c.test_data);
    const Vector ltr = load_label_column(c.train_labels);
    const Vector lte = load_label_column(c.test_labels);
    const TrainingGraph g = load_graph(c.graph);
    require(xtr.cols() == g.size() && ltr.size() == g.size(), ErrorKind::dimension,
            "training data, labels and graph disagree on N");
    require(xte.cols() == lte.size(), ErrorKind::dimension, "test data and labels disagree on N");
    const GsfaNode node = train_node(xtr, g, std::nullopt, parse_expansion(c.expansion), c.d_max);
    const auto rows = evaluate_features(fs::path(c.graph).stem().string(), node_extract(node, xtr), ltr,
                                        node_extract(node, xte), lte, c);
    io::write_text(dir / "metrics.csv", eval_csv(rows));
    log.line("wrote " + std::to_string(rows.size()) + " metric rows");
    finish_run(dir, c.to_json(), log);
    return kExitOk;
  });
}

// ---------------------------------------------------------------------------
// reproduce

struct Check {
  std::string name;
  double value = 0.0;
  std::string relation;  // "==", "<=", ">="
  double threshold = 0.0;

  bool pass() const {
    if (relation == "==") return value == threshold;
    if (relation == "<=") return value <= threshold;
    return value >= threshold;
  }
};

inline std::string checks_csv(const std::vector<Check>& cs) {
  std::string s = "check,value,relation,threshold,status\n";
  for (const auto& c : cs)
    s += c.name + ',' + format_double(c.value) + ',' + c.relation + ',' + format_double(c.threshold) + ',' +
         (c.pass() ? "pass" : "fail") + '\n';
  return s;
}

/// Label vector for the ELL-4 graph: 0…N−1 plus three cosine auxiliaries,
/// default decreasing eigenvalues.
inline TrainingGraph ell4_graph(Index n) { return build_ell_graph(label_with_auxiliaries(index_labels(n), 4, Vector::Ones(n))); }

inline std::vector<Check> reproduce_fig6(const fs::path& dir) {
  const Index n = 30;
  struct Item {
    std::string name;
    TrainingGraph g;
    Index expected;
  };
  std::vector<Item> items;
  items.push_back({"reordering", build_linear_graph(n, LinearVariant::self_loop_extended), 14});
  items.push_back({"serial", build_serial_graph(index_labels(n), 15).graph, 6});
  items.push_back({"ell4", ell4_graph(n), 4});
  std::vector<Check> checks;
  for (const auto& it : items) {
    const auto sum = write_spectrum(dir, it.name + "_", it.g, 5);
    checks.push_back({it.name + "_delta_below_2", static_cast<double>(sum.below_two), "==",
                      static_cast<double>(it.expected)});
  }
  return checks;
}

struct RoundTripResult {
  Index n = 0, labels = 0;
  double response_error = 0, delta_error = 0, min_gamma = 0, r_change = 0, elim_response_error = 0,
         delta_map_error = 0;
};

/// Random normalized, decorrelated label set: N in [8, 64], L in [1, 5],
/// vertex weights in [0.5, 1.5], distinct eigenvalues in (0.05, 0.9).
inline LabelSet random_label_set(CounterRng& rng) {
  const Index n = 8 + static_cast<Index>(rng.below(57));
  const Index l = 1 + static_cast<Index>(rng.below(5));
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = rng.uniform(0.5, 1.5);
  Matrix raw(l, n);
  for (Index j = 0; j < l; ++j)
    for (Index i = 0; i < n; ++i) raw(j, i) = rng.normal();
  LabelSet ls = decorrelate_labels(normalize_labels(raw, v));
  std::vector<double> lam;
  for (Index j = 0; j < l; ++j) lam.push_back(rng.uniform(0.05, 0.9));
  std::sort(lam.rbegin(), lam.rend());
  for (std::size_t j = 1; j < lam.size(); ++j) lam[j] = std::min(lam[j], lam[j - 1] - 0.01);
  ls.eigenvalues = Eigen::Map<Vector>(lam.data(), l);
  return ls;
}

/// Largest |y − s·ℓ| over responses/labels, with s = ±1 per label.
inline double signed_match_error(const Matrix& responses, const Matrix& labels) {
  double worst = 0.0;
  for (Index j = 0; j < labels.rows(); ++j) {
    const Vector y = responses.col(j);
    const Vector l = labels.row(j).transpose();
    worst = std::max(worst, std::min((y - l).cwiseAbs().maxCoeff(), (y + l).cwiseAbs().maxCoeff()));
  }
  return worst;
}

inline RoundTripResult ell_round_trip(const LabelSet& ls) {
  RoundTripResult r;
  r.n = ls.samples();
  r.labels = ls.count();
  const TrainingGraph g = build_ell_graph(ls);
  const auto s = optimal_free_responses(g);
  r.response_error = signed_match_error(s.feasible_responses(r.labels), ls.labels);
  const Vector fd = s.feasible_deltas();
  for (Index j = 0; j < r.labels; ++j)
    r.delta_error = std::max(r.delta_error, std::abs(fd[j] - delta_from_eigenvalue(ls.eigenvalues[j], g.q_sum(), g.r_sum())));

  const double c = negative_weight_offset(g);
  const TrainingGraph e = eliminate_negative_weights(g);
  r.min_gamma = e.min_weight();
  r.r_change = std::abs(e.r_sum() - g.r_sum()) / g.r_sum();
  const auto se = optimal_free_responses(e);
  r.elim_response_error = signed_match_error(se.feasible_responses(r.labels), ls.labels);
  const Vector ed = se.feasible_deltas();
  for (Index j = 0; j < fd.size(); ++j)
    r.delta_map_error = std::max(r.delta_map_error, std::abs(ed[j] - eliminated_delta(fd[j], c, g.q_sum(), g.r_sum())));
  return r;
}

inline std::vector<Check> reproduce_ell_roundtrip(const fs::path& dir, std::uint64_t seed) {
  CounterRng rng(CounterRng::derive(seed, "ell-roundtrip"));
  std::string csv =
      "set,n,labels,response_error,delta_error,min_gamma_after,r_rel_change,response_error_after,delta_map_error\n";
  RoundTripResult worst;
  worst.min_gamma = 0.0;
  for (int k = 0; k < 20; ++k) {
    const auto r = ell_round_trip(random_label_set(rng));
    csv += std::to_string(k) + ',' + std::to_string(r.n) + ',' + std::to_string(r.labels) + ',' +
           format_double(r.response_error) + ',' + format_double(r.delta_error) + ',' + format_double(r.min_gamma) +
           ',' + format_double(r.r_change) + ',' + format_double(r.elim_response_error) + ',' +
           format_double(r.delta_map_error) + '\n';
    worst.response_error = std::max(worst.response_error, std::max(r.response_error, r.elim_response_error));
    worst.delta_error = std::max(worst.delta_error, r.delta_error);
    worst.min_gamma = std::min(worst.min_gamma, r.min_gamma);
    worst.r_change = std::max(worst.r_change, r.r_change);
    worst.delta_map_error = std::max(worst.delta_map_error, r.delta_map_error);
  }
  io::write_text(dir / "roundtrip.csv", csv);
  return {{"max_response_error", worst.response_error, "<=", 1e-8},
          {"max_delta_error", worst.delta_error, "<=", 1e-10},
          {"min_gamma_after_elimination", worst.min_gamma, ">=", -1e-12},
          {"max_relative_r_change", worst.r_change, "<=", 1e-9},
          {"max_delta_map_error", worst.delta_map_error, "<=", 1e-9}};
}

/// Minimum canonical correlation between the C−1 slowest one-hot GSFA
/// features of the compact+(C−1) ELL graph and of the clustered graph.
inline double compact_clustered_min_correlation(const std::vector<Index>& class_ids, Index classes) {
  const Index n = static_cast<Index>(class_ids.size());
  const auto code = compact_binary_labels(static_cast<int>(classes), static_cast<int>(classes - 1));
  const TrainingGraph ell = build_ell_graph(expand_compact_labels(code, class_ids));
  const TrainingGraph clustered = build_clustered_graph_from_ids(class_ids);
  const Matrix x = one_hot_features(n);
  const Matrix ya = extract_features(train_gsfa(x, ell, classes - 1), x);
  const Matrix yb = extract_features(train_gsfa(x, clustered, classes - 1), x);
  return canonical_correlations(ya.transpose(), yb.transpose()).minCoeff();
}

/// Class-major ids from the synthetic classification layout, shuffled with
/// a seeded Fisher–Yates pass.
inline std::vector<Index> shuffled_class_ids(Index classes, Index per_class, std::uint64_t seed) {
  ClassificationSpec spec;
  spec.classes = classes;
  spec.per_class = per_class;
  spec.dims = 1;
  spec.seed = seed;
  auto ids = gen_classification(spec).class_ids;
  CounterRng rng(CounterRng::derive(seed, "shuffle"));
  for (std::size_t i = ids.size(); i > 1; --i) std::swap(ids[i - 1], ids[rng.below(i)]);
  return ids;
}

inline std::vector<Check> reproduce_compact_vs_clustered(const fs::path& dir, std::uint64_t seed) {
  std::vector<Check> checks;
  std::string csv = "classes,per_class,max_abs_difference,max_inter_class\n";
  for (int c : {2, 4, 8}) {
    const auto rep = clustered_equivalence_check(c, 4);
    csv += std::to_string(c) + ",4," + format_double(rep.max_abs_difference) + ',' +
           format_double(rep.max_inter_class) + '\n';
    checks.push_back({"C" + std::to_string(c) + "_max_abs_difference", rep.max_abs_difference, "<=", 1e-10});
    checks.push_back({"C" + std::to_string(c) + "_max_inter_class", rep.max_inter_class, "<=", 1e-12});
  }
  io::write_text(dir / "equivalence.csv", csv);
  const double rho = compact_clustered_min_correlation(shuffled_class_ids(8, 8, seed), 8);
  checks.push_back({"C8_min_canonical_correlation", rho, ">=", 1.0 - 1e-8});
  return checks;
}

struct ReproduceConfig {
  std::string name;
  std::uint64_t seed = 1;
  std::string out;

  Json to_json() const { return {{"command", "reproduce"}, {"name", name}, {"seed", seed}}; }
};

inline const std::vector<std::string>& reproduce_names() {
  static const std::vector<std::string> names{"fig6-spectra", "ell-roundtrip", "compact-vs-clustered"};
  return names;
}

inline int cmd_reproduce(const ReproduceConfig& c, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  return guarded_run(err, [&] {
    const auto& names = reproduce_names();
    if (std::find(names.begin(), names.end(), c.name) == names.end())
      usage("unknown pipeline '" + c.name + "' (expected fig6-spectra, ell-roundtrip or compact-vs-clustered)");
    RunLog log(out);
    const fs::path dir = run_dir(c.out, "reproduce-" + c.name);
    std::vector<Check> checks;
    if (c.name == "fig6-spectra") checks = reproduce_fig6(dir);
    else if (c.name == "ell-roundtrip") checks = reproduce_ell_roundtrip(dir, c.seed);
    else checks = reproduce_compact_vs_clustered(dir, c.seed);
    io::write_text(dir / "summary.csv", checks_csv(checks));
    bool ok = true;
    for (const auto& ch : checks) {
      log.line(std::string(ch.pass() ? "pass " : "FAIL ") + ch.name + " = " + format_double(ch.value) + " (" +
               ch.relation + " " + format_double(ch.threshold) + ")");
      ok = ok && ch.pass();
    }
    finish_run(dir, c.to_json(), log);
    return ok ? kExitOk : kExitFailure;
  });
}

}  // namespace gsfa::exp
