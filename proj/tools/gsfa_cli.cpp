// Command-line front end: gsfa <command> [flags]. Exit codes: 0 success,
// 1 numerical or contract failure, 2 usage.

#include <iostream>

#include "CLI11.hpp"

#include "gsfa/experiments.hpp"

namespace {

using namespace gsfa;
using namespace gsfa::exp;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graph-based slow feature analysis with label-encoded training graphs"};
  app.require_subcommand(1);

  BuildGraphConfig bg;
  auto* build = app.add_subcommand("build-graph", "build a training graph and report its consistency");
  build->add_option("--kind", bg.kind, "reordering | clustered | serial | ell | compact")->required();
  build->add_option("--n", bg.n, "number of samples (reordering, serial, ell without a label file)");
  build->add_option("--k", bg.k, "number of serial groups");
  build->add_option("--variant", bg.variant, "reordering variant: self_loop_extended | endpoint_halved");
  build->add_option("--class-sizes", bg.class_sizes, "clustered class sizes")->delimiter(',');
  build->add_option("--labels-csv", bg.labels_csv, "raw label column (serial, ell)");
  build->add_option("--labels", bg.labels_file, "label-set file (ell)");
  build->add_option("--total-labels", bg.total_labels, "label plus auxiliaries (ell from raw labels)");
  build->add_option("--classes", bg.classes, "class count (compact)");
  build->add_option("--per-class", bg.per_class, "samples per class (compact)");
  build->add_option("--count", bg.count, "compact label count L");
  build->add_flag("--truncate", bg.truncate, "drop remainder samples instead of failing (serial)");
  build->add_flag("--nonnegative", bg.nonnegative, "eliminate negative edge weights (ell, compact)");
  build->add_option("--edge-sum", bg.edge_sum, "edge-weight sum R (ell, compact)");
  build->add_option("--out", bg.out, "output directory");

  SpectrumConfig sp;
  auto* spectrum = app.add_subcommand("spectrum", "optimal free responses of a graph");
  spectrum->add_option("--graph", sp.graph, "graph file")->required();
  spectrum->add_option("--responses", sp.responses, "number of responses to export");
  spectrum->add_option("--out", sp.out, "output directory");

  GenDataConfig gd;
  std::string latent = "polynomial", nonlin = "none";
  auto* gen = app.add_subcommand("gen-data", "generate a synthetic dataset");
  gen->add_option("--kind", gd.kind, "regression | classification");
  gen->add_option("--format", gd.format, "csv | bin");
  gen->add_option("--values", gd.regression.values, "distinct label values");
  gen->add_option("--per-value", gd.regression.per_value, "samples per label value");
  gen->add_option("--label-min", gd.regression.label_min);
  gen->add_option("--label-step", gd.regression.label_step);
  gen->add_option("--latent", latent, "linear | polynomial");
  gen->add_option("--latent-dims", gd.regression.latent_dims);
  gen->add_option("--nonlinearity", nonlin, "none | tanh");
  gen->add_option("--classes", gd.classification.classes);
  gen->add_option("--per-class", gd.classification.per_class);
  gen->add_option("--spread", gd.classification.spread);
  std::optional<Index> dims;
  std::optional<double> noise;
  std::uint64_t seed = 1;
  gen->add_option("--dims", dims, "input dimensionality I");
  gen->add_option("--noise", noise);
  gen->add_option("--seed", seed);
  gen->add_option("--out", gd.out, "output directory");

  MakeLabelsConfig ml;
  auto* labels = app.add_subcommand("make-labels", "build a normalized label-set file");
  labels->add_option("--labels-csv", ml.labels_csv, "raw label column");
  labels->add_option("--total-labels", ml.total_labels, "label plus cosine auxiliaries");
  labels->add_option("--classes-csv", ml.classes_csv, "class id column (compact binary labels)");
  labels->add_option("--count", ml.compact_count, "compact label count (default C−1)");
  labels->add_option("--out", ml.out, "output directory");

  TrainConfig tr;
  auto* train = app.add_subcommand("train", "train a GSFA model or hierarchical network");
  train->add_option("--data", tr.data, "data file (.csv or binary)")->required();
  train->add_option("--graph", tr.graph, "graph file")->required();
  train->add_option("--out-dims", tr.out_dims, "number of output features");
  train->add_option("--expansion", tr.expansion, "identity | 0.8expo | quadratic | polyD");
  train->add_option("--pca", tr.pca_dims, "PCA dimensions before expansion");
  train->add_option("--architecture", tr.architecture, "network architecture file");
  train->add_option("--out", tr.out, "output directory");

  EvaluateConfig ev;
  auto* eval = app.add_subcommand("evaluate", "sweep feature counts over label estimators");
  eval->add_option("--train-data", ev.train_data)->required();
  eval->add_option("--train-labels", ev.train_labels)->required();
  eval->add_option("--test-data", ev.test_data)->required();
  eval->add_option("--test-labels", ev.test_labels)->required();
  eval->add_option("--graph", ev.graph, "graph built on the training split")->required();
  eval->add_option("--expansion", ev.expansion);
  eval->add_option("--d-min", ev.d_min);
  eval->add_option("--d-max", ev.d_max);
  eval->add_option("--estimators", ev.estimators)->delimiter(',');
  eval->add_option("--soft-gc-classes", ev.soft_gc_classes);
  eval->add_option("--out", ev.out, "output directory");

  ReproduceConfig rp;
  auto* repro = app.add_subcommand("reproduce", "run a named pipeline and check it");
  repro->add_option("name", rp.name, "fig6-spectra | ell-roundtrip | compact-vs-clustered")->required();
  repro->add_option("--seed", rp.seed);
  repro->add_option("--out", rp.out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (*build) return cmd_build_graph(bg);
  if (*spectrum) return cmd_spectrum(sp);
  if (*gen) {
    if (latent == "linear") gd.regression.latent = LatentMap::linear;
    else if (latent != "polynomial") return std::cerr << "usage error: unknown latent map '" << latent << "'\n", kExitUsage;
    if (nonlin == "tanh") gd.regression.nonlinearity = Nonlinearity::tanh;
    else if (nonlin != "none") return std::cerr << "usage error: unknown nonlinearity '" << nonlin << "'\n", kExitUsage;
    if (dims) gd.regression.dims = gd.classification.dims = *dims;
    if (noise) gd.regression.noise = gd.classification.noise = *noise;
    gd.regression.seed = gd.classification.seed = seed;
    return cmd_gen_data(gd);
  }
  if (*labels) return cmd_make_labels(ml);
  if (*train) return cmd_train(tr);
  if (*eval) return cmd_evaluate(ev);
  if (*repro) return cmd_reproduce(rp);
  return kExitUsage;
}
