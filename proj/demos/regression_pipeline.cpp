// Synthetic regression: serial vs ELL graph, quadratic expansion, three label
// estimators on the slowest 3 features. Even samples train, odd samples test.

#include <cstdio>

#include "gsfa/gsfa.hpp"

using namespace gsfa;

int main() {
  RegressionSpec spec;
  spec.nonlinearity = Nonlinearity::tanh;
  spec.noise = 0.1;
  const auto data = gen_regression(spec);
  const Index half = data.x.cols() / 2;
  Matrix xtr(data.x.rows(), half), xte(data.x.rows(), half);
  Vector ltr(half), lte(half);
  for (Index n = 0; n < half; ++n) {
    xtr.col(n) = data.x.col(2 * n);
    ltr[n] = data.labels[2 * n];
    xte.col(n) = data.x.col(2 * n + 1);
    lte[n] = data.labels[2 * n + 1];
  }

  const std::pair<const char*, TrainingGraph> graphs[] = {
      {"serial", build_serial_graph(ltr, 30).graph},
      {"ell", build_ell_graph(label_with_auxiliaries(ltr, 3, Vector::Ones(half)))},
  };
  std::printf("chance rmse (test) %.3f\n", chance_rmse(lte));
  for (const auto& [name, g] : graphs) {
    const auto node = train_node(xtr, g, std::nullopt, ExpansionSpec::quadratic(), 3);
    const Matrix ytr = node_extract(node, xtr), yte = node_extract(node, xte);
    const LabelEstimator ests[] = {fit_linear_scaling(ytr.row(0).transpose(), ltr), fit_linear_regression(ytr, ltr),
                                   fit_soft_gc(ytr, ltr, default_soft_gc_classes(ltr))};
    for (const auto& e : ests)
      std::printf("%-7s %-18s train %.3f  test %.3f\n", name, to_string(e.kind),
                  rmse(predict(e, ytr.topRows(e.features_used())), ltr),
                  rmse(predict(e, yte.topRows(e.features_used())), lte));
  }
}
