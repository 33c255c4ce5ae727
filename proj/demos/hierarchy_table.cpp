// Layer table of the 64×64 face network, then a small two-layer network
// trained on 4×4 toy images whose content drifts with the label.

#include <cmath>
#include <cstdio>
#include <iostream>

#include "gsfa/gsfa.hpp"

using namespace gsfa;

int main() {
  std::cout << validate_architecture(table1_architecture(), {64, 64}).table() << '\n';

  CounterRng rng(3);
  const Vector labels = Vector::LinSpaced(80, 0.0, 3.0);
  Matrix img(16, labels.size());
  for (Index n = 0; n < labels.size(); ++n)
    for (Index p = 0; p < 16; ++p) img(p, n) = std::sin(labels[n] + 0.3 * static_cast<double>(p)) + 0.2 * rng.normal();

  std::vector<LayerSpec> specs;
  specs.push_back({{2, 2}, {}, Shape2{2, 2}, ExpansionSpec::identity(), {}, 3});
  specs.push_back({{2, 2}, {}, Shape2{1, 1}, ExpansionSpec::zero_eight_expo(), {}, 2});
  const auto g = build_serial_graph(labels, 8).graph;
  const auto net = train_hgsfa(img, g, specs, {4, 4});
  const Matrix y = network_extract(net, img);
  for (Index j = 0; j < y.rows(); ++j) std::printf("output %ld: Δ = %.4f\n", static_cast<long>(j), weighted_delta(g, y.row(j).transpose()));
}
