// Slowest free responses of three graphs on 30 samples: the reordering graph,
// a serial graph with 15 groups of two, and an ELL graph with 3 auxiliaries.

#include <cstdio>

#include "gsfa/gsfa.hpp"

using namespace gsfa;

int main() {
  const Index n = 30;
  const Vector labels = Vector::LinSpaced(n, 0.0, n - 1.0);
  const std::pair<const char*, TrainingGraph> graphs[] = {
      {"reordering", build_linear_graph(n, LinearVariant::self_loop_extended)},
      {"serial", build_serial_graph(labels, 15).graph},
      {"ell4", build_ell_graph(label_with_auxiliaries(labels, 4, Vector::Ones(n)))},
  };
  for (const auto& [name, g] : graphs) {
    const auto s = optimal_free_responses(g);
    const Vector d = s.feasible_deltas();
    std::printf("%-10s Δ<2: %2ld   first five Δ:", name, static_cast<long>(s.count_below()));
    for (Index j = 0; j < 5; ++j) std::printf(" %.4f", d[j]);
    std::printf("\n");
  }
}
