#pragma once

#include <vector>

#include "gsfa/graph.hpp"
#include "gsfa/random.hpp"

namespace gsfa {

/// Row-normalised transition matrix P with P(n, n') = γ(n, n') / Σ_n'' γ(n, n'').
/// Self-loops are kept as transitions back to the same sample.
inline Matrix markov_transition_matrix(const TrainingGraph& g) {
  require(g.min_weight() >= 0.0, ErrorKind::unsupported,
          "Markov interpretation requires non-negative edge weights");
  Matrix p = g.to_dense();
  for (Index n = 0; n < p.rows(); ++n) {
    const double row = p.row(n).sum();
    require(row > 0.0, ErrorKind::degenerate, "vertex " + std::to_string(n) + " has no outgoing edges");
    p.row(n) /= row;
  }
  return p;
}

/// Samples a walk of `length` vertices. The start vertex is drawn from v/Q,
/// which is the stationary distribution when the graph is consistent.
inline std::vector<Index> sample_markov_sequence(const TrainingGraph& g, Index length, std::uint64_t seed) {
  require(length >= 1, ErrorKind::parameter, "sequence length must be positive");
  const Matrix p = markov_transition_matrix(g);
  CounterRng rng(seed);

  auto draw = [&](const auto& probs) {
    const double u = rng.uniform();
    double acc = 0.0;
    const Index n = probs.size();
    for (Index k = 0; k < n; ++k) {
      acc += probs[k];
      if (u < acc) return k;
    }
    for (Index k = n - 1; k >= 0; --k)
      if (probs[k] > 0.0) return k;
    return n - 1;
  };

  std::vector<Index> seq;
  seq.reserve(static_cast<std::size_t>(length));
  const Vector start = g.vertex_weights() / g.q_sum();
  seq.push_back(draw(start));
  for (Index t = 1; t < length; ++t) {
    const Vector row = p.row(seq.back()).transpose();
    seq.push_back(draw(row));
  }
  return seq;
}

}  // namespace gsfa
