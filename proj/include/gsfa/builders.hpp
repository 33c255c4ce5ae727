#pragma once

#include <algorithm>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "gsfa/graph.hpp"
#include "gsfa/labels.hpp"

namespace gsfa {

enum class LinearVariant {
  endpoint_halved_vertex_weights,  // v = (1, 2, …, 2, 1)
  self_loop_extended,              // v = 1, γ(0,0) = γ(N−1,N−1) = 1
};

/// Sample-reordering (linear) graph: consecutive samples joined with weight 1.
inline TrainingGraph build_linear_graph(Index n, LinearVariant variant) {
  require(n >= 2, ErrorKind::parameter, "linear graph needs N ≥ 2");
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(2 * n + 2));
  for (Index i = 0; i + 1 < n; ++i) {
    t.emplace_back(i, i + 1, 1.0);
    t.emplace_back(i + 1, i, 1.0);
  }
  Vector v = Vector::Ones(n);
  if (variant == LinearVariant::self_loop_extended) {
    t.emplace_back(0, 0, 1.0);
    t.emplace_back(n - 1, n - 1, 1.0);
  } else {
    v.segment(1, n - 2).setConstant(2.0);
  }
  SparseMatrix gamma(n, n);
  gamma.setFromTriplets(t.begin(), t.end());
  return TrainingGraph(std::move(v), std::move(gamma));
}

/// Clustered graph over samples laid out class by class: fully connected
/// within each class with γ = 1/(N_c − 1), no edges across classes.
inline TrainingGraph build_clustered_graph(const std::vector<Index>& class_sizes) {
  require(!class_sizes.empty(), ErrorKind::parameter, "clustered graph needs at least one class");
  std::vector<Index> ids;
  for (std::size_t c = 0; c < class_sizes.size(); ++c) {
    require(class_sizes[c] >= 2, ErrorKind::parameter,
            "class " + std::to_string(c) + " has fewer than 2 samples (γ = 1/(N_c−1) undefined)");
    ids.insert(ids.end(), static_cast<std::size_t>(class_sizes[c]), static_cast<Index>(c));
  }
  const Index n = static_cast<Index>(ids.size());

  GroupStructure st;
  st.kind = GraphKind::clustered;
  st.groups.resize(class_sizes.size());
  for (Index i = 0; i < n; ++i) st.groups[static_cast<std::size_t>(ids[static_cast<std::size_t>(i)])].push_back(i);

  std::vector<Triplet> t;
  for (const auto& grp : st.groups) {
    const double w = 1.0 / static_cast<double>(grp.size() - 1);
    st.weights.push_back(w);
    for (Index a : grp)
      for (Index b : grp)
        if (a != b) t.emplace_back(a, b, w);
  }
  SparseMatrix gamma(n, n);
  gamma.setFromTriplets(t.begin(), t.end());
  return TrainingGraph(Vector::Ones(n), std::move(gamma), std::move(st));
}

/// Clustered graph for arbitrary (not necessarily contiguous) class ids.
inline TrainingGraph build_clustered_graph_from_ids(const std::vector<Index>& class_ids) {
  require(!class_ids.empty(), ErrorKind::parameter, "clustered graph needs samples");
  const Index classes = *std::max_element(class_ids.begin(), class_ids.end()) + 1;
  GroupStructure st;
  st.kind = GraphKind::clustered;
  st.groups.resize(static_cast<std::size_t>(classes));
  for (std::size_t i = 0; i < class_ids.size(); ++i) {
    require(class_ids[i] >= 0, ErrorKind::parameter, "negative class id");
    st.groups[static_cast<std::size_t>(class_ids[i])].push_back(static_cast<Index>(i));
  }
  std::vector<Triplet> t;
  for (std::size_t c = 0; c < st.groups.size(); ++c) {
    const auto& grp = st.groups[c];
    require(grp.size() >= 2, ErrorKind::parameter, "class " + std::to_string(c) + " has fewer than 2 samples");
    const double w = 1.0 / static_cast<double>(grp.size() - 1);
    st.weights.push_back(w);
    for (Index a : grp)
      for (Index b : grp)
        if (a != b) t.emplace_back(a, b, w);
  }
  const Index n = static_cast<Index>(class_ids.size());
  SparseMatrix gamma(n, n);
  gamma.setFromTriplets(t.begin(), t.end());
  return TrainingGraph(Vector::Ones(n), std::move(gamma), std::move(st));
}

enum class RemainderPolicy { strict, truncate };

struct SerialGraph {
  TrainingGraph graph;
  /// Original indices of the samples kept, in graph-vertex order.
  std::vector<Index> samples;
};

/// Serial graph: samples sorted by (label, index) and split into K equal
/// groups; every pair across consecutive groups gets weight 1; extreme
/// groups have vertex weight 1, interior groups 2.
inline SerialGraph build_serial_graph(const Vector& labels, Index groups,
                                      RemainderPolicy policy = RemainderPolicy::strict) {
  const Index n_all = labels.size();
  require(groups >= 2 && groups <= n_all, ErrorKind::parameter, "serial graph needs 2 ≤ K ≤ N");
  std::vector<Index> order(static_cast<std::size_t>(n_all));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return labels[a] < labels[b]; });

  const Index rem = n_all % groups;
  if (rem != 0) {
    require(policy == RemainderPolicy::truncate, ErrorKind::parameter,
            "N = " + std::to_string(n_all) + " is not divisible by K = " + std::to_string(groups));
    warn("serial graph: dropping " + std::to_string(rem) + " largest-label samples so that K divides N");
    order.resize(static_cast<std::size_t>(n_all - rem));
  }

  std::vector<Index> kept = order;
  std::sort(kept.begin(), kept.end());
  std::vector<Index> vertex_of(static_cast<std::size_t>(n_all), -1);
  for (std::size_t k = 0; k < kept.size(); ++k) vertex_of[static_cast<std::size_t>(kept[k])] = static_cast<Index>(k);

  const Index n = static_cast<Index>(kept.size());
  const Index size = n / groups;
  GroupStructure st;
  st.kind = GraphKind::serial;
  st.groups.resize(static_cast<std::size_t>(groups));
  for (Index r = 0; r < n; ++r)
    st.groups[static_cast<std::size_t>(r / size)].push_back(vertex_of[static_cast<std::size_t>(order[static_cast<std::size_t>(r)])]);
  for (auto& grp : st.groups) std::sort(grp.begin(), grp.end());

  Vector v = Vector::Ones(n);
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(2 * (groups - 1) * size * size));
  for (Index k = 0; k + 1 < groups; ++k) {
    st.weights.push_back(1.0);
    for (Index a : st.groups[static_cast<std::size_t>(k)])
      for (Index b : st.groups[static_cast<std::size_t>(k + 1)]) {
        t.emplace_back(a, b, 1.0);
        t.emplace_back(b, a, 1.0);
      }
  }
  for (Index k = 1; k + 1 < groups; ++k)
    for (Index a : st.groups[static_cast<std::size_t>(k)]) v[a] = 2.0;

  SparseMatrix gamma(n, n);
  gamma.setFromTriplets(t.begin(), t.end());
  return {TrainingGraph(std::move(v), std::move(gamma), std::move(st)), std::move(kept)};
}

// ---------------------------------------------------------------------------
// Negative-weight elimination

/// c = max_{n,n'} (−γ(n,n') / (v_n v_n')); zero when Γ has no negative entry.
inline double negative_weight_offset(const TrainingGraph& g) {
  if (g.min_weight() >= 0.0) return 0.0;
  const Vector& v = g.vertex_weights();
  const Matrix gamma = g.to_dense();
  double c = 0.0;
  for (Index j = 0; j < gamma.cols(); ++j)
    for (Index i = 0; i < gamma.rows(); ++i) c = std::max(c, -gamma(i, j) / (v[i] * v[j]));
  return c;
}

/// Γ' = (Γ + c·vvᵀ)/(1 + cQ²/R): non-negative, same R, same free responses
/// and order; Δ' = (Δ + 2cQ²/R)/(1 + cQ²/R).
inline TrainingGraph eliminate_negative_weights(const TrainingGraph& g) {
  const double c = negative_weight_offset(g);
  if (c == 0.0) return g;
  const Vector& v = g.vertex_weights();
  const double q = g.q_sum();
  const double r = g.r_sum();
  Matrix gamma = (g.to_dense() + c * v * v.transpose()) / (1.0 + c * q * q / r);
  gamma = gamma.cwiseMax(0.0);  // the arg-max entry cancels to ±ulp
  return TrainingGraph(v, std::move(gamma));
}

/// Image of a Δ value under eliminate_negative_weights with offset c.
inline double eliminated_delta(double delta, double c, double q, double r) {
  const double a = c * q * q / r;
  return (delta + 2.0 * a) / (1.0 + a);
}

// ---------------------------------------------------------------------------
// Exact label learning

struct EllOptions {
  /// Total edge weight R of the result; λ₀ = R/Q. Defaults to Q (λ₀ = 1).
  std::optional<double> edge_sum;
  bool nonnegative = false;
  double contract_tolerance = 1e-9;
};

/// Γ = Diag(v^½)·(Σ_j λ_j u_j u_jᵀ)·Diag(v^½) with u_j = Q^{-½}Diag(v^½)ℓ_j for
/// the labels and u₀ = Q^{-½}v^½ with λ₀ = R/Q, which makes the graph consistent.
inline TrainingGraph build_ell_graph(const LabelSet& ls, const EllOptions& opts = {}) {
  const Index n = ls.samples();
  const Index L = ls.count();
  const Vector& v = ls.vertex_weights;
  require(v.size() == n, ErrorKind::dimension, "label set vertex weights do not match sample count");
  require(ls.eigenvalues.size() == L, ErrorKind::dimension, "one eigenvalue per label is required");
  require(L >= 1, ErrorKind::parameter, "ELL graph needs at least one label");
  require(L <= n - 1, ErrorKind::parameter,
          "at most N−1 labels fit (L = " + std::to_string(L) + ", N = " + std::to_string(n) + ")");
  const auto chk = check_label_set(ls);
  require(chk.max_mean <= opts.contract_tolerance && chk.max_variance_error <= opts.contract_tolerance,
          ErrorKind::contract, "ELL labels must have weighted zero mean and unit variance");
  require(chk.max_cross <= opts.contract_tolerance, ErrorKind::contract, "ELL labels must be weighted-decorrelated");
  require(ls.eigenvalues.sum() > 0.0, ErrorKind::parameter, "sum of label eigenvalues must be positive");
  for (Index j = 0; j < L; ++j)
    if (ls.eigenvalues[j] < 0.0) warn("ELL label " + std::to_string(j) + " has a negative eigenvalue (Δ > 2)");

  const double q = v.sum();
  const double r = opts.edge_sum.value_or(q);
  require(r > 0.0, ErrorKind::parameter, "ELL edge sum R must be positive");

  // D^½ u_j = Q^{-½} (v ∘ ℓ_j), so Γ = (1/Q) Σ λ_j (v∘ℓ_j)(v∘ℓ_j)ᵀ + (R/Q²) v vᵀ
  Matrix weighted = ls.labels * v.asDiagonal();  // L×N
  Matrix gamma = weighted.transpose() * ls.eigenvalues.asDiagonal() * weighted / q;
  gamma.noalias() += (r / (q * q)) * v * v.transpose();
  gamma = symmetrize(gamma);

  TrainingGraph g(v, std::move(gamma));
  if (opts.nonnegative) return eliminate_negative_weights(g);
  return g;
}

// ---------------------------------------------------------------------------
// Clustered graph vs compact+(C−1) ELL graph

struct EquivalenceReport {
  double max_abs_difference = 0.0;  // after removing loops and equalising R
  double max_inter_class = 0.0;     // largest |γ| between different classes (ELL graph)
  bool equivalent = false;
};

/// Builds the compact+(C−1) ELL graph (λ₀ set equal to the mean label
/// eigenvalue) and the clustered graph on `per_class` samples per class and
/// compares them. Pass `eigenvalues` to override the equal 1/(C−1) schedule.
inline EquivalenceReport clustered_equivalence_check(int classes, Index per_class,
                                                     std::optional<Vector> eigenvalues = std::nullopt) {
  require(per_class >= 2, ErrorKind::parameter, "need at least 2 samples per class");
  CompactCode code = compact_binary_labels(classes, classes - 1);
  std::vector<Index> ids;
  for (int c = 0; c < classes; ++c) ids.insert(ids.end(), static_cast<std::size_t>(per_class), c);
  LabelSet ls = expand_compact_labels(code, ids);
  ls.eigenvalues = eigenvalues.value_or(Vector::Constant(classes - 1, 1.0 / (classes - 1)));
  require(ls.eigenvalues.size() == classes - 1, ErrorKind::dimension, "need C−1 eigenvalues");

  EllOptions opts;
  opts.edge_sum = ls.vertex_weights.sum() * ls.eigenvalues.mean();
  const TrainingGraph ell = remove_self_loops(build_ell_graph(ls, opts));
  const TrainingGraph clustered = build_clustered_graph(std::vector<Index>(static_cast<std::size_t>(classes), per_class));

  const Matrix a = ell.to_dense() * (clustered.r_sum() / ell.r_sum());
  const Matrix b = clustered.to_dense();
  EquivalenceReport rep;
  rep.max_abs_difference = (a - b).cwiseAbs().maxCoeff();
  const Matrix raw = ell.to_dense();
  for (Index i = 0; i < raw.rows(); ++i)
    for (Index j = 0; j < raw.cols(); ++j)
      if (ids[static_cast<std::size_t>(i)] != ids[static_cast<std::size_t>(j)])
        rep.max_inter_class = std::max(rep.max_inter_class, std::abs(raw(i, j)));
  rep.equivalent = rep.max_abs_difference <= 1e-10 && rep.max_inter_class <= 1e-12;
  return rep;
}

}  // namespace gsfa
