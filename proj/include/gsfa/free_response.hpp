#pragma once

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <optional>
#include <utility>
#include <vector>

#include "gsfa/graph.hpp"

namespace gsfa {

/// M = Diag(v^{-½})·Γ·Diag(v^{-½})
inline Matrix build_m_matrix(const TrainingGraph& g) {
  const Vector& v = g.vertex_weights();
  for (Index i = 0; i < v.size(); ++i)
    require(v[i] > 0.0, ErrorKind::contract, "vertex weights must be strictly positive");
  const Vector s = v.array().rsqrt().matrix();
  Matrix m = s.asDiagonal() * g.to_dense() * s.asDiagonal();
  return symmetrize(m);
}

/// Optimal free responses of a graph, ordered by descending eigenvalue of M
/// (ascending Δ). Column j of `responses` is y_j = Q^{½}·Diag(v^{-½})·u_j.
struct FreeResponseSpectrum {
  Vector eigenvalues;
  Vector deltas;
  Matrix responses;
  std::vector<bool> feasible;
  /// Half-open index ranges [first, last) of tied eigenvalues (size ≥ 2).
  std::vector<std::pair<Index, Index>> degenerate_blocks;
  Index pseudo_response = -1;
  double q = 0.0;
  double r = 0.0;

  Index size() const { return eigenvalues.size(); }

  std::vector<Index> feasible_indices() const {
    std::vector<Index> out;
    for (Index j = 0; j < size(); ++j)
      if (feasible[static_cast<std::size_t>(j)]) out.push_back(j);
    return out;
  }

  /// The first `count` feasible responses as columns (N×count).
  Matrix feasible_responses(Index count) const {
    const auto idx = feasible_indices();
    require(count <= static_cast<Index>(idx.size()), ErrorKind::parameter, "not enough feasible responses");
    Matrix out(responses.rows(), count);
    for (Index k = 0; k < count; ++k) out.col(k) = responses.col(idx[static_cast<std::size_t>(k)]);
    return out;
  }

  Vector feasible_deltas() const {
    const auto idx = feasible_indices();
    Vector out(static_cast<Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) out[static_cast<Index>(k)] = deltas[idx[k]];
    return out;
  }

  /// Number of feasible responses with Δ < threshold − tol. The margin keeps
  /// responses whose Δ is exactly the threshold from being counted by round-off.
  Index count_below(double threshold = 2.0, double tol = 1e-9) const {
    Index c = 0;
    for (Index j = 0; j < size(); ++j)
      if (feasible[static_cast<std::size_t>(j)] && deltas[j] < threshold - tol) ++c;
    return c;
  }
};

struct FreeResponseOptions {
  std::optional<double> consistency_tolerance;
  Index max_size = 4096;
  /// Sample whose value is made negative in every response (default 0).
  Index sign_reference = 0;
  double tie_tolerance = 1e-9;
};

namespace detail {
/// Makes y(ref) negative; falls back to the first clearly nonzero entry.
inline void apply_sign_rule(Eigen::Ref<Vector> y, Index ref) {
  const double scale = y.cwiseAbs().maxCoeff();
  if (scale == 0.0) return;
  Index k = ref;
  if (k < 0 || k >= y.size() || std::abs(y[k]) <= 1e-10 * scale) {
    k = 0;
    while (k < y.size() && std::abs(y[k]) <= 1e-10 * scale) ++k;
  }
  if (y[k] > 0.0) y = -y;
}
}  // namespace detail

inline FreeResponseSpectrum optimal_free_responses(const TrainingGraph& g, const FreeResponseOptions& opts = {}) {
  const Index n = g.size();
  require(n <= opts.max_size, ErrorKind::parameter,
          "dense spectrum limited to N ≤ " + std::to_string(opts.max_size) + " (got " + std::to_string(n) + ")");
  const auto cons = check_consistency(g, opts.consistency_tolerance.value_or(default_consistency_tolerance(g)));
  require(cons.consistent, ErrorKind::contract,
          "free responses require a consistent graph (max residual " + std::to_string(cons.max_abs_residual) + ")");

  const Vector& v = g.vertex_weights();
  const double q = g.q_sum();
  const double r = g.r_sum();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(build_m_matrix(g));
  require(eig.info() == Eigen::Success, ErrorKind::singular, "eigendecomposition of M failed");

  FreeResponseSpectrum s;
  s.q = q;
  s.r = r;
  s.eigenvalues = eig.eigenvalues().reverse();
  Matrix u = eig.eigenvectors().rowwise().reverse();

  const double scale = std::max(1.0, s.eigenvalues.cwiseAbs().maxCoeff());
  for (Index a = 0; a < n;) {
    Index b = a + 1;
    while (b < n && s.eigenvalues[b - 1] - s.eigenvalues[b] <= opts.tie_tolerance * scale) ++b;
    if (b - a >= 2) s.degenerate_blocks.emplace_back(a, b);
    a = b;
  }

  // Locate u₀ ∝ v^½. If it sits in a tied block, rotate that block so u₀ is
  // its first member and the others are orthogonal to it.
  const Vector u0 = v.array().sqrt().matrix() / std::sqrt(q);
  std::vector<std::pair<Index, Index>> blocks;
  for (Index a = 0, k = 0; a < n;) {
    if (k < static_cast<Index>(s.degenerate_blocks.size()) && s.degenerate_blocks[static_cast<std::size_t>(k)].first == a) {
      blocks.push_back(s.degenerate_blocks[static_cast<std::size_t>(k)]);
      a = s.degenerate_blocks[static_cast<std::size_t>(k++)].second;
    } else {
      blocks.emplace_back(a, a + 1);
      ++a;
    }
  }
  double best = -1.0;
  std::pair<Index, Index> best_block{0, 1};
  for (const auto& [a, b] : blocks) {
    const double proj = (u.middleCols(a, b - a).transpose() * u0).squaredNorm();
    if (proj > best) {
      best = proj;
      best_block = {a, b};
    }
  }
  const auto [a0, b0] = best_block;
  if (best > 1.0 - 1e-6) {
    if (b0 - a0 > 1) {
      const Vector coords = u.middleCols(a0, b0 - a0).transpose() * u0;
      Eigen::HouseholderQR<Matrix> qr{Matrix(coords)};
      const Matrix basis = qr.householderQ();
      Matrix rotated = u.middleCols(a0, b0 - a0) * basis;
      u.middleCols(a0, b0 - a0) = rotated;
    }
    s.pseudo_response = a0;
  } else {
    warn("no eigenvector of M matches v^½ closely (best cos² = " + std::to_string(best) + ")");
    s.pseudo_response = a0;
  }

  s.responses = std::sqrt(q) * v.array().rsqrt().matrix().asDiagonal() * u;
  s.feasible.assign(static_cast<std::size_t>(n), true);
  s.feasible[static_cast<std::size_t>(s.pseudo_response)] = false;
  s.responses.col(s.pseudo_response) = Vector::Ones(n);
  for (Index j = 0; j < n; ++j)
    if (j != s.pseudo_response) detail::apply_sign_rule(s.responses.col(j), opts.sign_reference);
  s.deltas = (2.0 - 2.0 * q / r * s.eigenvalues.array()).matrix();
  return s;
}

/// Expected Δ of an i.i.d. zero-mean unit-variance noise feature:
/// 2(R − Σ_n γ_nn)/R, i.e. exactly 2 for graphs without self-loops.
inline double expected_noise_delta(const TrainingGraph& g) {
  require(g.r_sum() != 0.0, ErrorKind::degenerate, "R = 0");
  return 2.0 * (g.r_sum() - g.diagonal().sum()) / g.r_sum();
}

/// Canonical correlations between the column spaces of a and b (both N×k,
/// assumed centred), descending.
inline Vector canonical_correlations(const Matrix& a, const Matrix& b) {
  require(a.rows() == b.rows(), ErrorKind::dimension, "canonical correlations need equal sample counts");
  const Index k = std::min(a.cols(), b.cols());
  const Matrix qa = Eigen::HouseholderQR<Matrix>(a).householderQ() * Matrix::Identity(a.rows(), a.cols());
  const Matrix qb = Eigen::HouseholderQR<Matrix>(b).householderQ() * Matrix::Identity(b.rows(), b.cols());
  Eigen::JacobiSVD<Matrix> svd(qa.transpose() * qb);
  return svd.singularValues().head(k);
}

}  // namespace gsfa
