#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>
#include <optional>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "gsfa/error.hpp"

namespace gsfa {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

enum class GraphKind { generic, clustered, serial };

/// Group layout remembered by the clustered and serial builders. It enables
/// the O(N·I²) derivative-covariance path. `weights` holds the uniform edge
/// weight inside each cluster (clustered) or between group k and k+1 (serial).
struct GroupStructure {
  GraphKind kind = GraphKind::generic;
  std::vector<std::vector<Index>> groups;
  std::vector<double> weights;
};

/// A training graph: strictly positive vertex weights v and a symmetric
/// edge-weight matrix Γ, stored densely or sparsely. Immutable.
///
/// Sums over Γ always range over the full matrix, i.e. both orientations of
/// an undirected edge and the diagonal (self-loops) are counted.
class TrainingGraph {
 public:
  using EdgeStorage = std::variant<Matrix, SparseMatrix>;

  TrainingGraph(Vector vertex_weights, Matrix edge_weights, std::optional<GroupStructure> structure = std::nullopt)
      : v_(std::move(vertex_weights)), gamma_(std::move(edge_weights)), structure_(std::move(structure)) {
    validate();
  }

  TrainingGraph(Vector vertex_weights, SparseMatrix edge_weights,
                std::optional<GroupStructure> structure = std::nullopt)
      : v_(std::move(vertex_weights)), gamma_(std::move(edge_weights)), structure_(std::move(structure)) {
    std::get<SparseMatrix>(gamma_).makeCompressed();
    validate();
  }

  Index size() const { return v_.size(); }
  const Vector& vertex_weights() const { return v_; }
  double q_sum() const { return q_; }
  double r_sum() const { return r_; }
  bool is_dense() const { return std::holds_alternative<Matrix>(gamma_); }
  const EdgeStorage& edges() const { return gamma_; }
  const std::optional<GroupStructure>& structure() const { return structure_; }

  Matrix to_dense() const {
    if (is_dense()) return std::get<Matrix>(gamma_);
    return Matrix(std::get<SparseMatrix>(gamma_));
  }

  /// Γ·1
  Vector row_sums() const {
    return std::visit([](const auto& m) -> Vector { return m * Vector::Ones(m.cols()); }, gamma_);
  }

  /// yᵀΓy
  double quadratic_form(const Vector& y) const {
    require(y.size() == size(), ErrorKind::dimension, "quadratic form: vector length differs from N");
    return std::visit([&](const auto& m) -> double { return y.dot(m * y); }, gamma_);
  }

  /// X·Γ for an I×N data matrix.
  Matrix right_multiply(const Matrix& x) const {
    require(x.cols() == size(), ErrorKind::dimension, "X·Γ: X must have N columns");
    return std::visit([&](const auto& m) -> Matrix { return x * m; }, gamma_);
  }

  Vector diagonal() const {
    return std::visit([](const auto& m) -> Vector { return m.diagonal(); }, gamma_);
  }

  /// Smallest entry of Γ, counting implicit zeros of sparse storage.
  double min_weight() const {
    if (is_dense()) return std::get<Matrix>(gamma_).minCoeff();
    const auto& s = std::get<SparseMatrix>(gamma_);
    double lo = std::numeric_limits<double>::infinity();
    for (Index k = 0; k < s.nonZeros(); ++k) lo = std::min(lo, s.valuePtr()[k]);
    if (s.nonZeros() < size() * size()) lo = std::min(lo, 0.0);
    return lo;
  }

  /// Calls f(i, j, γ_ij) for every nonzero entry, column-major order.
  template <class F>
  void for_each_nonzero(F&& f) const {
    if (is_dense()) {
      const auto& m = std::get<Matrix>(gamma_);
      for (Index j = 0; j < m.cols(); ++j)
        for (Index i = 0; i < m.rows(); ++i)
          if (m(i, j) != 0.0) f(i, j, m(i, j));
    } else {
      const auto& s = std::get<SparseMatrix>(gamma_);
      for (Index j = 0; j < s.outerSize(); ++j)
        for (SparseMatrix::InnerIterator it(s, j); it; ++it)
          if (it.value() != 0.0) f(it.row(), it.col(), it.value());
    }
  }

  /// Same graph with every edge weight multiplied by `factor` > 0.
  TrainingGraph scaled(double factor) const {
    require(factor > 0.0 && std::isfinite(factor), ErrorKind::parameter, "edge scale factor must be positive");
    auto st = structure_;
    if (st)
      for (double& w : st->weights) w *= factor;
    return std::visit(
        [&](const auto& m) {
          using Storage = std::decay_t<decltype(m)>;
          return TrainingGraph(v_, Storage(m * factor), st);
        },
        gamma_);
  }

 private:
  void validate() {
    const Index n = v_.size();
    require(n >= 1, ErrorKind::dimension, "graph needs at least one vertex");
    std::visit(
        [&](auto& m) {
          require(m.rows() == n && m.cols() == n, ErrorKind::dimension,
                  "edge matrix must be N×N with N = " + std::to_string(n));
        },
        gamma_);
    for (Index i = 0; i < n; ++i)
      require(std::isfinite(v_[i]) && v_[i] > 0.0, ErrorKind::contract,
              "vertex weight " + std::to_string(i) + " must be strictly positive");

    if (auto* d = std::get_if<Matrix>(&gamma_)) {
      require(d->allFinite(), ErrorKind::contract, "edge weights must be finite");
      const double scale = std::max(1.0, d->cwiseAbs().maxCoeff());
      require((*d - d->transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale, ErrorKind::contract,
              "edge-weight matrix is not symmetric; symmetrize it first");
      *d = 0.5 * (*d + d->transpose()).eval();
    } else {
      auto& s = std::get<SparseMatrix>(gamma_);
      SparseMatrix t = s.transpose();
      double scale = 1.0;
      for (Index k = 0; k < s.nonZeros(); ++k) {
        require(std::isfinite(s.valuePtr()[k]), ErrorKind::contract, "edge weights must be finite");
        scale = std::max(scale, std::abs(s.valuePtr()[k]));
      }
      SparseMatrix diff = s - t;
      double asym = 0.0;
      for (Index k = 0; k < diff.nonZeros(); ++k) asym = std::max(asym, std::abs(diff.valuePtr()[k]));
      require(asym <= 1e-12 * scale, ErrorKind::contract, "edge-weight matrix is not symmetric; symmetrize it first");
      s = 0.5 * (s + t);
      s.prune(0.0);
      s.makeCompressed();
    }

    q_ = v_.sum();
    r_ = row_sums().sum();
    require(std::isfinite(r_) && r_ > 0.0, ErrorKind::degenerate,
            "sum of edge weights R must be positive (got " + std::to_string(r_) + ")");
  }

  Vector v_;
  EdgeStorage gamma_;
  std::optional<GroupStructure> structure_;
  double q_ = 0.0;
  double r_ = 0.0;
};

/// (Γ + Γᵀ)/2
inline Matrix symmetrize(const Matrix& gamma_raw) {
  require(gamma_raw.rows() == gamma_raw.cols(), ErrorKind::dimension, "symmetrize: matrix must be square");
  return 0.5 * (gamma_raw + gamma_raw.transpose());
}

inline SparseMatrix symmetrize(const SparseMatrix& gamma_raw) {
  require(gamma_raw.rows() == gamma_raw.cols(), ErrorKind::dimension, "symmetrize: matrix must be square");
  SparseMatrix t = gamma_raw.transpose();
  SparseMatrix s = 0.5 * (gamma_raw + t);
  return s;
}

// ---------------------------------------------------------------------------
// Consistency: v = (Q/R)·Γ·1

struct ConsistencyReport {
  bool consistent = false;
  Vector residual;  // v − (Q/R)Γ1
  double max_abs_residual = 0.0;
  double tolerance = 0.0;
};

inline double default_consistency_tolerance(const TrainingGraph& g) {
  return 1e-9 * g.vertex_weights().cwiseAbs().maxCoeff();
}

inline ConsistencyReport check_consistency(const TrainingGraph& g, double tol) {
  require(g.r_sum() != 0.0, ErrorKind::degenerate, "consistency check needs R ≠ 0");
  ConsistencyReport rep;
  rep.residual = g.vertex_weights() - (g.q_sum() / g.r_sum()) * g.row_sums();
  rep.max_abs_residual = rep.residual.cwiseAbs().maxCoeff();
  rep.tolerance = tol;
  rep.consistent = rep.max_abs_residual <= tol;
  return rep;
}

inline ConsistencyReport check_consistency(const TrainingGraph& g) {
  return check_consistency(g, default_consistency_tolerance(g));
}

// ---------------------------------------------------------------------------
// Weighted statistics of a single feature

inline double weighted_mean(const Vector& y, const Vector& v) {
  require(y.size() == v.size(), ErrorKind::dimension, "feature length differs from number of vertex weights");
  return v.dot(y) / v.sum();
}

inline double weighted_variance(const Vector& y, const Vector& v) {
  const double mu = weighted_mean(y, v);
  return (v.array() * (y.array() - mu).square()).sum() / v.sum();
}

/// Rescales y to weighted zero mean and weighted unit variance under v.
inline Vector normalize_feature(const Vector& y, const Vector& v) {
  require(y.size() == v.size(), ErrorKind::dimension, "feature length differs from number of vertex weights");
  const double mu = weighted_mean(y, v);
  const double var = weighted_variance(y, v);
  const double scale = std::max(1.0, y.cwiseAbs().maxCoeff());
  require(var > 1e-24 * scale * scale, ErrorKind::degenerate, "feature has zero weighted variance");
  return (y.array() - mu) / std::sqrt(var);
}

/// (1/R)·Σ_{n,n'} γ_{n,n'} (y(n') − y(n))², by direct summation over edges.
inline double weighted_delta(const TrainingGraph& g, const Vector& y) {
  require(y.size() == g.size(), ErrorKind::dimension, "feature length differs from graph size");
  double acc = 0.0;
  g.for_each_nonzero([&](Index i, Index j, double w) {
    const double d = y[j] - y[i];
    acc += w * d * d;
  });
  return acc / g.r_sum();
}

/// 2 − (2/R)·yᵀΓy. Only valid for consistent graphs and normalized y; the
/// preconditions are checked with tolerance `tol`.
inline double weighted_delta_fast(const TrainingGraph& g, const Vector& y, double tol = 1e-8) {
  require(y.size() == g.size(), ErrorKind::dimension, "feature length differs from graph size");
  const auto rep = check_consistency(g, std::max(tol, default_consistency_tolerance(g)));
  require(rep.consistent, ErrorKind::contract,
          "fast Δ needs a consistent graph (residual " + std::to_string(rep.max_abs_residual) + ")");
  const Vector& v = g.vertex_weights();
  const double mean = v.dot(y) / g.q_sum();
  require(std::abs(mean) <= tol, ErrorKind::contract,
          "fast Δ needs weighted zero mean (got " + std::to_string(mean) + ")");
  const double var = (v.array() * y.array().square()).sum() / g.q_sum();
  require(std::abs(var - 1.0) <= tol, ErrorKind::contract,
          "fast Δ needs weighted unit variance (got " + std::to_string(var) + ")");
  return 2.0 - 2.0 / g.r_sum() * g.quadratic_form(y);
}

/// Zeroes the diagonal of Γ. Q is unchanged, R shrinks; the result may no
/// longer be consistent. Free responses are unaffected.
inline TrainingGraph remove_self_loops(const TrainingGraph& g) {
  if ((g.diagonal().array() == 0.0).all()) return g;
  if (g.is_dense()) {
    Matrix m = std::get<Matrix>(g.edges());
    m.diagonal().setZero();
    return TrainingGraph(g.vertex_weights(), std::move(m));
  }
  SparseMatrix s = std::get<SparseMatrix>(g.edges());
  s.prune([](Index i, Index j, double) { return i != j; });
  return TrainingGraph(g.vertex_weights(), std::move(s));
}

// ---------------------------------------------------------------------------
// Fingerprint used to tie trained models to the graph they came from.

struct GraphFingerprint {
  Index n = 0;
  double q = 0.0;
  double r = 0.0;
  std::uint64_t checksum = 0;

  bool operator==(const GraphFingerprint&) const = default;
};

namespace detail {
inline void fnv1a(std::uint64_t& h, const void* data, std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t k = 0; k < len; ++k) {
    h ^= p[k];
    h *= 0x100000001b3ULL;
  }
}
}  // namespace detail

inline GraphFingerprint fingerprint(const TrainingGraph& g) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const Vector& v = g.vertex_weights();
  for (Index i = 0; i < v.size(); ++i) detail::fnv1a(h, &v[i], sizeof(double));
  g.for_each_nonzero([&](Index i, Index j, double w) {
    std::int64_t ij[2] = {static_cast<std::int64_t>(i), static_cast<std::int64_t>(j)};
    detail::fnv1a(h, ij, sizeof(ij));
    detail::fnv1a(h, &w, sizeof(double));
  });
  return {g.size(), g.q_sum(), g.r_sum(), h};
}

}  // namespace gsfa
