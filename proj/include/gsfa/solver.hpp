#pragma once

#include <Eigen/Eigenvalues>

#include <optional>
#include <string>
#include <vector>

#include "gsfa/graph.hpp"

namespace gsfa {

// Data matrices are I×N: column n is sample x(n).

inline void check_data(const Matrix& x, const Vector& v) {
  require(x.cols() == v.size(), ErrorKind::dimension,
          "data has " + std::to_string(x.cols()) + " samples but " + std::to_string(v.size()) + " vertex weights");
  require(x.cols() >= 1, ErrorKind::dimension, "data matrix has no samples");
}

/// x̃ = (1/Q) Σ v_n x(n)
inline Vector weighted_mean(const Matrix& x, const Vector& v) {
  check_data(x, v);
  return x * v / v.sum();
}

/// C_G = (1/Q) Σ v_n (x(n) − x̃)(x(n) − x̃)ᵀ
inline Matrix sample_covariance(const Matrix& x, const Vector& v) {
  check_data(x, v);
  const Matrix centered = x.colwise() - weighted_mean(x, v);
  Matrix c = centered * v.asDiagonal() * centered.transpose() / v.sum();
  return symmetrize(c);
}

enum class DerivativePath {
  pairwise,        // literal edge sum, any graph
  consistent_form, // (2/Q)X Diag(v) Xᵀ − (2/R) X Γ Xᵀ, consistent graphs
  structured,      // group sums, clustered and serial graphs
};

inline const char* to_string(DerivativePath p) {
  switch (p) {
    case DerivativePath::pairwise: return "pairwise";
    case DerivativePath::consistent_form: return "consistent_form";
    case DerivativePath::structured: return "structured";
  }
  return "?";
}

namespace detail {

inline Matrix derivative_pairwise(const Matrix& x, const TrainingGraph& g) {
  const Index dims = x.rows();
  Matrix acc = Matrix::Zero(dims, dims);
  Vector d(dims);
  g.for_each_nonzero([&](Index i, Index j, double w) {
    if (i == j) return;
    d = x.col(j) - x.col(i);
    acc.selfadjointView<Eigen::Lower>().rankUpdate(d, w);
  });
  Matrix out = acc.selfadjointView<Eigen::Lower>();
  return out / g.r_sum();
}

inline Matrix derivative_consistent(const Matrix& x, const TrainingGraph& g) {
  const Vector& v = g.vertex_weights();
  const Matrix centered = x.colwise() - weighted_mean(x, v);
  Matrix out = (2.0 / g.q_sum()) * centered * v.asDiagonal() * centered.transpose() -
               (2.0 / g.r_sum()) * g.right_multiply(centered) * centered.transpose();
  return symmetrize(out);
}

// Σ over ordered pairs (a∈A, b∈B) of (x_b − x_a)(x_b − x_a)ᵀ
//   = |A|·S_B + |B|·S_A − s_A s_Bᵀ − s_B s_Aᵀ
struct GroupSums {
  double count = 0.0;
  Vector sum;
  Matrix scatter;
};

inline GroupSums group_sums(const Matrix& x, const std::vector<Index>& members) {
  GroupSums s;
  s.count = static_cast<double>(members.size());
  s.sum = Vector::Zero(x.rows());
  s.scatter = Matrix::Zero(x.rows(), x.rows());
  for (Index m : members) {
    s.sum += x.col(m);
    s.scatter.selfadjointView<Eigen::Lower>().rankUpdate(x.col(m));
  }
  s.scatter = Matrix(s.scatter.selfadjointView<Eigen::Lower>());
  return s;
}

inline Matrix derivative_structured(const Matrix& x, const TrainingGraph& g) {
  const auto& st = g.structure();
  require(st.has_value() && st->kind != GraphKind::generic, ErrorKind::contract,
          "structured derivative path needs a clustered or serial graph");
  const Matrix centered = x.colwise() - weighted_mean(x, g.vertex_weights());
  const Index dims = x.rows();
  Matrix acc = Matrix::Zero(dims, dims);
  std::vector<GroupSums> sums;
  sums.reserve(st->groups.size());
  for (const auto& grp : st->groups) sums.push_back(group_sums(centered, grp));

  auto cross = [](const GroupSums& a, const GroupSums& b) -> Matrix {
    return a.count * b.scatter + b.count * a.scatter - a.sum * b.sum.transpose() - b.sum * a.sum.transpose();
  };
  if (st->kind == GraphKind::clustered) {
    // within a class, ordered pairs n ≠ n' (the n = n' terms vanish anyway)
    for (std::size_t c = 0; c < sums.size(); ++c) acc += st->weights[c] * cross(sums[c], sums[c]);
  } else {
    for (std::size_t k = 0; k + 1 < sums.size(); ++k)
      acc += 2.0 * st->weights[k] * cross(sums[k], sums[k + 1]);
  }
  return symmetrize(acc) / g.r_sum();
}

}  // namespace detail

/// Ċ_G = (1/R) Σ γ_{n,n'} (x(n') − x(n))(x(n') − x(n))ᵀ via the chosen route.
inline Matrix derivative_covariance(const Matrix& x, const TrainingGraph& g, DerivativePath path) {
  check_data(x, g.vertex_weights());
  switch (path) {
    case DerivativePath::pairwise: return detail::derivative_pairwise(x, g);
    case DerivativePath::consistent_form: {
      const auto rep = check_consistency(g);
      require(rep.consistent, ErrorKind::contract,
              "consistent-form derivative path needs a consistent graph (residual " +
                  std::to_string(rep.max_abs_residual) + ")");
      return detail::derivative_consistent(x, g);
    }
    case DerivativePath::structured: return detail::derivative_structured(x, g);
  }
  return {};
}

/// Picks the cheapest valid route: structured, then consistent form, then
/// pairwise (with a warning, since the solution is then not the one the
/// consistency-based theory describes).
inline DerivativePath choose_derivative_path(const TrainingGraph& g) {
  if (g.structure() && g.structure()->kind != GraphKind::generic) return DerivativePath::structured;
  if (check_consistency(g).consistent) return DerivativePath::consistent_form;
  warn("training graph is not consistent; using the pairwise derivative covariance");
  return DerivativePath::pairwise;
}

// ---------------------------------------------------------------------------

struct GsfaModel {
  Vector weighted_mean;
  Matrix projection;  // I×J
  Vector deltas;      // J, ascending
  GraphFingerprint trained_on;

  Index input_dim() const { return projection.rows(); }
  Index output_dim() const { return projection.cols(); }
};

struct GsfaOptions {
  /// Ridge added to retained C_G eigenvalues: ε = ridge·trace(C_G)/I.
  double ridge = 1e-10;
  /// C_G directions with eigenvalue < rank_tolerance·max eigenvalue are dropped.
  double rank_tolerance = 1e-10;
  std::optional<DerivativePath> path;
  /// When set, each feature is made negative at this sample; otherwise the
  /// first clearly nonzero coordinate of each W column is made positive.
  std::optional<Index> sign_reference;
};

/// y(n) = Wᵀ(x(n) − x̃), J×N.
inline Matrix extract_features(const GsfaModel& m, const Matrix& x) {
  require(x.rows() == m.input_dim(), ErrorKind::dimension,
          "model expects " + std::to_string(m.input_dim()) + "-dimensional samples, got " + std::to_string(x.rows()));
  return m.projection.transpose() * (x.colwise() - m.weighted_mean);
}

/// Linear GSFA: sphere C_G, rotate to diagonalise the sphered Ċ_G and keep
/// the J slowest directions.
inline GsfaModel train_gsfa(const Matrix& x, const TrainingGraph& g, Index out_dims, const GsfaOptions& opts = {}) {
  const Vector& v = g.vertex_weights();
  check_data(x, v);
  require(x.allFinite(), ErrorKind::contract, "data contains non-finite values");
  require(out_dims >= 1, ErrorKind::parameter, "need at least one output feature");
  const Index dims = x.rows();

  GsfaModel model;
  model.weighted_mean = weighted_mean(x, v);
  const Matrix cov = sample_covariance(x, v);

  Eigen::SelfAdjointEigenSolver<Matrix> ce(cov);
  require(ce.info() == Eigen::Success, ErrorKind::singular, "eigendecomposition of C_G failed");
  const Vector evals = ce.eigenvalues();
  const double top = std::max(evals.maxCoeff(), 0.0);
  std::vector<Index> keep;
  for (Index k = dims - 1; k >= 0; --k)
    if (top > 0.0 && evals[k] > opts.rank_tolerance * top) keep.push_back(k);
  const Index rank = static_cast<Index>(keep.size());
  require(rank >= out_dims, ErrorKind::singular,
          "covariance matrix has rank " + std::to_string(rank) + " (null-space dimension " +
              std::to_string(dims - rank) + "), cannot extract " + std::to_string(out_dims) + " features");
  const double eps = opts.ridge * cov.trace() / static_cast<double>(dims);
  Matrix sphere(dims, rank);
  for (Index c = 0; c < rank; ++c) {
    const Index k = keep[static_cast<std::size_t>(c)];
    sphere.col(c) = ce.eigenvectors().col(k) / std::sqrt(evals[k] + eps);
  }

  const DerivativePath path = opts.path.value_or(choose_derivative_path(g));
  const Matrix dcov = derivative_covariance(x, g, path);
  Matrix sphered = sphere.transpose() * dcov * sphere;
  sphered = symmetrize(sphered);
  Eigen::SelfAdjointEigenSolver<Matrix> de(sphered);
  require(de.info() == Eigen::Success, ErrorKind::singular, "eigendecomposition of sphered Ċ_G failed");

  model.projection = sphere * de.eigenvectors().leftCols(out_dims);
  model.deltas = de.eigenvalues().head(out_dims);

  if (opts.sign_reference) {
    const Matrix y = extract_features(model, x);
    for (Index j = 0; j < out_dims; ++j) {
      const double scale = y.row(j).cwiseAbs().maxCoeff();
      Index k = *opts.sign_reference;
      if (k < 0 || k >= y.cols() || std::abs(y(j, k)) <= 1e-10 * scale) {
        k = 0;
        while (k < y.cols() && std::abs(y(j, k)) <= 1e-10 * scale) ++k;
      }
      if (k < y.cols() && y(j, k) > 0.0) model.projection.col(j) *= -1.0;
    }
  } else {
    for (Index j = 0; j < out_dims; ++j) {
      auto w = model.projection.col(j);
      const double scale = w.cwiseAbs().maxCoeff();
      Index k = 0;
      while (k < w.size() && std::abs(w[k]) <= 1e-10 * scale) ++k;
      if (k < w.size() && w[k] < 0.0) w *= -1.0;
    }
  }
  model.trained_on = fingerprint(g);
  return model;
}

}  // namespace gsfa
