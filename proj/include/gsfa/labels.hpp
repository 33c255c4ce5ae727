#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "gsfa/graph.hpp"

namespace gsfa {

struct LabelStats {
  double mu = 0.0;
  double sigma = 1.0;
};

/// L target labels over N samples plus their eigenvalue weights.
///
/// `mixing` records the (invertible, lower-triangular) map applied by
/// decorrelation: labels = mixing · (normalized labels before decorrelation).
/// `stats` holds the per-label weighted mean and deviation removed by
/// normalization, so label j of the *input* is recovered as σ_j·ℓ̃_j + μ_j.
struct LabelSet {
  Matrix labels;
  Vector eigenvalues;
  Vector vertex_weights;
  std::vector<LabelStats> stats;
  Matrix mixing;
  bool normalized = false;
  bool decorrelated = false;

  Index count() const { return labels.rows(); }
  Index samples() const { return labels.cols(); }

  /// Maps a normalized value of label 0 back to the original label scale.
  double denormalize_first(double y) const { return stats.empty() ? y : stats[0].sigma * y + stats[0].mu; }
};

/// Equal eigenvalues for the original labels and linearly decreasing ones
/// for auxiliaries: weight 1 for each original, (A+1−k)/(A+1) for auxiliary
/// k = 1…A; the whole vector is scaled to sum to 1.
inline Vector default_eigenvalue_schedule(Index originals, Index auxiliaries = 0) {
  require(originals >= 1 && auxiliaries >= 0, ErrorKind::parameter, "eigenvalue schedule needs ≥ 1 original label");
  Vector lam(originals + auxiliaries);
  lam.head(originals).setOnes();
  for (Index k = 1; k <= auxiliaries; ++k)
    lam[originals + k - 1] = static_cast<double>(auxiliaries + 1 - k) / static_cast<double>(auxiliaries + 1);
  return lam / lam.sum();
}

/// ℓ̃ = (ℓ − μ·1)/σ for each row, with weighted mean and variance under v.
inline LabelSet normalize_labels(const Matrix& raw, const Vector& v) {
  require(raw.cols() == v.size(), ErrorKind::dimension, "labels must have one column per vertex weight");
  require(raw.rows() >= 1, ErrorKind::dimension, "at least one label is required");
  for (Index i = 0; i < v.size(); ++i)
    require(v[i] > 0.0, ErrorKind::contract, "vertex weights must be strictly positive");
  const double q = v.sum();
  LabelSet ls;
  ls.vertex_weights = v;
  ls.labels.resize(raw.rows(), raw.cols());
  ls.stats.resize(static_cast<std::size_t>(raw.rows()));
  for (Index j = 0; j < raw.rows(); ++j) {
    const Vector row = raw.row(j).transpose();
    const double mu = v.dot(row) / q;
    const double var = (v.array() * (row.array() - mu).square()).sum() / q;
    const double scale = std::max(1.0, row.cwiseAbs().maxCoeff());
    require(var > 1e-24 * scale * scale, ErrorKind::degenerate,
            "label " + std::to_string(j) + " has zero weighted variance");
    const double sigma = std::sqrt(var);
    ls.labels.row(j) = ((row.array() - mu) / sigma).matrix().transpose();
    ls.stats[static_cast<std::size_t>(j)] = {mu, sigma};
  }
  ls.eigenvalues = default_eigenvalue_schedule(raw.rows());
  ls.mixing = Matrix::Identity(raw.rows(), raw.rows());
  ls.normalized = true;
  return ls;
}

/// Sequentially projects every earlier label out of each later one,
/// ℓ_j' ← ℓ_j' − (1/Q)(ℓ_j'ᵀ Diag(v) ℓ_j)·ℓ_j, and re-normalizes.
inline LabelSet decorrelate_labels(const LabelSet& in) {
  require(in.normalized, ErrorKind::contract, "decorrelation expects normalized labels");
  LabelSet ls = in;
  const Vector& v = ls.vertex_weights;
  const double q = v.sum();
  const Index L = ls.count();
  for (Index jp = 1; jp < L; ++jp) {
    for (Index j = 0; j < jp; ++j) {
      const double c = (ls.labels.row(jp).array() * v.transpose().array() * ls.labels.row(j).array()).sum() / q;
      ls.labels.row(jp) -= c * ls.labels.row(j);
      ls.mixing.row(jp) -= c * ls.mixing.row(j);
    }
    const double var = (v.transpose().array() * ls.labels.row(jp).array().square()).sum() / q;
    require(var >= 1e-12, ErrorKind::degenerate,
            "label " + std::to_string(jp) + " is linearly dependent on earlier labels");
    const double s = std::sqrt(var);
    ls.labels.row(jp) /= s;
    ls.mixing.row(jp) /= s;
  }
  ls.decorrelated = true;
  return ls;
}

struct LabelSetCheck {
  double max_mean = 0.0;
  double max_variance_error = 0.0;
  double max_cross = 0.0;
};

/// Numerical residuals of the normalization and decorrelation contracts.
inline LabelSetCheck check_label_set(const LabelSet& ls) {
  const Vector& v = ls.vertex_weights;
  const double q = v.sum();
  const Matrix weighted = ls.labels * v.asDiagonal();
  const Matrix gram = weighted * ls.labels.transpose() / q;
  LabelSetCheck c;
  c.max_mean = (ls.labels * v / q).cwiseAbs().maxCoeff();
  c.max_variance_error = (gram.diagonal().array() - 1.0).abs().maxCoeff();
  for (Index i = 0; i < gram.rows(); ++i)
    for (Index j = 0; j < gram.cols(); ++j)
      if (i != j) c.max_cross = std::max(c.max_cross, std::abs(gram(i, j)));
  return c;
}

/// λ_j = (R/2Q)(2 − Δ_j). Δ > 2 yields a negative eigenvalue and a warning.
inline Vector eigenvalues_from_deltas(const Vector& deltas, double q, double r) {
  require(q > 0.0 && r > 0.0, ErrorKind::parameter, "Q and R must be positive");
  Vector lam(deltas.size());
  for (Index j = 0; j < deltas.size(); ++j) {
    if (deltas[j] > 2.0)
      warn("target Δ = " + std::to_string(deltas[j]) + " > 2 gives a negative eigenvalue for label " +
           std::to_string(j));
    lam[j] = r / (2.0 * q) * (2.0 - deltas[j]);
  }
  return lam;
}

inline double delta_from_eigenvalue(double lambda, double q, double r) { return 2.0 - 2.0 * q / r * lambda; }

/// ℓ_k(n) = cos(π·k·(ℓ₁(n) − min ℓ₁)/(max ℓ₁ − min ℓ₁)) for k = 2…K, as rows.
inline Matrix auxiliary_labels(const Vector& l1, Index k_max) {
  require(k_max >= 2, ErrorKind::parameter, "auxiliary labels need K ≥ 2");
  require(l1.size() >= 1, ErrorKind::dimension, "empty label vector");
  const double lo = l1.minCoeff();
  const double hi = l1.maxCoeff();
  require(hi > lo, ErrorKind::degenerate, "auxiliary labels need a non-constant label");
  Matrix aux(k_max - 1, l1.size());
  for (Index k = 2; k <= k_max; ++k)
    for (Index n = 0; n < l1.size(); ++n)
      aux(k - 2, n) = std::cos((l1[n] - lo) / (hi - lo) * std::numbers::pi * static_cast<double>(k));
  return aux;
}

/// Convenience: normalized + decorrelated label set made of ℓ₁ and K−1
/// cosine auxiliaries, with the default eigenvalue schedule.
inline LabelSet label_with_auxiliaries(const Vector& l1, Index total_labels, const Vector& v) {
  require(total_labels >= 1, ErrorKind::parameter, "need at least one target label");
  Matrix raw(total_labels, l1.size());
  raw.row(0) = l1.transpose();
  if (total_labels > 1) raw.bottomRows(total_labels - 1) = auxiliary_labels(l1, total_labels);
  LabelSet ls = decorrelate_labels(normalize_labels(raw, v));
  ls.eigenvalues = default_eigenvalue_schedule(1, total_labels - 1);
  return ls;
}

// ---------------------------------------------------------------------------
// Compact binary labels for C = 2^B classes

/// ±1 class codes. Rows 0…B−1 are the bit labels; later rows are signed
/// products of ≥ 2 bit labels, ordered from the B-fold product down to the
/// 2-fold ones, lexicographic within each order, sign-flipped so class 0 is −1.
struct CompactCode {
  int classes = 0;
  int bits = 0;
  Matrix per_class;                     // L×C
  std::vector<std::vector<int>> terms;  // 0-based bit indices per row
  std::vector<int> signs;
  Vector eigenvalues;
};

namespace detail {
inline void combinations(int n, int k, int start, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == k) {
    out.push_back(cur);
    return;
  }
  for (int i = start; i < n; ++i) {
    cur.push_back(i);
    combinations(n, k, i + 1, cur, out);
    cur.pop_back();
  }
}
}  // namespace detail

inline CompactCode compact_binary_labels(int classes, int count) {
  require(classes >= 2 && (classes & (classes - 1)) == 0, ErrorKind::unsupported,
          "compact binary labels need a power-of-two class count (got " + std::to_string(classes) + ")");
  int bits = 0;
  while ((1 << bits) < classes) ++bits;
  require(count >= bits, ErrorKind::parameter,
          "compact code needs at least log2(C) = " + std::to_string(bits) + " labels");
  require(count <= classes - 1, ErrorKind::parameter, "at most C−1 decorrelated labels exist");

  CompactCode code;
  code.classes = classes;
  code.bits = bits;
  for (int j = 0; j < bits; ++j) {
    code.terms.push_back({j});
    code.signs.push_back(1);
  }
  for (int order = bits; order >= 2 && static_cast<int>(code.terms.size()) < count; --order) {
    std::vector<std::vector<int>> combos;
    std::vector<int> cur;
    detail::combinations(bits, order, 0, cur, combos);
    for (auto& c : combos) {
      if (static_cast<int>(code.terms.size()) == count) break;
      // class 0 has every bit label at −1, so the raw product there is (−1)^order
      code.signs.push_back(order % 2 == 0 ? -1 : 1);
      code.terms.push_back(std::move(c));
    }
  }

  code.per_class.resize(count, classes);
  for (int c = 0; c < classes; ++c) {
    std::vector<double> bit(static_cast<std::size_t>(bits));
    for (int j = 0; j < bits; ++j) bit[static_cast<std::size_t>(j)] = 2.0 * ((c >> (bits - 1 - j)) & 1) - 1.0;
    for (int r = 0; r < count; ++r) {
      double p = code.signs[static_cast<std::size_t>(r)];
      for (int t : code.terms[static_cast<std::size_t>(r)]) p *= bit[static_cast<std::size_t>(t)];
      code.per_class(r, c) = p;
    }
  }
  code.eigenvalues = default_eigenvalue_schedule(bits, count - bits);
  return code;
}

/// Per-sample label set from 0-based class ids. Classes must be balanced.
inline LabelSet expand_compact_labels(const CompactCode& code, const std::vector<Index>& class_ids) {
  require(!class_ids.empty(), ErrorKind::dimension, "no samples");
  std::vector<Index> counts(static_cast<std::size_t>(code.classes), 0);
  for (Index c : class_ids) {
    require(c >= 0 && c < code.classes, ErrorKind::parameter, "class id out of range");
    ++counts[static_cast<std::size_t>(c)];
  }
  for (Index c : counts)
    require(c == counts[0] && c > 0, ErrorKind::parameter, "compact labels require balanced classes");
  const Index n = static_cast<Index>(class_ids.size());
  Matrix raw(code.per_class.rows(), n);
  for (Index i = 0; i < n; ++i) raw.col(i) = code.per_class.col(class_ids[static_cast<std::size_t>(i)]);
  LabelSet ls = decorrelate_labels(normalize_labels(raw, Vector::Ones(n)));
  ls.eigenvalues = code.eigenvalues;
  return ls;
}

}  // namespace gsfa
