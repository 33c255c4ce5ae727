#pragma once

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "gsfa/graph.hpp"

namespace gsfa {

// Features are J×N (one column per sample), labels a length-N vector.

enum class EstimatorKind { linear_scaling, linear_regression, soft_gc };

inline const char* to_string(EstimatorKind k) {
  switch (k) {
    case EstimatorKind::linear_scaling: return "linear_scaling";
    case EstimatorKind::linear_regression: return "linear_regression";
    case EstimatorKind::soft_gc: return "soft_gc";
  }
  return "?";
}

inline EstimatorKind parse_estimator_kind(const std::string& s) {
  if (s == "linear_scaling") return EstimatorKind::linear_scaling;
  if (s == "linear_regression") return EstimatorKind::linear_regression;
  if (s == "soft_gc") return EstimatorKind::soft_gc;
  fail(ErrorKind::parameter, "unknown estimator '" + s + "'");
}

struct GaussianClass {
  Vector mean;
  Matrix covariance;  // ridge already added
  double label = 0.0; // mean label of the class
};

struct LabelEstimator {
  EstimatorKind kind = EstimatorKind::linear_scaling;
  // linear_scaling
  double sign = 1.0;
  double mu = 0.0;
  double sigma = 1.0;
  // linear_regression: ℓ̂ = aᵀy + b
  Vector a;
  double b = 0.0;
  // soft_gc
  std::vector<GaussianClass> classes;
  std::vector<double> log_priors;

  double clip_min = -std::numeric_limits<double>::infinity();
  double clip_max = std::numeric_limits<double>::infinity();

  /// Number of leading feature rows the estimator reads.
  Index features_used() const {
    switch (kind) {
      case EstimatorKind::linear_scaling: return 1;
      case EstimatorKind::linear_regression: return a.size();
      case EstimatorKind::soft_gc: return classes.empty() ? 0 : classes.front().mean.size();
    }
    return 0;
  }
};

namespace detail {
inline void check_labels(const Matrix& y, const Vector& labels) {
  require(y.cols() == labels.size(), ErrorKind::dimension,
          "features have " + std::to_string(y.cols()) + " samples but there are " + std::to_string(labels.size()) +
              " labels");
  require(labels.size() >= 2, ErrorKind::dimension, "need at least two samples");
}

inline double clip(double x, double lo, double hi) { return std::min(std::max(x, lo), hi); }
}  // namespace detail

inline Vector predict(const LabelEstimator& e, const Matrix& y);

inline double rmse(const Vector& pred, const Vector& truth) {
  require(pred.size() == truth.size(), ErrorKind::dimension, "rmse: length mismatch");
  require(pred.size() > 0, ErrorKind::dimension, "rmse: empty input");
  return std::sqrt((pred - truth).squaredNorm() / static_cast<double>(pred.size()));
}

/// RMSE of the best constant predictor, the (weighted) mean label.
inline double chance_rmse(const Vector& truth, const Vector& v) {
  require(truth.size() == v.size(), ErrorKind::dimension, "chance_rmse: length mismatch");
  require(truth.size() > 0, ErrorKind::dimension, "chance_rmse: empty input");
  return std::sqrt(weighted_variance(truth, v));
}

inline double chance_rmse(const Vector& truth) { return chance_rmse(truth, Vector::Ones(truth.size())); }

inline double error_rate(const std::vector<Index>& pred, const std::vector<Index>& truth) {
  require(pred.size() == truth.size(), ErrorKind::dimension, "error_rate: length mismatch");
  require(!pred.empty(), ErrorKind::dimension, "error_rate: empty input");
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) wrong += pred[i] != truth[i];
  return static_cast<double>(wrong) / static_cast<double>(pred.size());
}

/// ℓ̂ = ±y₁σ_ℓ + μ_ℓ, sign chosen by training RMSE, clipped to the label range.
inline LabelEstimator fit_linear_scaling(const Vector& y1, const Vector& labels, const Vector& v) {
  detail::check_labels(y1.transpose(), labels);
  require(v.size() == labels.size(), ErrorKind::dimension, "vertex weights do not match the labels");
  LabelEstimator e;
  e.kind = EstimatorKind::linear_scaling;
  e.mu = weighted_mean(labels, v);
  const double var = weighted_variance(labels, v);
  require(var > 0.0, ErrorKind::degenerate, "labels are constant");
  e.sigma = std::sqrt(var);
  e.clip_min = labels.minCoeff();
  e.clip_max = labels.maxCoeff();
  e.sign = 1.0;
  const double plus = rmse(predict(e, y1.transpose()), labels);
  e.sign = -1.0;
  const double minus = rmse(predict(e, y1.transpose()), labels);
  if (plus <= minus) e.sign = 1.0;
  return e;
}

inline LabelEstimator fit_linear_scaling(const Vector& y1, const Vector& labels) {
  return fit_linear_scaling(y1, labels, Vector::Ones(labels.size()));
}

/// Least squares ℓ̂ = aᵀy + b on all J rows of y. A rank-deficient design is
/// solved with a small ridge and a warning.
inline LabelEstimator fit_linear_regression(const Matrix& y, const Vector& labels) {
  detail::check_labels(y, labels);
  const Index j = y.rows();
  require(labels.size() > j, ErrorKind::dimension, "linear regression needs more samples than features");
  Matrix z(labels.size(), j + 1);
  z.leftCols(j) = y.transpose();
  z.col(j).setOnes();
  Eigen::ColPivHouseholderQR<Matrix> qr(z);
  qr.setThreshold(1e-12);
  Vector coef;
  if (qr.rank() == j + 1) {
    coef = qr.solve(labels);
  } else {
    warn("linear regression design has rank " + std::to_string(qr.rank()) + " < " + std::to_string(j + 1) +
         "; adding a ridge");
    Matrix normal = z.transpose() * z;
    const double eps = 1e-8 * std::max(normal.trace() / static_cast<double>(j + 1), 1.0);
    normal.diagonal().array() += eps;
    coef = normal.ldlt().solve(z.transpose() * labels);
  }
  LabelEstimator e;
  e.kind = EstimatorKind::linear_regression;
  e.a = coef.head(j);
  e.b = coef[j];
  e.clip_min = labels.minCoeff();
  e.clip_max = labels.maxCoeff();
  return e;
}

/// Equal-frequency bins over the label-sorted samples (ties broken by
/// index). The first N mod C bins get one extra sample.
inline std::vector<Index> equal_frequency_bins(const Vector& labels, Index n_classes) {
  const Index n = labels.size();
  require(n_classes >= 1, ErrorKind::parameter, "need at least one class");
  require(n >= 2 * n_classes, ErrorKind::parameter,
          "cannot form " + std::to_string(n_classes) + " classes with at least 2 samples from " + std::to_string(n) +
              " samples");
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return labels[a] < labels[b]; });
  std::vector<Index> cls(static_cast<std::size_t>(n));
  const Index base = n / n_classes;
  const Index extra = n % n_classes;
  Index pos = 0;
  for (Index c = 0; c < n_classes; ++c) {
    const Index size = base + (c < extra ? 1 : 0);
    for (Index k = 0; k < size; ++k) cls[static_cast<std::size_t>(order[static_cast<std::size_t>(pos++)])] = c;
  }
  return cls;
}

/// Distinct label values, capped at N/10 (at least 2).
inline Index default_soft_gc_classes(const Vector& labels) {
  std::set<double> distinct(labels.data(), labels.data() + labels.size());
  const Index cap = std::max<Index>(2, labels.size() / 10);
  return std::min<Index>(static_cast<Index>(distinct.size()), cap);
}

struct SoftGcOptions {
  double ridge = 1e-6;           // × trace/dim of each class covariance
  bool empirical_priors = false; // equal priors by default
};

inline LabelEstimator fit_soft_gc(const Matrix& y, const Vector& labels, Index n_classes,
                                  const SoftGcOptions& opts = {}) {
  detail::check_labels(y, labels);
  const auto cls = equal_frequency_bins(labels, n_classes);
  const Index dims = y.rows();
  LabelEstimator e;
  e.kind = EstimatorKind::soft_gc;
  e.clip_min = labels.minCoeff();
  e.clip_max = labels.maxCoeff();
  for (Index c = 0; c < n_classes; ++c) {
    std::vector<Index> members;
    for (std::size_t n = 0; n < cls.size(); ++n)
      if (cls[n] == c) members.push_back(static_cast<Index>(n));
    require(members.size() >= 2, ErrorKind::parameter, "class " + std::to_string(c) + " has fewer than 2 samples");
    const double m = static_cast<double>(members.size());
    GaussianClass g;
    g.mean = Vector::Zero(dims);
    g.label = 0.0;
    for (Index n : members) {
      g.mean += y.col(n);
      g.label += labels[n];
    }
    g.mean /= m;
    g.label /= m;
    g.covariance = Matrix::Zero(dims, dims);
    for (Index n : members) {
      const Vector d = y.col(n) - g.mean;
      g.covariance.noalias() += d * d.transpose();
    }
    g.covariance /= m;
    const double tr = g.covariance.trace() / static_cast<double>(dims);
    g.covariance.diagonal().array() += opts.ridge * (tr > 0.0 ? tr : 1.0);
    e.classes.push_back(std::move(g));
    e.log_priors.push_back(opts.empirical_priors ? std::log(m / static_cast<double>(labels.size()))
                                                 : -std::log(static_cast<double>(n_classes)));
  }
  return e;
}

/// Class posteriors p(c|y) for each sample, C×N.
inline Matrix soft_gc_posteriors(const LabelEstimator& e, const Matrix& y) {
  require(e.kind == EstimatorKind::soft_gc, ErrorKind::contract, "not a soft_gc estimator");
  const Index dims = e.features_used();
  require(y.rows() >= dims, ErrorKind::dimension, "soft_gc needs " + std::to_string(dims) + " feature rows");
  const Index c_count = static_cast<Index>(e.classes.size());
  Matrix logp(c_count, y.cols());
  for (Index c = 0; c < c_count; ++c) {
    const auto& g = e.classes[static_cast<std::size_t>(c)];
    Eigen::LLT<Matrix> llt(g.covariance);
    require(llt.info() == Eigen::Success, ErrorKind::singular, "class covariance is not positive definite");
    const double logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    const Matrix d = y.topRows(dims).colwise() - g.mean;
    const Matrix s = llt.matrixL().solve(d);
    logp.row(c) = (-0.5 * s.colwise().squaredNorm().array() - 0.5 * logdet + e.log_priors[static_cast<std::size_t>(c)])
                      .matrix();
  }
  for (Index n = 0; n < y.cols(); ++n) {
    const double top = logp.col(n).maxCoeff();
    logp.col(n) = (logp.col(n).array() - top).exp().matrix();
    logp.col(n) /= logp.col(n).sum();
  }
  return logp;
}

inline Vector predict(const LabelEstimator& e, const Matrix& y) {
  const Index need = e.features_used();
  require(y.rows() >= need, ErrorKind::dimension,
          "estimator needs " + std::to_string(need) + " feature rows, got " + std::to_string(y.rows()));
  Vector out(y.cols());
  switch (e.kind) {
    case EstimatorKind::linear_scaling:
      out = (e.sign * e.sigma * y.row(0).transpose()).array() + e.mu;
      break;
    case EstimatorKind::linear_regression:
      out = (y.topRows(need).transpose() * e.a).array() + e.b;
      break;
    case EstimatorKind::soft_gc: {
      Vector lbl(static_cast<Index>(e.classes.size()));
      for (std::size_t c = 0; c < e.classes.size(); ++c) lbl[static_cast<Index>(c)] = e.classes[c].label;
      out = soft_gc_posteriors(e, y).transpose() * lbl;
      break;
    }
  }
  for (Index n = 0; n < out.size(); ++n) out[n] = detail::clip(out[n], e.clip_min, e.clip_max);
  return out;
}

// ---------------------------------------------------------------------------

struct CentroidClassifier {
  std::vector<Index> class_ids;  // ascending
  Matrix centroids;              // J×C, column c belongs to class_ids[c]
};

inline CentroidClassifier fit_nearest_centroid(const Matrix& y, const std::vector<Index>& class_ids) {
  require(y.cols() == static_cast<Index>(class_ids.size()), ErrorKind::dimension,
          "features and class ids differ in sample count");
  std::map<Index, std::pair<Vector, Index>> acc;
  for (std::size_t n = 0; n < class_ids.size(); ++n) {
    auto [it, fresh] = acc.try_emplace(class_ids[n], Vector::Zero(y.rows()), 0);
    it->second.first += y.col(static_cast<Index>(n));
    ++it->second.second;
  }
  require(!acc.empty(), ErrorKind::dimension, "no samples");
  CentroidClassifier m;
  m.centroids.resize(y.rows(), static_cast<Index>(acc.size()));
  Index c = 0;
  for (const auto& [id, sum] : acc) {
    m.class_ids.push_back(id);
    m.centroids.col(c++) = sum.first / static_cast<double>(sum.second);
  }
  return m;
}

/// Nearest centroid in Euclidean distance; ties go to the smallest class id.
inline Index classify(const CentroidClassifier& m, const Vector& y) {
  require(y.size() == m.centroids.rows(), ErrorKind::dimension, "feature dimensionality mismatch");
  require(!m.class_ids.empty(), ErrorKind::contract, "classifier has no classes");
  Index best = 0;
  double best_d = (m.centroids.col(0) - y).squaredNorm();
  for (Index c = 1; c < m.centroids.cols(); ++c) {
    const double d = (m.centroids.col(c) - y).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return m.class_ids[static_cast<std::size_t>(best)];
}

inline std::vector<Index> classify(const CentroidClassifier& m, const Matrix& y) {
  std::vector<Index> out;
  out.reserve(static_cast<std::size_t>(y.cols()));
  for (Index n = 0; n < y.cols(); ++n) out.push_back(classify(m, Vector(y.col(n))));
  return out;
}

}  // namespace gsfa
