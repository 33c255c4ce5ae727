#pragma once

// Reference computations written independently of the library code paths:
// plain loops over dense matrices and Eigen's generalized symmetric solver.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <vector>

#include "gsfa/graph.hpp"
#include "gsfa/random.hpp"

namespace oracle {

using gsfa::Index;
using gsfa::Matrix;
using gsfa::Vector;

/// (1/R) Σ_{n,n'} γ (y(n') − y(n))² by double loop.
inline double delta(const Matrix& gamma, const Vector& y) {
  double num = 0.0, r = 0.0;
  for (Index i = 0; i < gamma.rows(); ++i)
    for (Index j = 0; j < gamma.cols(); ++j) {
      num += gamma(i, j) * (y[j] - y[i]) * (y[j] - y[i]);
      r += gamma(i, j);
    }
  return num / r;
}

/// (1/R) Σ γ (x(n') − x(n))(x(n') − x(n))ᵀ by double loop.
inline Matrix derivative_covariance(const Matrix& x, const Matrix& gamma) {
  Matrix acc = Matrix::Zero(x.rows(), x.rows());
  double r = 0.0;
  for (Index i = 0; i < gamma.rows(); ++i)
    for (Index j = 0; j < gamma.cols(); ++j) {
      const Vector d = x.col(j) - x.col(i);
      acc += gamma(i, j) * d * d.transpose();
      r += gamma(i, j);
    }
  return acc / r;
}

struct Spectrum {
  Vector eigenvalues;  // descending
  Matrix responses;    // y_j scaled to weighted unit variance, columns
};

/// Solves Γ y = λ Diag(v) y directly (generalized problem), which has the
/// same eigenvalues as M and eigenvectors y = D^{-½}u.
inline Spectrum generalized_spectrum(const Matrix& gamma, const Vector& v) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> es(gamma, Matrix(v.asDiagonal()));
  Spectrum s;
  s.eigenvalues = es.eigenvalues().reverse();
  s.responses = es.eigenvectors().rowwise().reverse();
  const double q = v.sum();
  for (Index j = 0; j < s.responses.cols(); ++j) {
    const double var = s.responses.col(j).cwiseAbs2().dot(v) / q;
    s.responses.col(j) /= std::sqrt(var);
  }
  return s;
}

/// Number of connected components of the graph of nonzero off-diagonal entries.
inline int components(const Matrix& gamma, double tol = 1e-12) {
  const Index n = gamma.rows();
  std::vector<int> label(static_cast<std::size_t>(n), -1);
  int count = 0;
  for (Index s = 0; s < n; ++s) {
    if (label[static_cast<std::size_t>(s)] >= 0) continue;
    std::vector<Index> stack{s};
    label[static_cast<std::size_t>(s)] = count;
    while (!stack.empty()) {
      const Index a = stack.back();
      stack.pop_back();
      for (Index b = 0; b < n; ++b)
        if (label[static_cast<std::size_t>(b)] < 0 && std::abs(gamma(a, b)) > tol) {
          label[static_cast<std::size_t>(b)] = count;
          stack.push_back(b);
        }
    }
    ++count;
  }
  return count;
}

inline double weighted_mean(const Vector& y, const Vector& v) { return y.dot(v) / v.sum(); }

inline double weighted_cov(const Vector& a, const Vector& b, const Vector& v) {
  const double ma = weighted_mean(a, v), mb = weighted_mean(b, v);
  double s = 0.0;
  for (Index i = 0; i < a.size(); ++i) s += v[i] * (a[i] - ma) * (b[i] - mb);
  return s / v.sum();
}

/// Distance between y and ±ref, whichever sign fits.
inline double signed_distance(const Vector& y, const Vector& ref) {
  return std::min((y - ref).cwiseAbs().maxCoeff(), (y + ref).cwiseAbs().maxCoeff());
}

inline Matrix random_matrix(gsfa::CounterRng& rng, Index rows, Index cols) {
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = rng.normal();
  return m;
}

/// Random symmetric nonnegative Γ with v chosen to make the graph consistent.
inline gsfa::TrainingGraph random_consistent_graph(gsfa::CounterRng& rng, Index n, double density = 0.5) {
  Matrix g = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    g(i, (i + 1) % n) = g((i + 1) % n, i) = 0.5 + rng.uniform();
    for (Index j = i + 2; j < n; ++j)
      if (rng.uniform() < density) g(i, j) = g(j, i) = rng.uniform();
  }
  const Vector v = g.rowwise().sum();
  return gsfa::TrainingGraph(v, g);
}

}  // namespace oracle
