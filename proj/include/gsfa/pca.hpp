#pragma once

#include <Eigen/Eigenvalues>

#include <string>

#include "gsfa/solver.hpp"

namespace gsfa {

struct PcaBasis {
  Vector mean;      // weighted mean, length I
  Matrix basis;     // I×k, orthonormal columns, descending variance
  Vector variances; // k

  Index input_dim() const { return basis.rows(); }
  Index output_dim() const { return basis.cols(); }
};

inline Matrix pca_project(const PcaBasis& p, const Matrix& x) {
  require(x.rows() == p.input_dim(), ErrorKind::dimension, "PCA input dimensionality mismatch");
  return p.basis.transpose() * (x.colwise() - p.mean);
}

inline Matrix pca_reconstruct(const PcaBasis& p, const Matrix& reduced) {
  require(reduced.rows() == p.output_dim(), ErrorKind::dimension, "PCA reduced dimensionality mismatch");
  return (p.basis * reduced).colwise() + p.mean;
}

struct PcaResult {
  PcaBasis basis;
  Matrix reduced;
};

/// Weighted-mean-centred principal components (weights v), keeping `out_dims`.
inline PcaResult pca_reduce(const Matrix& x, const Vector& v, Index out_dims) {
  check_data(x, v);
  require(out_dims >= 1 && out_dims <= std::min(x.rows(), x.cols() - 1), ErrorKind::parameter,
          "PCA output dimension must be in [1, min(I, N−1)] = [1, " +
              std::to_string(std::min(x.rows(), x.cols() - 1)) + "]");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sample_covariance(x, v));
  require(eig.info() == Eigen::Success, ErrorKind::singular, "PCA eigendecomposition failed");
  PcaResult r;
  r.basis.mean = weighted_mean(x, v);
  r.basis.basis = eig.eigenvectors().rowwise().reverse().leftCols(out_dims);
  r.basis.variances = eig.eigenvalues().reverse().head(out_dims).cwiseMax(0.0);
  for (Index j = 0; j < out_dims; ++j) {
    auto col = r.basis.basis.col(j);
    Index k = 0;
    col.cwiseAbs().maxCoeff(&k);
    if (col[k] < 0.0) col *= -1.0;
  }
  r.reduced = pca_project(r.basis, x);
  return r;
}

}  // namespace gsfa
