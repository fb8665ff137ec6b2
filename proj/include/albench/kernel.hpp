#pragma once

#include <cmath>
#include <stdexcept>

#include "albench/dataset.hpp"

namespace albench {

// K(a,b) = exp(-gamma * ||a-b||^2). Distances are accumulated from explicit
// differences, so K(A,A) is exactly symmetric with a unit diagonal.
inline Matrix rbf_kernel(const Matrix& A, const Matrix& B, double gamma) {
  if (A.cols() != B.cols()) throw std::invalid_argument("rbf_kernel: column mismatch");
  Matrix K(A.rows(), B.rows());
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < B.rows(); ++j) K(i, j) = std::exp(-gamma * (A.row(i) - B.row(j)).squaredNorm());
  return K;
}

inline Matrix rbf_gram(const Matrix& A, double gamma) {
  const Eigen::Index n = A.rows();
  Matrix K(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    K(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < n; ++j) K(i, j) = K(j, i) = std::exp(-gamma * (A.row(i) - A.row(j)).squaredNorm());
  }
  return K;
}

inline Matrix symmetrize(const Matrix& K) { return (K + K.transpose()) / 2.0; }

inline Matrix squared_distances(const Matrix& A, const Matrix& B) {
  Matrix D(A.rows(), B.rows());
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < B.rows(); ++j) D(i, j) = (A.row(i) - B.row(j)).squaredNorm();
  return D;
}

}  // namespace albench
