#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <string>

#include "normprobe/error.hpp"
#include "normprobe/numerics/logistic.hpp"

namespace normprobe {

/// Rank-k factorization M ~ U diag(s) V^T with orthonormal factor columns and
/// nonincreasing singular values.
template <typename Scalar>
struct TruncatedSvd {
  Matrix<Scalar> left;             // m x k
  Vector<Scalar> singular_values;  // k
  Matrix<Scalar> right;            // n x k

  Matrix<Scalar> reconstruct() const {
    return left * singular_values.asDiagonal() * right.transpose();
  }
};

template <typename Derived>
TruncatedSvd<typename Derived::Scalar> truncated_svd(const Eigen::MatrixBase<Derived>& M,
                                                     Eigen::Index k) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index limit = std::min(M.rows(), M.cols());
  if (k < 1 || k > limit)
    throw ArgumentError("truncated_svd: k=" + std::to_string(k) + " outside [1, " +
                        std::to_string(limit) + "]");
  if (!M.allFinite()) throw NumericError("truncated_svd: matrix has non-finite entries");

  Eigen::BDCSVD<Matrix<Scalar>> svd(M.derived(), Eigen::ComputeThinU | Eigen::ComputeThinV);
  TruncatedSvd<Scalar> out;
  out.left = svd.matrixU().leftCols(k);
  out.singular_values = svd.singularValues().head(k);
  out.right = svd.matrixV().leftCols(k);
  return out;
}

/// All singular values of M, nonincreasing.
template <typename Derived>
Vector<typename Derived::Scalar> singular_values(const Eigen::MatrixBase<Derived>& M) {
  using Scalar = typename Derived::Scalar;
  Eigen::BDCSVD<Matrix<Scalar>> svd(M.derived());
  return svd.singularValues();
}

}  // namespace normprobe
