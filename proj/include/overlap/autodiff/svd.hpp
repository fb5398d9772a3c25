#pragma once

#include <Eigen/Dense>

#include "overlap/autodiff/tensor.hpp"

namespace overlap::ad {

/// Thin singular value decomposition m = U diag(S) V^T with k = min(rows, cols)
/// singular values, non-negative and sorted in descending order.
struct Svd {
  Eigen::MatrixXd u;  // rows x k, orthonormal columns
  Eigen::VectorXd s;  // k
  Eigen::MatrixXd v;  // cols x k, orthonormal columns
};

/// One-sided (Hestenes) Jacobi SVD. Accurate to a few ulps relative to the
/// largest singular value for the small matrices used here (<= 256 x 256).
/// Throws NumericError on non-finite input.
Svd jacobi_svd(const Eigen::MatrixXd& m);

struct SvdTensors {
  Tensor u;
  Tensor s;  // differentiable, see singular_values()
  Tensor v;
};

SvdTensors svd(const Tensor& m);

Eigen::MatrixXd to_matrix(const Tensor& t);
Tensor from_matrix(const Eigen::MatrixXd& m);

}  // namespace overlap::ad
