#pragma once

#include <span>

#include "overlap/autodiff/tensor.hpp"

// Differentiable operations on Tensor. Shapes are checked eagerly and a
// mismatch raises DimensionError. Every op registers a backward rule when it is
// recorded on a tape.
namespace overlap::ad {

Tensor matmul(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& a);

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double factor);
// a: [rows x n], bias: n elements, broadcast over rows.
Tensor add_bias(const Tensor& a, const Tensor& bias);

Tensor silu(const Tensor& a);
Tensor sigmoid(const Tensor& a);
Tensor square(const Tensor& a);

Tensor sum(const Tensor& a);
Tensor mean(const Tensor& a);

// Concatenates rank-1 tensors end to end, or rank-2 tensors along columns.
Tensor concat(const Tensor& a, const Tensor& b);
Tensor reshape(const Tensor& a, Shape shape);

// Row-wise outer product: out[b, i*d2 + j] = x[b, i] * y[b, j].
Tensor outer_rows(const Tensor& x, const Tensor& y);
// Rows scaled to unit Euclidean norm.
Tensor normalize_rows(const Tensor& a);

// Mean binary cross entropy of logits (any shape with one entry per label)
// against 0/1 labels.
Tensor bce_with_logits(const Tensor& logits, std::span<const double> labels);
// Mean over rows of -log softmax(row)[row index]; logits must be square.
Tensor diagonal_cross_entropy(const Tensor& logits);

// Singular values (descending) of a rank-2 tensor. The gradient is
// U diag(g) V^T, with the incoming gradient averaged over each group of equal
// singular values.
Tensor singular_values(const Tensor& m);

Tensor linear(const Tensor& x, const Tensor& weight, const Tensor& bias);

}  // namespace overlap::ad
