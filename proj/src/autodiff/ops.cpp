#include "overlap/autodiff/ops.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "overlap/autodiff/svd.hpp"
#include "overlap/error.hpp"

namespace overlap::ad {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMatrix>;
using Map = Eigen::Map<RowMatrix>;

ConstMap as_matrix(std::span<const double> data, std::size_t rows, std::size_t cols) {
  return ConstMap(data.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
}

Map as_matrix(std::span<double> data, std::size_t rows, std::size_t cols) {
  return Map(data.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
}

void require_rank2(const Tensor& t, const char* op) {
  if (t.rank() != 2) {
    throw DimensionError(std::string(op) + ": expected rank-2 tensor, got " + shape_string(t.shape()));
  }
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw DimensionError(std::string(op) + ": shape mismatch " + shape_string(a.shape()) + " vs " +
                         shape_string(b.shape()));
  }
}

bool wants(const NodePtr& n) { return n->requires_grad; }

template <typename F>
Tensor unary(const Tensor& a, F&& value_and_slope) {
  const auto in = a.data();
  std::vector<double> out(in.size());
  std::vector<double> slope(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) {
    auto [v, s] = value_and_slope(in[i]);
    out[i] = v;
    slope[i] = s;
  }
  return Tensor::from_op(a.shape(), std::move(out), {a}, [slope = std::move(slope)](Node& self) {
    auto& x = self.inputs[0];
    if (!wants(x)) return;
    auto g = x->grad_buffer();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * slope[i];
  });
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  require_rank2(a, "matmul");
  require_rank2(b, "matmul");
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  if (b.rows() != k) {
    throw DimensionError("matmul: inner dimensions disagree " + shape_string(a.shape()) + " x " +
                         shape_string(b.shape()));
  }
  std::vector<double> out(m * n);
  as_matrix(std::span<double>(out), m, n).noalias() = as_matrix(a.data(), m, k) * as_matrix(b.data(), k, n);
  return Tensor::from_op({m, n}, std::move(out), {a, b}, [m, k, n](Node& self) {
    auto& an = self.inputs[0];
    auto& bn = self.inputs[1];
    auto g = as_matrix(std::span<const double>(self.grad), m, n);
    if (wants(an)) as_matrix(an->grad_buffer(), m, k).noalias() += g * as_matrix(std::span<const double>(bn->data), k, n).transpose();
    if (wants(bn)) as_matrix(bn->grad_buffer(), k, n).noalias() += as_matrix(std::span<const double>(an->data), m, k).transpose() * g;
  });
}

Tensor transpose(const Tensor& a) {
  require_rank2(a, "transpose");
  const std::size_t m = a.rows(), n = a.cols();
  std::vector<double> out(m * n);
  as_matrix(std::span<double>(out), n, m) = as_matrix(a.data(), m, n).transpose();
  return Tensor::from_op({n, m}, std::move(out), {a}, [m, n](Node& self) {
    auto& x = self.inputs[0];
    if (!wants(x)) return;
    as_matrix(x->grad_buffer(), m, n) += as_matrix(std::span<const double>(self.grad), n, m).transpose();
  });
}

Tensor add(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "add");
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] + b.data()[i];
  return Tensor::from_op(a.shape(), std::move(out), {a, b}, [](Node& self) {
    for (auto& in : self.inputs) {
      if (!wants(in)) continue;
      auto g = in->grad_buffer();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
    }
  });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "sub");
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] - b.data()[i];
  return Tensor::from_op(a.shape(), std::move(out), {a, b}, [](Node& self) {
    if (wants(self.inputs[0])) {
      auto g = self.inputs[0]->grad_buffer();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
    }
    if (wants(self.inputs[1])) {
      auto g = self.inputs[1]->grad_buffer();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] -= self.grad[i];
    }
  });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "mul");
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] * b.data()[i];
  return Tensor::from_op(a.shape(), std::move(out), {a, b}, [](Node& self) {
    auto& an = self.inputs[0];
    auto& bn = self.inputs[1];
    if (wants(an)) {
      auto g = an->grad_buffer();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * bn->data[i];
    }
    if (wants(bn)) {
      auto g = bn->grad_buffer();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * an->data[i];
    }
  });
}

Tensor scale(const Tensor& a, double factor) {
  return unary(a, [factor](double x) { return std::pair{x * factor, factor}; });
}

Tensor add_bias(const Tensor& a, const Tensor& bias) {
  require_rank2(a, "add_bias");
  const std::size_t m = a.rows(), n = a.cols();
  if (bias.size() != n) {
    throw DimensionError("add_bias: bias of shape " + shape_string(bias.shape()) +
                         " does not broadcast over " + shape_string(a.shape()));
  }
  std::vector<double> out(a.data().begin(), a.data().end());
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t c = 0; c < n; ++c) out[r * n + c] += bias.data()[c];
  return Tensor::from_op(a.shape(), std::move(out), {a, bias}, [m, n](Node& self) {
    if (wants(self.inputs[0])) {
      auto g = self.inputs[0]->grad_buffer();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
    }
    if (wants(self.inputs[1])) {
      auto g = self.inputs[1]->grad_buffer();
      for (std::size_t r = 0; r < m; ++r)
        for (std::size_t c = 0; c < n; ++c) g[c] += self.grad[r * n + c];
    }
  });
}

Tensor silu(const Tensor& a) {
  return unary(a, [](double x) {
    const double s = 1.0 / (1.0 + std::exp(-x));
    return std::pair{x * s, s * (1.0 + x * (1.0 - s))};
  });
}

Tensor sigmoid(const Tensor& a) {
  return unary(a, [](double x) {
    const double s = 1.0 / (1.0 + std::exp(-x));
    return std::pair{s, s * (1.0 - s)};
  });
}

Tensor square(const Tensor& a) {
  return unary(a, [](double x) { return std::pair{x * x, 2.0 * x}; });
}

Tensor sum(const Tensor& a) {
  double total = 0.0;
  for (double v : a.data()) total += v;
  return Tensor::from_op({1}, {total}, {a}, [](Node& self) {
    auto& x = self.inputs[0];
    if (!wants(x)) return;
    auto g = x->grad_buffer();
    for (double& v : g) v += self.grad[0];
  });
}

Tensor mean(const Tensor& a) {
  if (a.size() == 0) throw DimensionError("mean of an empty tensor");
  return scale(sum(a), 1.0 / static_cast<double>(a.size()));
}

Tensor concat(const Tensor& a, const Tensor& b) {
  if (a.rank() == 1 && b.rank() == 1) {
    std::vector<double> out(a.data().begin(), a.data().end());
    out.insert(out.end(), b.data().begin(), b.data().end());
    const std::size_t na = a.size();
    return Tensor::from_op({out.size()}, std::move(out), {a, b}, [na](Node& self) {
      if (wants(self.inputs[0])) {
        auto g = self.inputs[0]->grad_buffer();
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
      }
      if (wants(self.inputs[1])) {
        auto g = self.inputs[1]->grad_buffer();
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[na + i];
      }
    });
  }
  require_rank2(a, "concat");
  require_rank2(b, "concat");
  if (a.rows() != b.rows()) {
    throw DimensionError("concat: row counts differ " + shape_string(a.shape()) + " vs " +
                         shape_string(b.shape()));
  }
  const std::size_t m = a.rows(), na = a.cols(), nb = b.cols(), n = na + nb;
  std::vector<double> out(m * n);
  for (std::size_t r = 0; r < m; ++r) {
    std::copy_n(a.data().begin() + static_cast<std::ptrdiff_t>(r * na), na, out.begin() + static_cast<std::ptrdiff_t>(r * n));
    std::copy_n(b.data().begin() + static_cast<std::ptrdiff_t>(r * nb), nb,
                out.begin() + static_cast<std::ptrdiff_t>(r * n + na));
  }
  return Tensor::from_op({m, n}, std::move(out), {a, b}, [m, na, nb, n](Node& self) {
    if (wants(self.inputs[0])) {
      auto g = self.inputs[0]->grad_buffer();
      for (std::size_t r = 0; r < m; ++r)
        for (std::size_t c = 0; c < na; ++c) g[r * na + c] += self.grad[r * n + c];
    }
    if (wants(self.inputs[1])) {
      auto g = self.inputs[1]->grad_buffer();
      for (std::size_t r = 0; r < m; ++r)
        for (std::size_t c = 0; c < nb; ++c) g[r * nb + c] += self.grad[r * n + na + c];
    }
  });
}

Tensor reshape(const Tensor& a, Shape shape) {
  if (shape_size(shape) != a.size()) {
    throw DimensionError("reshape: cannot view " + shape_string(a.shape()) + " as " + shape_string(shape));
  }
  std::vector<double> out(a.data().begin(), a.data().end());
  return Tensor::from_op(std::move(shape), std::move(out), {a}, [](Node& self) {
    auto& x = self.inputs[0];
    if (!wants(x)) return;
    auto g = x->grad_buffer();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
  });
}

Tensor outer_rows(const Tensor& x, const Tensor& y) {
  require_rank2(x, "outer_rows");
  require_rank2(y, "outer_rows");
  if (x.rows() != y.rows()) throw DimensionError("outer_rows: batch sizes differ");
  const std::size_t b = x.rows(), d1 = x.cols(), d2 = y.cols();
  std::vector<double> out(b * d1 * d2);
  for (std::size_t r = 0; r < b; ++r) {
    const double* xr = x.data().data() + r * d1;
    const double* yr = y.data().data() + r * d2;
    double* o = out.data() + r * d1 * d2;
    for (std::size_t i = 0; i < d1; ++i)
      for (std::size_t j = 0; j < d2; ++j) o[i * d2 + j] = xr[i] * yr[j];
  }
  return Tensor::from_op({b, d1 * d2}, std::move(out), {x, y}, [b, d1, d2](Node& self) {
    auto& xn = self.inputs[0];
    auto& yn = self.inputs[1];
    for (std::size_t r = 0; r < b; ++r) {
      auto g = as_matrix(std::span<const double>(self.grad).subspan(r * d1 * d2, d1 * d2), d1, d2);
      if (wants(xn)) {
        Eigen::Map<Eigen::VectorXd> gx(xn->grad_buffer().data() + r * d1, static_cast<Eigen::Index>(d1));
        gx.noalias() += g * Eigen::Map<const Eigen::VectorXd>(yn->data.data() + r * d2, static_cast<Eigen::Index>(d2));
      }
      if (wants(yn)) {
        Eigen::Map<Eigen::VectorXd> gy(yn->grad_buffer().data() + r * d2, static_cast<Eigen::Index>(d2));
        gy.noalias() +=
            g.transpose() * Eigen::Map<const Eigen::VectorXd>(xn->data.data() + r * d1, static_cast<Eigen::Index>(d1));
      }
    }
  });
}

Tensor normalize_rows(const Tensor& a) {
  require_rank2(a, "normalize_rows");
  const std::size_t m = a.rows(), n = a.cols();
  std::vector<double> out(m * n);
  std::vector<double> norms(m);
  for (std::size_t r = 0; r < m; ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < n; ++c) s += a.data()[r * n + c] * a.data()[r * n + c];
    norms[r] = std::max(std::sqrt(s), 1e-12);
    for (std::size_t c = 0; c < n; ++c) out[r * n + c] = a.data()[r * n + c] / norms[r];
  }
  auto result_values = out;
  return Tensor::from_op({m, n}, std::move(out), {a},
                         [m, n, norms = std::move(norms), y = std::move(result_values)](Node& self) {
                           auto& x = self.inputs[0];
                           if (!wants(x)) return;
                           auto g = x->grad_buffer();
                           for (std::size_t r = 0; r < m; ++r) {
                             double dot = 0.0;
                             for (std::size_t c = 0; c < n; ++c) dot += self.grad[r * n + c] * y[r * n + c];
                             for (std::size_t c = 0; c < n; ++c)
                               g[r * n + c] += (self.grad[r * n + c] - dot * y[r * n + c]) / norms[r];
                           }
                         });
}

Tensor bce_with_logits(const Tensor& logits, std::span<const double> labels) {
  if (logits.size() != labels.size()) {
    throw DimensionError("bce_with_logits: " + std::to_string(logits.size()) + " logits for " +
                         std::to_string(labels.size()) + " labels");
  }
  const std::size_t n = labels.size();
  double total = 0.0;
  std::vector<double> slope(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double z = logits.data()[i];
    const double y = labels[i];
    // log(1 + e^z) - y z, evaluated without overflow.
    total += std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))) - y * z;
    slope[i] = (1.0 / (1.0 + std::exp(-z)) - y) / static_cast<double>(n);
  }
  return Tensor::from_op({1}, {total / static_cast<double>(n)}, {logits},
                         [slope = std::move(slope)](Node& self) {
                           auto& x = self.inputs[0];
                           if (!wants(x)) return;
                           auto g = x->grad_buffer();
                           for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[0] * slope[i];
                         });
}

Tensor diagonal_cross_entropy(const Tensor& logits) {
  require_rank2(logits, "diagonal_cross_entropy");
  const std::size_t n = logits.rows();
  if (logits.cols() != n) throw DimensionError("diagonal_cross_entropy: logits must be square");
  std::vector<double> softmax(n * n);
  double total = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    const double* row = logits.data().data() + r * n;
    const double mx = *std::max_element(row, row + n);
    double z = 0.0;
    for (std::size_t c = 0; c < n; ++c) z += std::exp(row[c] - mx);
    for (std::size_t c = 0; c < n; ++c) softmax[r * n + c] = std::exp(row[c] - mx) / z;
    total += -(row[r] - mx - std::log(z));
  }
  return Tensor::from_op({1}, {total / static_cast<double>(n)}, {logits},
                         [n, softmax = std::move(softmax)](Node& self) {
                           auto& x = self.inputs[0];
                           if (!wants(x)) return;
                           auto g = x->grad_buffer();
                           const double w = self.grad[0] / static_cast<double>(n);
                           for (std::size_t r = 0; r < n; ++r)
                             for (std::size_t c = 0; c < n; ++c)
                               g[r * n + c] += w * (softmax[r * n + c] - (r == c ? 1.0 : 0.0));
                         });
}

Tensor singular_values(const Tensor& m) {
  require_rank2(m, "singular_values");
  Svd dec = jacobi_svd(to_matrix(m));
  const auto k = static_cast<std::size_t>(dec.s.size());
  std::vector<double> s(dec.s.data(), dec.s.data() + k);
  const std::size_t rows = m.rows(), cols = m.cols();
  return Tensor::from_op({k}, s, {m}, [rows, cols, dec = std::move(dec)](Node& self) {
    auto& x = self.inputs[0];
    if (!wants(x)) return;
    const auto k = static_cast<std::size_t>(dec.s.size());
    // Equal singular values make individual u_i v_i^T ill defined; spread the
    // group's mean gradient symmetrically over the group.
    std::vector<double> g(self.grad.begin(), self.grad.end());
    const double tol = 1e-12 * std::max(1.0, dec.s.size() ? dec.s(0) : 0.0);
    for (std::size_t i = 0; i < k;) {
      std::size_t j = i + 1;
      while (j < k && std::abs(dec.s(static_cast<Eigen::Index>(i)) - dec.s(static_cast<Eigen::Index>(j))) <= tol) ++j;
      if (j - i > 1) {
        double avg = 0.0;
        for (std::size_t t = i; t < j; ++t) avg += g[t];
        avg /= static_cast<double>(j - i);
        for (std::size_t t = i; t < j; ++t) g[t] = avg;
      }
      i = j;
    }
    auto gm = as_matrix(x->grad_buffer(), rows, cols);
    for (std::size_t i = 0; i < k; ++i) {
      const auto idx = static_cast<Eigen::Index>(i);
      gm += g[i] * dec.u.col(idx) * dec.v.col(idx).transpose();
    }
  });
}

Tensor linear(const Tensor& x, const Tensor& weight, const Tensor& bias) {
  return add_bias(matmul(x, weight), bias);
}

}  // namespace overlap::ad
