#include "overlap/autodiff/svd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "overlap/autodiff/ops.hpp"
#include "overlap/error.hpp"

namespace overlap::ad {

namespace {

constexpr int kMaxSweeps = 80;
constexpr double kOrthTol = 1e-15;

// Orthogonalizes the columns of `a` in place; `v` accumulates the rotations.
void hestenes(Eigen::MatrixXd& a, Eigen::MatrixXd& v) {
  const Eigen::Index n = a.cols();
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (Eigen::Index p = 0; p + 1 < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double alpha = a.col(p).squaredNorm();
        const double beta = a.col(q).squaredNorm();
        const double gamma = a.col(p).dot(a.col(q));
        if (gamma == 0.0 || std::abs(gamma) <= kOrthTol * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (Eigen::Index i = 0; i < a.rows(); ++i) {
          const double ap = a(i, p), aq = a(i, q);
          a(i, p) = c * ap - s * aq;
          a(i, q) = s * ap + c * aq;
        }
        for (Eigen::Index i = 0; i < v.rows(); ++i) {
          const double vp = v(i, p), vq = v(i, q);
          v(i, p) = c * vp - s * vq;
          v(i, q) = s * vp + c * vq;
        }
      }
    }
    if (!rotated) return;
  }
}

// Replaces columns flagged in `missing` by unit vectors orthogonal to the rest.
void complete_basis(Eigen::MatrixXd& u, const std::vector<bool>& missing) {
  const Eigen::Index rows = u.rows();
  Eigen::Index candidate = 0;
  for (Eigen::Index j = 0; j < u.cols(); ++j) {
    if (!missing[static_cast<std::size_t>(j)]) continue;
    while (candidate < rows) {
      Eigen::VectorXd e = Eigen::VectorXd::Unit(rows, candidate++);
      for (int pass = 0; pass < 2; ++pass) {
        for (Eigen::Index k = 0; k < u.cols(); ++k) {
          if (k == j || (missing[static_cast<std::size_t>(k)] && k > j)) continue;
          e -= u.col(k).dot(e) * u.col(k);
        }
      }
      const double norm = e.norm();
      if (norm > 1e-8) {
        u.col(j) = e / norm;
        break;
      }
    }
  }
}

Svd tall_svd(const Eigen::MatrixXd& m) {
  Eigen::MatrixXd a = m;
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(m.cols(), m.cols());
  hestenes(a, v);

  const Eigen::Index k = m.cols();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(k));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  Eigen::VectorXd norms(k);
  for (Eigen::Index j = 0; j < k; ++j) norms(j) = a.col(j).norm();
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index x, Eigen::Index y) { return norms(x) > norms(y); });

  Svd out{Eigen::MatrixXd(m.rows(), k), Eigen::VectorXd(k), Eigen::MatrixXd(m.cols(), k)};
  const double smax = k > 0 ? norms(order[0]) : 0.0;
  std::vector<bool> missing(static_cast<std::size_t>(k), false);
  for (Eigen::Index j = 0; j < k; ++j) {
    const Eigen::Index src = order[static_cast<std::size_t>(j)];
    out.s(j) = norms(src);
    out.v.col(j) = v.col(src);
    if (norms(src) > 1e-300 && norms(src) > smax * 1e-15) {
      out.u.col(j) = a.col(src) / norms(src);
    } else {
      out.u.col(j).setZero();
      missing[static_cast<std::size_t>(j)] = true;
    }
  }
  complete_basis(out.u, missing);
  return out;
}

}  // namespace

Svd jacobi_svd(const Eigen::MatrixXd& m) {
  if (!m.allFinite()) throw NumericError("svd: input contains non-finite entries");
  if (m.rows() >= m.cols()) return tall_svd(m);
  Svd t = tall_svd(m.transpose());
  return Svd{std::move(t.v), std::move(t.s), std::move(t.u)};
}

Eigen::MatrixXd to_matrix(const Tensor& t) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(t.rows()), static_cast<Eigen::Index>(t.cols()));
  for (std::size_t r = 0; r < t.rows(); ++r)
    for (std::size_t c = 0; c < t.cols(); ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = t.at(r, c);
  return m;
}

Tensor from_matrix(const Eigen::MatrixXd& m) {
  std::vector<double> data(static_cast<std::size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      data[static_cast<std::size_t>(r * m.cols() + c)] = m(r, c);
  return Tensor::constant({static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols())},
                          std::move(data));
}

SvdTensors svd(const Tensor& m) {
  if (m.rank() != 2) throw DimensionError("svd expects a rank-2 tensor, got " + shape_string(m.shape()));
  Svd dec = jacobi_svd(to_matrix(m));
  return SvdTensors{from_matrix(dec.u), singular_values(m), from_matrix(dec.v)};
}

}  // namespace overlap::ad
