#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "overlap/ph/persistence.hpp"

namespace overlap::uoo {

/// Schmidt entropy of z reshaped row-major to d1 x d2: with p_i = s_i^2 / sum
/// s^2, NS = -sum p_i ln p_i, in [0, ln min(d1, d2)]. Throws UndefinedError for
/// an all-zero z.
double ns_entropy(std::span<const double> z, std::size_t d1, std::size_t d2);

/// Fixed map from D to d1*d2 coordinates for NS when D != d1*d2: a random
/// matrix with orthonormal columns (or rows, when D > d1*d2) drawn from the
/// seed. Identity when the sizes agree.
class NsProjection {
 public:
  NsProjection(std::size_t latent, std::size_t d1, std::size_t d2, std::uint64_t seed);

  std::size_t d1() const { return d1_; }
  std::size_t d2() const { return d2_; }
  bool identity() const { return identity_; }
  std::vector<double> apply(std::span<const double> z) const;
  // NS of every row of a row-major [rows x D] block.
  std::vector<double> batch(std::span<const double> rows, std::size_t latent) const;

 private:
  std::size_t latent_, d1_, d2_;
  bool identity_;
  Eigen::MatrixXd map_;  // (d1*d2) x D
};

/// Sum of finite H1 lifetimes over (sum of finite H0 lifetimes + 1e-8).
double structural_tension(const ph::PersistenceDiagram& pd);

/// Sum of finite lifetimes of dimension `dim`.
double total_persistence(const ph::PersistenceDiagram& pd, int dim);

}  // namespace overlap::uoo
