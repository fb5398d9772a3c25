#include "overlap/uoo/metrics.hpp"

#include <cmath>
#include <random>

#include "overlap/autodiff/svd.hpp"
#include "overlap/error.hpp"

namespace overlap::uoo {

double ns_entropy(std::span<const double> z, std::size_t d1, std::size_t d2) {
  if (z.size() != d1 * d2) {
    throw DimensionError("ns_entropy: " + std::to_string(z.size()) + " values cannot reshape to " +
                         std::to_string(d1) + "x" + std::to_string(d2));
  }
  Eigen::MatrixXd m(d1, d2);
  double norm2 = 0.0;
  for (std::size_t i = 0; i < d1; ++i)
    for (std::size_t j = 0; j < d2; ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = z[i * d2 + j];
      norm2 += z[i * d2 + j] * z[i * d2 + j];
    }
  if (norm2 == 0.0) throw UndefinedError("ns_entropy of the zero vector is undefined");
  const auto s = ad::jacobi_svd(m).s;
  const double total = s.squaredNorm();
  double h = 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    const double p = s(i) * s(i) / total;
    if (p > 0.0) h -= p * std::log(p);
  }
  return std::max(h, 0.0);
}

NsProjection::NsProjection(std::size_t latent, std::size_t d1, std::size_t d2, std::uint64_t seed)
    : latent_(latent), d1_(d1), d2_(d2), identity_(latent == d1 * d2) {
  if (latent == 0 || d1 == 0 || d2 == 0) throw ParameterError("NS projection dimensions must be positive");
  if (identity_) return;
  const auto rows = static_cast<Eigen::Index>(d1 * d2), cols = static_cast<Eigen::Index>(latent);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  const Eigen::Index tall = std::max(rows, cols), wide = std::min(rows, cols);
  Eigen::MatrixXd a(tall, wide);
  for (Eigen::Index j = 0; j < wide; ++j)
    for (Eigen::Index i = 0; i < tall; ++i) a(i, j) = g(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(tall, wide);
  map_ = rows >= cols ? q : Eigen::MatrixXd(q.transpose());
}

std::vector<double> NsProjection::apply(std::span<const double> z) const {
  if (z.size() != latent_) throw DimensionError("NS projection: expected " + std::to_string(latent_) + " values");
  if (identity_) return {z.begin(), z.end()};
  Eigen::Map<const Eigen::VectorXd> v(z.data(), static_cast<Eigen::Index>(z.size()));
  Eigen::VectorXd out = map_ * v;
  return {out.data(), out.data() + out.size()};
}

std::vector<double> NsProjection::batch(std::span<const double> rows, std::size_t latent) const {
  if (latent != latent_ || rows.size() % latent != 0) throw DimensionError("NS batch: bad row layout");
  std::vector<double> out;
  for (std::size_t r = 0; r < rows.size() / latent; ++r) {
    out.push_back(ns_entropy(apply(rows.subspan(r * latent, latent)), d1_, d2_));
  }
  return out;
}

double total_persistence(const ph::PersistenceDiagram& pd, int dim) { return pd.total_persistence(dim); }

double structural_tension(const ph::PersistenceDiagram& pd) {
  return pd.total_persistence(1) / (pd.total_persistence(0) + 1e-8);
}

}  // namespace overlap::uoo
