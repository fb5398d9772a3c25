#include "overlap/ph/point_cloud.hpp"

#include <algorithm>
#include <cmath>

#include "overlap/error.hpp"

namespace overlap::ph {

PointCloud::PointCloud(std::size_t n, std::size_t d, std::vector<double> coords)
    : n_(n), d_(d), coords_(std::move(coords)) {
  if (n_ < 1) throw ParameterError("point cloud needs at least one point");
  if (d_ < 1) throw ParameterError("point cloud needs ambient dimension >= 1");
  if (coords_.size() != n_ * d_) throw DimensionError("point cloud coordinate count does not match n*d");
  for (double c : coords_)
    if (!std::isfinite(c)) throw NumericError("point cloud has a non-finite coordinate");
}

PointCloud PointCloud::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw ParameterError("point cloud needs at least one point");
  const std::size_t d = rows.front().size();
  std::vector<double> coords;
  coords.reserve(rows.size() * d);
  for (const auto& r : rows) {
    if (r.size() != d) throw DimensionError("point cloud rows have differing lengths");
    coords.insert(coords.end(), r.begin(), r.end());
  }
  return PointCloud(rows.size(), d, std::move(coords));
}

double PointCloud::distance(std::size_t i, std::size_t j) const {
  double s = 0.0;
  const double* a = coords_.data() + i * d_;
  const double* b = coords_.data() + j * d_;
  for (std::size_t k = 0; k < d_; ++k) {
    const double t = a[k] - b[k];
    s += t * t;
  }
  return std::sqrt(s);
}

std::vector<double> PointCloud::distance_matrix() const {
  std::vector<double> dm(n_ * n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = i + 1; j < n_; ++j) dm[i * n_ + j] = dm[j * n_ + i] = distance(i, j);
  return dm;
}

double PointCloud::enclosing_ball_diameter() const {
  std::vector<double> centroid(d_, 0.0);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t k = 0; k < d_; ++k) centroid[k] += coords_[i * d_ + k];
  for (double& c : centroid) c /= static_cast<double>(n_);
  double r = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < d_; ++k) s += (coords_[i * d_ + k] - centroid[k]) * (coords_[i * d_ + k] - centroid[k]);
    r = std::max(r, std::sqrt(s));
  }
  return 2.0 * r;
}

PointCloud PointCloud::scaled(double factor) const {
  std::vector<double> c = coords_;
  for (double& v : c) v *= factor;
  return PointCloud(n_, d_, std::move(c));
}

}  // namespace overlap::ph
