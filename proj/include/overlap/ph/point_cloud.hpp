#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace overlap::ph {

/// n points in R^d, row-major. Coordinates are finite and n >= 1.
class PointCloud {
 public:
  PointCloud() = default;
  PointCloud(std::size_t n, std::size_t d, std::vector<double> coords);
  static PointCloud from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t size() const { return n_; }
  std::size_t dim() const { return d_; }
  std::span<const double> point(std::size_t i) const { return {coords_.data() + i * d_, d_}; }
  std::span<const double> coords() const { return coords_; }

  double distance(std::size_t i, std::size_t j) const;
  // Full n x n Euclidean distance matrix, row-major.
  std::vector<double> distance_matrix() const;
  // Diameter of the centroid-centred ball enclosing every point; no pairwise
  // distance exceeds it.
  double enclosing_ball_diameter() const;

  PointCloud scaled(double factor) const;

 private:
  std::size_t n_ = 0;
  std::size_t d_ = 0;
  std::vector<double> coords_;
};

}  // namespace overlap::ph
