#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <string_view>
#include <vector>

#include "overlap/ph/point_cloud.hpp"

namespace overlap::ph {

using Vertex = std::uint32_t;
inline constexpr Vertex kNoVertex = std::numeric_limits<Vertex>::max();

/// Unordered vertex pair whose Euclidean distance realizes a filtration value.
/// Stored with a < b; both kNoVertex when the value is not an edge length.
struct Edge {
  Vertex a = kNoVertex;
  Vertex b = kNoVertex;
  bool valid() const { return a != kNoVertex; }
  friend bool operator==(const Edge&, const Edge&) = default;
};

struct Simplex {
  std::array<Vertex, 4> vertices{kNoVertex, kNoVertex, kNoVertex, kNoVertex};  // sorted, dim+1 used
  int dim = 0;
  double value = 0.0;
  Edge critical;  // Rips only

  std::span<const Vertex> verts() const { return {vertices.data(), static_cast<std::size_t>(dim + 1)}; }
};

enum class FiltrationKind { rips, witness, dtm };
std::string_view to_string(FiltrationKind kind);

/// Simplices sorted by (value, dim, vertex tuple). Every face precedes its
/// cofaces and values are non-negative. Homology is meaningful up to
/// `max_dim`; simplices of dimension max_dim + 1 are present to kill cycles.
struct Filtration {
  std::vector<Simplex> simplices;
  FiltrationKind kind = FiltrationKind::rips;
  std::size_t n_vertices = 0;
  int max_dim = 1;
  // True when every simplex of dimension >= 1 carries its critical edge.
  bool differentiable = false;
};

// Simplex budget shared by the explicit constructions; larger requests raise
// CapacityError instead of exhausting memory.
inline constexpr std::size_t kMaxSimplices = 30'000'000;

/// Vietoris-Rips filtration: a simplex enters at the largest pairwise distance
/// among its vertices. Includes every simplex up to dimension max_dim + 1 with
/// value <= max_scale (default: the cloud's enclosing-ball diameter, i.e. all).
/// Capacity: n <= 2048 for max_dim = 1, n <= 512 for max_dim = 2.
Filtration rips_filtration(const PointCloud& pc, int max_dim,
                           std::optional<double> max_scale = std::nullopt);

/// Max-min landmark selection starting at point 0.
std::vector<Vertex> maxmin_landmarks(const PointCloud& pc, std::size_t m);

/// Lazy witness filtration on m max-min landmarks. Witnesses are the
/// non-landmark points (all points when m = n). A landmark simplex enters at
///   2 * min_w max(0, max_{l in simplex} d(w, l) - d_nu(w))
/// where d_nu(w) is the distance from w to its nu-th nearest landmark (0 for
/// nu = 0). The factor 2 puts values on the diameter scale used by Rips.
/// Simplex vertices are indices into `pc`.
Filtration witness_filtration(const PointCloud& pc, std::size_t m, int max_dim = 1, int relaxation = 2);

/// Root-mean squared distance from each point to its k nearest other points.
std::vector<double> dtm_values(const PointCloud& pc, std::size_t k);

/// Distance-to-measure weighted Rips filtration: a simplex enters at the max
/// over its vertices of max(DTM(v), half of the pairwise distances).
Filtration dtm_filtration(const PointCloud& pc, std::size_t k, int max_dim);

}  // namespace overlap::ph
