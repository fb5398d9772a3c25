#pragma once

#include <vector>

#include "overlap/ph/persistence.hpp"

namespace overlap::ph {

struct BottleneckResult {
  double distance = 0.0;
  // Set when the diagrams disagree on the number of essential features; the
  // distance is then +inf.
  bool essential_mismatch = false;
};

/// Bottleneck distance between the dimension-`dim` parts of two diagrams under
/// the L-infinity ground metric; a point may be matched to the diagonal at cost
/// half its lifetime. Essential features are matched only among themselves
/// (by birth). Computed by binary search over the candidate costs with a
/// Hopcroft-Karp feasibility check.
BottleneckResult bottleneck(const PersistenceDiagram& a, const PersistenceDiagram& b, int dim);
double bottleneck_distance(const PersistenceDiagram& a, const PersistenceDiagram& b, int dim);

/// Finite-point version used by the above; each pair is (birth, death).
double bottleneck_finite(const std::vector<std::pair<double, double>>& a,
                         const std::vector<std::pair<double, double>>& b);

/// Topological structural alignment score: bottleneck distance between the
/// H1 diagrams of the Rips filtrations of the two clouds, normalized by the
/// largest distance of any H1 point to the diagonal (half its lifetime).
/// Lies in [0, 1]; 0 when both H1 diagrams are empty.
double tsas(const PointCloud& traj_a, const PointCloud& traj_b);
double tsas(const PersistenceDiagram& a, const PersistenceDiagram& b);

}  // namespace overlap::ph
