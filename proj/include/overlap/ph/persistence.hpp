#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "overlap/ph/filtration.hpp"

namespace overlap::ph {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct Feature {
  int dim = 0;
  double birth = 0.0;
  double death = kInfinity;
  Edge birth_edge;  // invalid for vertices (birth of a component)
  Edge death_edge;  // invalid for essential features

  bool essential() const { return std::isinf(death); }
  double lifetime() const { return death - birth; }
  friend bool operator==(const Feature&, const Feature&) = default;
};

/// Persistence pairs of a filtration, in the order the reduction produced them
/// (finite pairs ordered by destroying simplex, then essential features).
struct PersistenceDiagram {
  std::vector<Feature> features;
  int max_dim = 1;
  bool differentiable = false;  // critical edges recorded

  std::vector<Feature> of_dim(int dim) const;
  // Sum of finite lifetimes in dimension `dim`.
  double total_persistence(int dim) const;
  double max_finite_lifetime(int dim) const;
  std::size_t count(int dim, bool include_essential = true) const;
};

enum class Reduction {
  standard,  // every column reduced in filtration order
  clearing,  // twist: high dimensions first, positive columns zeroed
};

/// Z/2 boundary-matrix column reduction. Zero-length pairs are dropped.
PersistenceDiagram compute_persistence(const Filtration& f, Reduction algorithm = Reduction::clearing);

/// Gradient with respect to the cloud coordinates (n*d, row-major) of
/// sum_f weights[f] * lifetime(f), where `weights` has one entry per feature of
/// `pd`. Each finite death (and each birth of dim >= 1) differentiates through
/// its critical edge length. Essential features and features with lifetime
/// below `eps_min` contribute nothing. Throws StateError when `pd` lacks
/// critical edges.
std::vector<double> lifetime_gradient(const PersistenceDiagram& pd, const PointCloud& pc,
                                      std::span<const double> weights, double eps_min);

/// Per-coordinate partial derivative of every feature's lifetime, summed with
/// unit weight over features of dimension `dim`.
std::vector<double> diagram_gradients(const PersistenceDiagram& pd, const PointCloud& pc, int dim,
                                      double eps_min = 1e-4);

}  // namespace overlap::ph
