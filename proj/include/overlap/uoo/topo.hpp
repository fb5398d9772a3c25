#pragma once

#include "overlap/autodiff/tensor.hpp"
#include "overlap/ph/persistence.hpp"

namespace overlap::uoo {

struct TopoOptions {
  double lambda = 1.0;
  double eps_min = 1e-4;
  int max_dim = 1;  // 2 adds the void term
  ph::Reduction reduction = ph::Reduction::clearing;
};

struct TopoResult {
  ad::Tensor loss;               // scalar, differentiable in the batch coordinates
  ph::PersistenceDiagram diagram;
  double h0_squared = 0.0;       // sum of squared finite H0 lifetimes kept
  double higher_squared = 0.0;   // same for H1 (and H2)
  std::vector<double> gradient;  // d loss / d z, row-major like z
};

/// sum(H0 lifetimes^2) - lambda * sum(H1 [+ H2] lifetimes^2) over the Rips
/// diagram of the rows of z, ignoring features shorter than eps_min.
/// Throws InsufficientPointsError for fewer than 4 rows.
TopoResult topo_loss(const ad::Tensor& z, const TopoOptions& options = {});

/// task + alpha * topo. With alpha = 0 the result is `task` itself and `topo`
/// may be left undefined.
ad::Tensor total_loss(const ad::Tensor& task, const ad::Tensor& topo, double alpha);

}  // namespace overlap::uoo
