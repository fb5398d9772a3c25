#pragma once

#include <cstdint>

#include "overlap/synth/dataset.hpp"

namespace overlap::synth {

enum class Modality { x, y, both };

/// L2-regularized logistic regression (Newton steps) on raw features of one
/// modality, or both concatenated. Test accuracy on a seeded 70/30 split.
double linear_probe(const Dataset& ds, Modality which, std::uint64_t seed);

/// Kernel ridge classifier with kernel (x.x')(y.y') + 1, i.e. ridge on the
/// bilinear features x y^T. Test accuracy on a seeded 70/30 split.
double bilinear_probe(const Dataset& ds, std::uint64_t seed);

struct CeilingOptions {
  std::size_t hidden = 32;
  int epochs = 300;
  double learning_rate = 1e-2;
};

/// Test accuracy of the additive model f(x) + g(y) (two independent
/// one-hidden-layer MLPs summed into one logit, trained by BCE), never below
/// the test majority rate. Needs n >= 200.
double separable_ceiling(const Dataset& ds, std::uint64_t seed, const CeilingOptions& options = {});

}  // namespace overlap::synth
