#pragma once

#include <functional>
#include <string>
#include <vector>

#include "overlap/autodiff/tensor.hpp"

namespace overlap::uoo {

using VectorField = std::function<ad::Tensor(const ad::Tensor& z, double t)>;

enum class OdeMethod { rk4, dopri };

std::string to_string(OdeMethod m);
OdeMethod ode_method_from_string(const std::string& s);

struct OdeOptions {
  double atol = 1e-6;
  double rtol = 1e-4;
  double min_step = 1e-12;
  std::size_t max_steps = 100000;
};

struct OdeSolution {
  std::vector<ad::Tensor> trajectory;  // state at every grid time
  std::size_t field_evals = 0;
  std::size_t accepted = 0;
  std::size_t rejected = 0;

  const ad::Tensor& final_state() const { return trajectory.back(); }
};

/// Evenly spaced grid of `points` times on [0, end].
std::vector<double> linspace(double end, std::size_t points);

/// Integrates dz/dt = f(z, t) through every grid time. rk4 takes one classic
/// step per grid interval; dopri adapts Dormand-Prince 5(4) steps inside each
/// interval and lands exactly on grid times. All arithmetic goes through
/// Tensor ops, so a surrounding tape differentiates the unrolled solver.
/// Throws StiffnessError when an adaptive step falls below min_step.
OdeSolution ode_integrate(const VectorField& f, const ad::Tensor& z0, const std::vector<double>& grid,
                          OdeMethod method, const OdeOptions& options = {});

}  // namespace overlap::uoo
