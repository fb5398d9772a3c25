#include "overlap/uoo/ode.hpp"

#include <algorithm>
#include <cmath>

#include "overlap/autodiff/ops.hpp"
#include "overlap/error.hpp"

namespace overlap::uoo {

using ad::Tensor;

std::string to_string(OdeMethod m) { return m == OdeMethod::rk4 ? "rk4" : "dopri"; }

OdeMethod ode_method_from_string(const std::string& s) {
  if (s == "rk4") return OdeMethod::rk4;
  if (s == "dopri" || s == "dopri5") return OdeMethod::dopri;
  throw ParameterError("unknown ODE method '" + s + "'");
}

std::vector<double> linspace(double end, std::size_t points) {
  if (points < 2) throw ParameterError("linspace needs at least two points");
  std::vector<double> t(points);
  for (std::size_t i = 0; i < points; ++i) t[i] = end * static_cast<double>(i) / static_cast<double>(points - 1);
  t.back() = end;
  return t;
}

namespace {

// z + sum_k c_k * k_k, skipping zero coefficients.
Tensor combine(const Tensor& z, double h, std::initializer_list<std::pair<double, const Tensor*>> terms) {
  Tensor acc;
  for (const auto& [c, k] : terms) {
    if (c == 0.0) continue;
    auto term = ad::scale(*k, h * c);
    acc = acc.defined() ? ad::add(acc, term) : term;
  }
  return acc.defined() ? ad::add(z, acc) : z;
}

Tensor rk4_step(const VectorField& f, const Tensor& z, double t, double h, std::size_t& evals) {
  const auto k1 = f(z, t);
  const auto k2 = f(combine(z, h, {{0.5, &k1}}), t + 0.5 * h);
  const auto k3 = f(combine(z, h, {{0.5, &k2}}), t + 0.5 * h);
  const auto k4 = f(combine(z, h, {{1.0, &k3}}), t + h);
  evals += 4;
  return combine(z, h, {{1.0 / 6.0, &k1}, {1.0 / 3.0, &k2}, {1.0 / 3.0, &k3}, {1.0 / 6.0, &k4}});
}

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// b - b*, the embedded fourth-order weights subtracted from the fifth-order ones.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200, e6 = 22.0 / 525,
                 e7 = -1.0 / 40;

double error_norm(const Tensor& err, const Tensor& z, const Tensor& z_new, const OdeOptions& o) {
  const auto e = err.data(), a = z.data(), b = z_new.data();
  double s = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    const double tol = o.atol + o.rtol * std::max(std::abs(a[i]), std::abs(b[i]));
    s += (e[i] / tol) * (e[i] / tol);
  }
  return std::sqrt(s / static_cast<double>(std::max<std::size_t>(e.size(), 1)));
}

double initial_step(const Tensor& z, const Tensor& f0, double span, const OdeOptions& o) {
  double d0 = 0.0, d1 = 0.0;
  const auto zs = z.data(), fs = f0.data();
  for (std::size_t i = 0; i < zs.size(); ++i) {
    const double tol = o.atol + o.rtol * std::abs(zs[i]);
    d0 += (zs[i] / tol) * (zs[i] / tol);
    d1 += (fs[i] / tol) * (fs[i] / tol);
  }
  const double n = static_cast<double>(std::max<std::size_t>(zs.size(), 1));
  d0 = std::sqrt(d0 / n);
  d1 = std::sqrt(d1 / n);
  double h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  return std::min(h, span);
}

}  // namespace

OdeSolution ode_integrate(const VectorField& f, const Tensor& z0, const std::vector<double>& grid, OdeMethod method,
                          const OdeOptions& o) {
  if (grid.size() < 2 || grid.front() != 0.0) throw ParameterError("time grid must start at 0 and have >= 2 points");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw ParameterError("time grid must be strictly increasing");

  OdeSolution sol;
  sol.trajectory.push_back(z0);
  Tensor z = z0;

  if (method == OdeMethod::rk4) {
    for (std::size_t i = 1; i < grid.size(); ++i) {
      z = rk4_step(f, z, grid[i - 1], grid[i] - grid[i - 1], sol.field_evals);
      ++sol.accepted;
      sol.trajectory.push_back(z);
    }
    return sol;
  }

  double t = 0.0;
  Tensor k1 = f(z, t);
  ++sol.field_evals;
  double h = initial_step(z, k1, grid.back(), o);
  for (std::size_t gi = 1; gi < grid.size(); ++gi) {
    const double target = grid[gi];
    while (t < target) {
      if (sol.accepted + sol.rejected >= o.max_steps) throw StiffnessError("dopri: step budget exhausted");
      bool lands = false;
      double step = h;
      if (t + step >= target || target - (t + step) < o.min_step) {
        step = target - t;
        lands = true;
      }
      if (step < o.min_step) throw StiffnessError("dopri: step size underflow at t = " + std::to_string(t));

      const auto k2 = f(combine(z, step, {{a21, &k1}}), t + c2 * step);
      const auto k3 = f(combine(z, step, {{a31, &k1}, {a32, &k2}}), t + c3 * step);
      const auto k4 = f(combine(z, step, {{a41, &k1}, {a42, &k2}, {a43, &k3}}), t + c4 * step);
      const auto k5 = f(combine(z, step, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}), t + c5 * step);
      const auto k6 = f(combine(z, step, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}), t + step);
      const auto z_new = combine(z, step, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
      const auto k7 = f(z_new, t + step);
      sol.field_evals += 6;

      // Error estimate on detached values: step control is not differentiated.
      const auto err = combine(Tensor::zeros(z.shape()), step,
                               {{e1, &k1}, {e3, &k3}, {e4, &k4}, {e5, &k5}, {e6, &k6}, {e7, &k7}})
                           .detach();
      const double en = error_norm(err, z, z_new, o);
      if (!std::isfinite(en)) throw StiffnessError("dopri: non-finite error estimate");
      const double factor = en == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
      if (en <= 1.0) {
        t = lands ? target : t + step;
        z = z_new;
        k1 = k7;  // first-same-as-last
        ++sol.accepted;
        // A step shortened to land on the grid says little about the next one.
        h = lands ? std::max(h, step * factor) : step * factor;
      } else {
        ++sol.rejected;
        h = step * factor;
        if (h < o.min_step) throw StiffnessError("dopri: step size underflow at t = " + std::to_string(t));
      }
    }
    sol.trajectory.push_back(z);
  }
  return sol;
}

}  // namespace overlap::uoo
