#include "overlap/uoo/topo.hpp"

#include "overlap/autodiff/ops.hpp"
#include "overlap/error.hpp"

namespace overlap::uoo {

using ad::Tensor;

TopoResult topo_loss(const Tensor& z, const TopoOptions& o) {
  if (z.rank() != 2) throw DimensionError("topo_loss expects a [B x D] batch");
  if (z.rows() < 4) throw InsufficientPointsError("topo_loss needs at least 4 points, got " + std::to_string(z.rows()));
  if (o.max_dim < 1 || o.max_dim > 2) throw ParameterError("topo_loss max_dim must be 1 or 2");

  ph::PointCloud pc(z.rows(), z.cols(), std::vector<double>(z.data().begin(), z.data().end()));
  TopoResult r;
  r.diagram = ph::compute_persistence(ph::rips_filtration(pc, o.max_dim), o.reduction);

  std::vector<double> weights(r.diagram.features.size(), 0.0);
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const auto& f = r.diagram.features[i];
    const double life = f.lifetime();
    if (f.essential() || life < o.eps_min) continue;
    if (f.dim == 0) {
      r.h0_squared += life * life;
      weights[i] = 2.0 * life;
    } else if (f.dim <= o.max_dim) {
      r.higher_squared += life * life;
      weights[i] = -2.0 * o.lambda * life;
    }
  }
  const double value = r.h0_squared - o.lambda * r.higher_squared;
  r.gradient = ph::lifetime_gradient(r.diagram, pc, weights, o.eps_min);
  auto grad = r.gradient;
  r.loss = Tensor::from_op({1}, {value}, {z}, [grad = std::move(grad)](ad::Node& self) {
    auto& x = self.inputs[0];
    if (!x->requires_grad) return;
    auto g = x->grad_buffer();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[0] * grad[i];
  });
  return r;
}

Tensor total_loss(const Tensor& task, const Tensor& topo, double alpha) {
  if (alpha < 0.0) throw ParameterError("alpha must be non-negative");
  if (alpha == 0.0) return task;
  if (!topo.defined()) throw StateError("total_loss: topology term missing for alpha > 0");
  return ad::add(task, ad::scale(topo, alpha));
}

}  // namespace overlap::uoo
