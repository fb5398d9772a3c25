#include "overlap/harness/network.hpp"

#include <algorithm>
#include <cmath>

#include "overlap/autodiff/ops.hpp"
#include "overlap/error.hpp"
#include "overlap/hash.hpp"
#include "overlap/synth/dataset.hpp"
#include "overlap/uoo/ode.hpp"

namespace overlap::harness {

std::size_t Network::parameter_count() const { return uoo::count_parameters(parameters()); }

void Network::load_from(const Network& other) {
  auto mine = parameters();
  const auto theirs = other.parameters();
  if (mine.size() != theirs.size()) throw DimensionError("networks differ in parameter layout");
  for (std::size_t i = 0; i < mine.size(); ++i) {
    if (mine[i].shape() != theirs[i].shape()) throw DimensionError("networks differ in parameter shapes");
    std::copy(theirs[i].data().begin(), theirs[i].data().end(), mine[i].mutable_data().begin());
  }
}

OdeNetwork::OdeNetwork(const ExperimentConfig& cfg, std::uint64_t seed)
    : model_(cfg.model, seed), grid_(uoo::linspace(1.0, cfg.grid_points)), method_(cfg.ode) {}

Forward OdeNetwork::forward(const ad::Tensor& x, const ad::Tensor& y) const {
  const auto z0 = model_.entangler()(x, y);
  const auto& field = model_.field();
  auto sol = uoo::ode_integrate([&field](const ad::Tensor& z, double t) { return field(z, t); }, z0, grid_, method_);
  Forward f;
  f.representation = sol.final_state();
  f.logits = model_.head(f.representation);
  f.trajectory = std::move(sol.trajectory);
  return f;
}

std::size_t contrastive_parameter_count(std::size_t input, std::size_t latent, std::size_t hidden) {
  const std::size_t encoder = input * hidden + hidden + hidden * hidden + hidden + hidden * latent + latent;
  return 2 * encoder + 2 * latent + 1;
}

std::size_t contrastive_hidden(std::size_t input, std::size_t latent, std::size_t budget) {
  std::size_t best = 1;
  for (std::size_t h = 1; h < 4096; ++h) {
    const auto diff = [&](std::size_t w) {
      const auto c = contrastive_parameter_count(input, latent, w);
      return c > budget ? c - budget : budget - c;
    };
    if (diff(h) < diff(best)) best = h;
    if (contrastive_parameter_count(input, latent, h) > budget) break;
  }
  return best;
}

ContrastiveNetwork::ContrastiveNetwork(const ExperimentConfig& cfg, std::uint64_t seed)
    : latent_(cfg.model.latent),
      hidden_(contrastive_hidden(synth::kFeatureDim, cfg.model.latent, cfg.param_budget)),
      temperature_(cfg.temperature) {
  std::uint64_t stream = 0;
  auto next = [&] { return mix_seed(seed, 1000 + stream++); };
  const std::size_t in = synth::kFeatureDim, h = hidden_, d = latent_;
  for (Encoder* e : {&ex_, &ey_}) {
    e->w1 = uoo::init_uniform({in, h}, in, next());
    e->b1 = uoo::init_uniform({h}, in, next());
    e->w2 = uoo::init_uniform({h, h}, h, next());
    e->b2 = uoo::init_uniform({h}, h, next());
    e->w3 = uoo::init_uniform({h, d}, h, next());
    e->b3 = uoo::init_uniform({d}, h, next());
  }
  head_w_ = uoo::init_uniform({2 * d, 1}, 2 * d, next());
  head_b_ = uoo::init_uniform({1}, 2 * d, next());
}

ad::Tensor ContrastiveNetwork::Encoder::operator()(const ad::Tensor& x) const {
  auto h = ad::silu(ad::linear(x, w1, b1));
  h = ad::silu(ad::linear(h, w2, b2));
  return ad::linear(h, w3, b3);
}

Forward ContrastiveNetwork::forward(const ad::Tensor& x, const ad::Tensor& y) const {
  const auto zx = ex_(x), zy = ey_(y);
  Forward f;
  f.representation = ad::concat(zx, zy);
  f.logits = ad::linear(f.representation, head_w_, head_b_);
  const auto sim = ad::scale(ad::matmul(ad::normalize_rows(zx), ad::transpose(ad::normalize_rows(zy))), 1.0 / temperature_);
  f.alignment = ad::scale(ad::add(ad::diagonal_cross_entropy(sim), ad::diagonal_cross_entropy(ad::transpose(sim))), 0.5);
  return f;
}

std::vector<ad::Tensor> ContrastiveNetwork::parameters() const {
  return {ex_.w1, ex_.b1, ex_.w2, ex_.b2, ex_.w3, ex_.b3, ey_.w1, ey_.b1, ey_.w2, ey_.b2, ey_.w3, ey_.b3, head_w_, head_b_};
}

std::unique_ptr<Network> build_network(const ExperimentConfig& cfg, std::uint64_t seed) {
  if (cfg.condition == Condition::contrastive) return std::make_unique<ContrastiveNetwork>(cfg, seed);
  return std::make_unique<OdeNetwork>(cfg, seed);
}

}  // namespace overlap::harness
