#include "overlap/uoo/model.hpp"

#include <cmath>
#include <random>

#include "overlap/autodiff/ops.hpp"
#include "overlap/error.hpp"

namespace overlap::uoo {

using ad::Tensor;

std::string to_string(EntangleMode mode) { return mode == EntangleMode::full ? "full" : "tucker"; }

EntangleMode entangle_mode_from_string(const std::string& s) {
  if (s == "full") return EntangleMode::full;
  if (s == "tucker") return EntangleMode::tucker;
  throw ParameterError("unknown entangle mode '" + s + "'");
}

nlohmann::json to_json(const ModelConfig& c) {
  return {{"d1", c.d1},         {"d2", c.d2},           {"latent", c.latent},
          {"hidden", c.hidden}, {"outputs", c.outputs}, {"mode", to_string(c.mode)},
          {"rank", c.rank},     {"allow_low_rank", c.allow_low_rank}};
}

ModelConfig model_config_from_json(const nlohmann::json& j) {
  ModelConfig c;
  c.d1 = j.value("d1", c.d1);
  c.d2 = j.value("d2", c.d2);
  c.latent = j.value("latent", c.latent);
  c.hidden = j.value("hidden", c.hidden);
  c.outputs = j.value("outputs", c.outputs);
  c.mode = entangle_mode_from_string(j.value("mode", std::string("full")));
  c.rank = j.value("rank", c.rank);
  c.allow_low_rank = j.value("allow_low_rank", c.allow_low_rank);
  return c;
}

std::size_t tucker_min_rank(std::size_t d1, std::size_t d2) {
  const double m = static_cast<double>(std::min(d1, d2));
  return static_cast<std::size_t>(std::ceil(0.25 * m * m));
}

Tensor init_uniform(ad::Shape shape, std::size_t fan_in, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  std::uniform_real_distribution<double> u(-bound, bound);
  std::vector<double> data(ad::shape_size(shape));
  for (auto& v : data) v = u(rng);
  return Tensor::parameter(std::move(shape), std::move(data));
}

std::size_t count_parameters(const std::vector<Tensor>& params) {
  std::size_t n = 0;
  for (const auto& p : params) n += p.size();
  return n;
}

// ---------------------------------------------------------------- Entangler

Entangler Entangler::full(std::size_t d1, std::size_t d2, Tensor kernel) {
  if (kernel.rank() != 2 || kernel.rows() != d1 * d2) {
    throw DimensionError("entangle kernel must be (d1*d2) x D, got " + ad::shape_string(kernel.shape()));
  }
  Entangler e;
  e.mode_ = EntangleMode::full;
  e.d1_ = d1;
  e.d2_ = d2;
  e.kernel_ = std::move(kernel);
  return e;
}

Entangler Entangler::tucker(std::size_t d1, std::size_t d2, Tensor u, Tensor v, Tensor core) {
  if (u.rank() != 2 || v.rank() != 2 || core.rank() != 2 || u.rows() != d1 || v.rows() != d2 ||
      u.cols() != v.cols() || core.rows() != u.cols()) {
    throw DimensionError("Tucker factors must be d1 x r, d2 x r, r x D");
  }
  Entangler e;
  e.mode_ = EntangleMode::tucker;
  e.d1_ = d1;
  e.d2_ = d2;
  e.u_ = std::move(u);
  e.v_ = std::move(v);
  e.core_ = std::move(core);
  return e;
}

Entangler Entangler::tucker_from_full(const Entangler& full) {
  if (full.mode_ != EntangleMode::full) throw StateError("tucker_from_full needs a full-mode entangler");
  const std::size_t d1 = full.d1_, d2 = full.d2_, r = d1 * d2;
  std::vector<double> u(d1 * r, 0.0), v(d2 * r, 0.0);
  for (std::size_t i = 0; i < d1; ++i)
    for (std::size_t j = 0; j < d2; ++j) {
      u[i * r + i * d2 + j] = 1.0;
      v[j * r + i * d2 + j] = 1.0;
    }
  const auto k = full.kernel_.data();
  return tucker(d1, d2, Tensor::parameter({d1, r}, std::move(u)), Tensor::parameter({d2, r}, std::move(v)),
                Tensor::parameter(full.kernel_.shape(), std::vector<double>(k.begin(), k.end())));
}

std::size_t Entangler::latent() const { return mode_ == EntangleMode::full ? kernel_.cols() : core_.cols(); }

Tensor Entangler::operator()(const Tensor& x, const Tensor& y) const {
  if (x.rank() != 2 || y.rank() != 2 || x.cols() != d1_ || y.cols() != d2_ || x.rows() != y.rows()) {
    throw DimensionError("entangle: expected [B x " + std::to_string(d1_) + "] and [B x " + std::to_string(d2_) +
                         "], got " + ad::shape_string(x.shape()) + " and " + ad::shape_string(y.shape()));
  }
  if (mode_ == EntangleMode::full) return ad::matmul(ad::outer_rows(x, y), kernel_);
  return ad::matmul(ad::mul(ad::matmul(x, u_), ad::matmul(y, v_)), core_);
}

std::vector<Tensor> Entangler::parameters() const {
  if (mode_ == EntangleMode::full) return {kernel_};
  return {u_, v_, core_};
}

// ---------------------------------------------------------------- OdeField

OdeField::OdeField(std::size_t latent, std::size_t hidden, std::uint64_t seed) : latent_(latent) {
  std::mt19937_64 seeds(seed);
  w1_ = init_uniform({latent + 1, hidden}, latent + 1, seeds());
  b1_ = init_uniform({hidden}, latent + 1, seeds());
  w2_ = init_uniform({hidden, hidden}, hidden, seeds());
  b2_ = init_uniform({hidden}, hidden, seeds());
  w3_ = init_uniform({hidden, latent}, hidden, seeds());
  b3_ = init_uniform({latent}, hidden, seeds());
}

Tensor OdeField::operator()(const Tensor& z, double t) const {
  if (z.rank() != 2 || z.cols() != latent_) {
    throw DimensionError("ode field: expected [B x " + std::to_string(latent_) + "], got " + ad::shape_string(z.shape()));
  }
  const auto time = Tensor::constant({z.rows(), 1}, std::vector<double>(z.rows(), t));
  auto h = ad::silu(ad::linear(ad::concat(z, time), w1_, b1_));
  h = ad::silu(ad::linear(h, w2_, b2_));
  return ad::linear(h, w3_, b3_);
}

std::vector<Tensor> OdeField::parameters() const { return {w1_, b1_, w2_, b2_, w3_, b3_}; }

// ---------------------------------------------------------------- UooModel

UooModel::UooModel(const ModelConfig& config, std::uint64_t seed) : config_(config) {
  if (config.d1 == 0 || config.d2 == 0 || config.latent == 0 || config.hidden == 0 || config.outputs == 0) {
    throw ParameterError("model dimensions must be positive");
  }
  std::mt19937_64 seeds(seed);
  const std::size_t d1 = config.d1, d2 = config.d2, D = config.latent;
  if (config.mode == EntangleMode::full) {
    entangle_ = Entangler::full(d1, d2, init_uniform({d1 * d2, D}, d1, seeds()));
  } else {
    const std::size_t r_min = tucker_min_rank(d1, d2);
    const std::size_t r = config.rank == 0 ? r_min : config.rank;
    if (r < r_min && !config.allow_low_rank) {
      throw ParameterError("Tucker rank " + std::to_string(r) + " is below r_min = " + std::to_string(r_min) +
                           "; set allow_low_rank to override");
    }
    config_.rank = r;
    entangle_ = Entangler::tucker(d1, d2, init_uniform({d1, r}, d1, seeds()), init_uniform({d2, r}, d2, seeds()),
                                  init_uniform({r, D}, r, seeds()));
  }
  field_ = OdeField(D, config.hidden, seeds());
  head_w_ = init_uniform({D, config.outputs}, D, seeds());
  head_b_ = init_uniform({config.outputs}, D, seeds());
}

Tensor UooModel::head(const Tensor& z) const { return ad::linear(z, head_w_, head_b_); }

std::vector<Tensor> UooModel::parameters() const {
  auto out = entangle_.parameters();
  for (auto& p : field_.parameters()) out.push_back(p);
  out.push_back(head_w_);
  out.push_back(head_b_);
  return out;
}

std::size_t UooModel::parameter_count() const { return count_parameters(parameters()); }

}  // namespace overlap::uoo
