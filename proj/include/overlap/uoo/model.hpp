#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "overlap/autodiff/tensor.hpp"

namespace overlap::uoo {

enum class EntangleMode { full, tucker };

std::string to_string(EntangleMode mode);
EntangleMode entangle_mode_from_string(const std::string& s);

struct ModelConfig {
  std::size_t d1 = 64;
  std::size_t d2 = 64;
  std::size_t latent = 96;   // D
  std::size_t hidden = 256;  // ODE field width
  std::size_t outputs = 1;   // task head logits
  EntangleMode mode = EntangleMode::full;
  std::size_t rank = 0;      // Tucker rank, 0 = r_min
  bool allow_low_rank = false;
};

nlohmann::json to_json(const ModelConfig& c);
ModelConfig model_config_from_json(const nlohmann::json& j);

/// Smallest Tucker rank accepted without override: ceil(0.25 * min(d1, d2)^2).
std::size_t tucker_min_rank(std::size_t d1, std::size_t d2);

/// Bilinear map (x, y) -> z0 without bias, so z0 is linear in each argument.
/// Full mode stores a (d1*d2) x D kernel acting on the row-wise outer product;
/// Tucker mode stores factors U (d1 x r), V (d2 x r), C (r x D) with
/// z0 = ((x U) * (y V)) C and never forms the outer product.
class Entangler {
 public:
  Entangler() = default;
  static Entangler full(std::size_t d1, std::size_t d2, ad::Tensor kernel);
  static Entangler tucker(std::size_t d1, std::size_t d2, ad::Tensor u, ad::Tensor v, ad::Tensor core);
  // Exact Tucker factorization of a full kernel with r = d1 * d2.
  static Entangler tucker_from_full(const Entangler& full);

  // x: [B x d1], y: [B x d2] -> [B x D].
  ad::Tensor operator()(const ad::Tensor& x, const ad::Tensor& y) const;

  EntangleMode mode() const { return mode_; }
  std::size_t latent() const;
  std::vector<ad::Tensor> parameters() const;

 private:
  EntangleMode mode_ = EntangleMode::full;
  std::size_t d1_ = 0, d2_ = 0;
  ad::Tensor kernel_, u_, v_, core_;
};

/// dz/dt = f(z, t): MLP on [z, t] with two SiLU hidden layers.
class OdeField {
 public:
  OdeField() = default;
  OdeField(std::size_t latent, std::size_t hidden, std::uint64_t seed);

  ad::Tensor operator()(const ad::Tensor& z, double t) const;
  std::vector<ad::Tensor> parameters() const;

 private:
  std::size_t latent_ = 0;
  ad::Tensor w1_, b1_, w2_, b2_, w3_, b3_;
};

/// Entanglement, ODE field and linear task head.
class UooModel {
 public:
  UooModel(const ModelConfig& config, std::uint64_t seed);

  const ModelConfig& config() const { return config_; }
  const Entangler& entangler() const { return entangle_; }
  const OdeField& field() const { return field_; }
  ad::Tensor head(const ad::Tensor& z) const;

  std::vector<ad::Tensor> parameters() const;
  std::size_t parameter_count() const;

 private:
  ModelConfig config_;
  Entangler entangle_;
  OdeField field_;
  ad::Tensor head_w_, head_b_;
};

// PyTorch-style uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) initialisation.
ad::Tensor init_uniform(ad::Shape shape, std::size_t fan_in, std::uint64_t seed);
std::size_t count_parameters(const std::vector<ad::Tensor>& params);

}  // namespace overlap::uoo
