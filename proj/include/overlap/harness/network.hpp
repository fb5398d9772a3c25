#pragma once

#include <memory>
#include <vector>

#include "overlap/autodiff/tensor.hpp"
#include "overlap/harness/config.hpp"
#include "overlap/uoo/model.hpp"

namespace overlap::harness {

struct Forward {
  ad::Tensor logits;                   // [B x 1]
  ad::Tensor representation;           // [B x R], the cloud fed to topology and NS
  ad::Tensor alignment;                // contrastive term, undefined otherwise
  std::vector<ad::Tensor> trajectory;  // ODE states per grid time (ODE models)
};

class Network {
 public:
  virtual ~Network() = default;
  virtual Forward forward(const ad::Tensor& x, const ad::Tensor& y) const = 0;
  virtual std::vector<ad::Tensor> parameters() const = 0;
  virtual std::size_t representation_dim() const = 0;
  std::size_t parameter_count() const;
  /// Copies parameter values from a network of the same shape.
  void load_from(const Network& other);
};

/// Entanglement + ODE + head. Used by both the uoo and ode_ablation conditions.
class OdeNetwork : public Network {
 public:
  OdeNetwork(const ExperimentConfig& cfg, std::uint64_t seed);
  Forward forward(const ad::Tensor& x, const ad::Tensor& y) const override;
  std::vector<ad::Tensor> parameters() const override { return model_.parameters(); }
  std::size_t representation_dim() const override { return model_.config().latent; }
  const uoo::UooModel& model() const { return model_; }

 private:
  uoo::UooModel model_;
  std::vector<double> grid_;
  uoo::OdeMethod method_;
};

/// Two independent 3-layer MLP encoders (64 -> h -> h -> D each), symmetric
/// InfoNCE on the normalized embeddings, linear head on their concatenation.
class ContrastiveNetwork : public Network {
 public:
  ContrastiveNetwork(const ExperimentConfig& cfg, std::uint64_t seed);
  Forward forward(const ad::Tensor& x, const ad::Tensor& y) const override;
  std::vector<ad::Tensor> parameters() const override;
  std::size_t representation_dim() const override { return 2 * latent_; }
  std::size_t hidden() const { return hidden_; }

 private:
  struct Encoder {
    ad::Tensor w1, b1, w2, b2, w3, b3;
    ad::Tensor operator()(const ad::Tensor& x) const;
  };
  std::size_t latent_, hidden_;
  double temperature_;
  Encoder ex_, ey_;
  ad::Tensor head_w_, head_b_;
};

/// Encoder width whose total contrastive parameter count is closest to the budget.
std::size_t contrastive_hidden(std::size_t input, std::size_t latent, std::size_t budget);
std::size_t contrastive_parameter_count(std::size_t input, std::size_t latent, std::size_t hidden);

std::unique_ptr<Network> build_network(const ExperimentConfig& cfg, std::uint64_t seed);

}  // namespace overlap::harness
