#pragma once

#include <vector>

#include "overlap/autodiff/tensor.hpp"

namespace overlap::ad {

struct AdamOptions {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double weight_decay = 0.0;  // decoupled (AdamW)
};

class Adam {
 public:
  Adam(std::vector<Tensor> params, AdamOptions options);

  void zero_grad();
  void step();

  AdamOptions& options() { return options_; }
  long steps() const { return t_; }

 private:
  std::vector<Tensor> params_;
  AdamOptions options_;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
  long t_ = 0;
};

// L2 norm of the concatenated gradients of `params` (missing grads count as 0).
double grad_norm(const std::vector<Tensor>& params);

}  // namespace overlap::ad
