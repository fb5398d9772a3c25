#include "overlap/autodiff/optim.hpp"

#include <cmath>

#include "overlap/error.hpp"

namespace overlap::ad {

Adam::Adam(std::vector<Tensor> params, AdamOptions options)
    : params_(std::move(params)), options_(options) {
  for (const auto& p : params_) {
    if (!p.is_leaf() || !p.requires_grad()) throw StateError("Adam: parameters must be trainable leaves");
    m_.emplace_back(p.size(), 0.0);
    v_.emplace_back(p.size(), 0.0);
  }
}

void Adam::zero_grad() {
  for (auto& p : params_) p.zero_grad();
}

void Adam::step() {
  ++t_;
  const double b1 = options_.beta1, b2 = options_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  for (std::size_t k = 0; k < params_.size(); ++k) {
    auto grad = params_[k].grad();
    if (grad.empty()) continue;
    auto data = params_[k].mutable_data();
    auto& m = m_[k];
    auto& v = v_[k];
    for (std::size_t i = 0; i < data.size(); ++i) {
      m[i] = b1 * m[i] + (1.0 - b1) * grad[i];
      v[i] = b2 * v[i] + (1.0 - b2) * grad[i] * grad[i];
      const double update = (m[i] / c1) / (std::sqrt(v[i] / c2) + options_.epsilon);
      data[i] -= options_.learning_rate * (update + options_.weight_decay * data[i]);
    }
  }
}

double grad_norm(const std::vector<Tensor>& params) {
  double s = 0.0;
  for (const auto& p : params)
    for (double g : p.grad()) s += g * g;
  return std::sqrt(s);
}

}  // namespace overlap::ad
