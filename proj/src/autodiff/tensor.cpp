#include "overlap/autodiff/tensor.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "overlap/error.hpp"

namespace overlap::ad {

namespace {
thread_local Tape* g_active_tape = nullptr;
}

std::size_t shape_size(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

std::string shape_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << 'x';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

std::span<double> Node::grad_buffer() {
  if (grad.empty()) grad.assign(data.size(), 0.0);
  return grad;
}

namespace {
NodePtr make_node(Shape shape, std::vector<double> data, bool requires_grad) {
  if (shape_size(shape) != data.size()) {
    throw DimensionError("tensor data length " + std::to_string(data.size()) +
                         " does not match shape " + shape_string(shape));
  }
  auto node = std::make_shared<Node>();
  node->shape = std::move(shape);
  node->data = std::move(data);
  node->requires_grad = requires_grad;
  return node;
}
}  // namespace

Tensor Tensor::constant(Shape shape, std::vector<double> data) {
  return Tensor(make_node(std::move(shape), std::move(data), false));
}

Tensor Tensor::parameter(Shape shape, std::vector<double> data) {
  return Tensor(make_node(std::move(shape), std::move(data), true));
}

Tensor Tensor::zeros(Shape shape) {
  const auto n = shape_size(shape);
  return constant(std::move(shape), std::vector<double>(n, 0.0));
}

Tensor Tensor::scalar(double value) { return constant({1}, {value}); }

const Shape& Tensor::shape() const { return node_->shape; }
std::size_t Tensor::size() const { return node_->data.size(); }

std::size_t Tensor::rows() const {
  if (rank() != 2) throw DimensionError("rows() on tensor of shape " + shape_string(shape()));
  return shape()[0];
}

std::size_t Tensor::cols() const {
  if (rank() != 2) throw DimensionError("cols() on tensor of shape " + shape_string(shape()));
  return shape()[1];
}

std::span<const double> Tensor::data() const { return node_->data; }
std::span<const double> Tensor::grad() const { return node_->grad; }

double Tensor::item() const {
  if (size() != 1) throw DimensionError("item() on tensor of shape " + shape_string(shape()));
  return node_->data[0];
}

double Tensor::at(std::size_t r, std::size_t c) const {
  return node_->data[r * cols() + c];
}

bool Tensor::requires_grad() const { return node_ && node_->requires_grad; }
bool Tensor::is_leaf() const { return node_ && !node_->backward; }

std::span<double> Tensor::mutable_data() {
  if (!is_leaf()) throw StateError("mutable_data() is only available on leaf tensors");
  return node_->data;
}

void Tensor::zero_grad() {
  std::fill(node_->grad.begin(), node_->grad.end(), 0.0);
}

Tensor Tensor::detach() const { return constant(shape(), node_->data); }

Tensor Tensor::from_op(Shape shape, std::vector<double> data, std::vector<Tensor> inputs,
                       BackwardFn backward) {
  Tape* tape = Tape::active();
  const bool needs_grad =
      tape != nullptr &&
      std::any_of(inputs.begin(), inputs.end(), [](const Tensor& t) { return t.requires_grad(); });
  auto node = make_node(std::move(shape), std::move(data), needs_grad);
  if (needs_grad) {
    node->inputs.reserve(inputs.size());
    for (auto& in : inputs) node->inputs.push_back(in.node_);
    node->backward = std::move(backward);
    tape->record(node);
  }
  return Tensor(std::move(node));
}

Tape::Tape() : previous_(g_active_tape) { g_active_tape = this; }

Tape::~Tape() { g_active_tape = previous_; }

Tape* Tape::active() { return g_active_tape; }

void Tape::record(NodePtr node) { nodes_.push_back(std::move(node)); }

void Tape::backward(const Tensor& output) {
  if (output.size() != 1) {
    throw DimensionError("backward() without a seed needs a scalar output, got " +
                         shape_string(output.shape()));
  }
  const double one = 1.0;
  backward(output, std::span<const double>(&one, 1));
}

void Tape::backward(const Tensor& output, std::span<const double> seed) {
  if (consumed_) throw StateError("tape already replayed; record a new forward pass");
  if (seed.size() != output.size()) throw DimensionError("backward seed does not match output shape");
  if (!output.requires_grad()) {
    consumed_ = true;
    return;
  }
  auto out = output.node();
  auto g = out->grad_buffer();
  for (std::size_t i = 0; i < g.size(); ++i) g[i] += seed[i];

  // Record order is a topological order, so the reverse visits every node
  // after all of its consumers.
  for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) {
    Node& node = **it;
    if (node.grad.empty() || !node.backward) continue;
    node.backward(node);
  }
  consumed_ = true;
  // Interior nodes hold references to their inputs; drop them so leaf
  // parameters are not kept alive by a finished pass.
  for (auto& node : nodes_) {
    node->inputs.clear();
    node->backward = nullptr;
  }
  nodes_.clear();
}

}  // namespace overlap::ad
