#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace overlap::ad {

using Shape = std::vector<std::size_t>;

std::size_t shape_size(const Shape& shape);
std::string shape_string(const Shape& shape);

struct Node;
using NodePtr = std::shared_ptr<Node>;

// Vector-Jacobian rule: reads `self.grad` and accumulates into the inputs.
using BackwardFn = std::function<void(Node& self)>;

struct Node {
  Shape shape;
  std::vector<double> data;
  std::vector<double> grad;  // empty until something flows into it
  bool requires_grad = false;
  std::vector<NodePtr> inputs;
  BackwardFn backward;

  // Lazily allocates the gradient buffer and returns it.
  std::span<double> grad_buffer();
};

/// Dense row-major tensor of doubles with an optional link into the active tape.
///
/// Copies share the underlying node; values are immutable after construction
/// except through `mutable_data()` on leaves (used by optimizers) and gradient
/// accumulation.
class Tensor {
 public:
  Tensor() = default;

  static Tensor constant(Shape shape, std::vector<double> data);
  static Tensor parameter(Shape shape, std::vector<double> data);
  static Tensor zeros(Shape shape);
  static Tensor scalar(double value);

  const Shape& shape() const;
  std::size_t rank() const { return shape().size(); }
  std::size_t size() const;
  std::size_t rows() const;
  std::size_t cols() const;

  std::span<const double> data() const;
  std::span<const double> grad() const;
  double item() const;
  double at(std::size_t r, std::size_t c) const;

  bool defined() const { return node_ != nullptr; }
  bool requires_grad() const;
  bool is_leaf() const;

  std::span<double> mutable_data();
  void zero_grad();
  Tensor detach() const;

  const NodePtr& node() const { return node_; }

  // Builds the result of an op. When a tape is active and any input requires a
  // gradient, the result is recorded together with its backward rule.
  static Tensor from_op(Shape shape, std::vector<double> data,
                        std::vector<Tensor> inputs, BackwardFn backward);

 private:
  explicit Tensor(NodePtr node) : node_(std::move(node)) {}
  NodePtr node_;
};

/// Per-forward-pass operation record. Constructing a Tape makes it the active
/// tape of the calling thread until it is destroyed; nested tapes shadow the
/// outer one. A tape may be replayed backward once.
class Tape {
 public:
  Tape();
  ~Tape();
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  static Tape* active();

  void record(NodePtr node);
  std::size_t size() const { return nodes_.size(); }

  // Seeds d(output)/d(output) = 1 (output must be a scalar) and propagates.
  void backward(const Tensor& output);
  // Same, seeding with an explicit upstream gradient of the output's shape.
  void backward(const Tensor& output, std::span<const double> seed);

 private:
  std::vector<NodePtr> nodes_;
  Tape* previous_ = nullptr;
  bool consumed_ = false;
};

}  // namespace overlap::ad
