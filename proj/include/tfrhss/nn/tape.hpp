#pragma once

#include <functional>
#include <vector>

#include "tfrhss/nn/kernels.hpp"

namespace tfrhss::nn {

/// Records a forward computation and replays it in reverse. Nodes are
/// identified by their creation index; backward walks them newest first.
/// One tape belongs to one thread.
class Tape {
 public:
  using Id = int;
  using LinearMap = std::function<Tensor4(const Tensor4&)>;

  Tape() = default;
  // Backward callbacks hold a pointer to the tape.
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  /// Constant leaf; no gradient is kept.
  Id input(Tensor4 value);
  /// Trainable leaf. On backward its gradient is added into *grad_sink
  /// (which must have the same dims) unless grad_sink is null.
  Id parameter(const Tensor4& value, Tensor4* grad_sink);

  Id conv2d(Id x, Id weight, Id bias, ConvOptions opt = {});
  Id relu(Id x);
  Id maxpool2x2(Id x);
  /// Uses the argmax positions recorded by the maxpool node `pool`.
  Id unpool2x2(Id x, Id pool);
  Id upsample2x(Id x);
  /// y = scale * x + shift
  Id affine(Id x, float scale, float shift);
  /// Generic linear op; `adjoint` maps an upstream gradient to the input gradient.
  Id linear(Id x, LinearMap forward, LinearMap adjoint);

  const Tensor4& value(Id id) const;
  /// Gradient after backward(); empty for nodes that do not need one.
  const Tensor4& grad(Id id) const;
  const PoolIndices& pool_indices(Id pool) const;

  void backward(Id output, const Tensor4& seed);
  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Tensor4 value;
    Tensor4 grad;
    bool needs_grad = false;
    Tensor4* sink = nullptr;
    std::vector<Id> parents;
    std::function<void(const Tensor4&)> backward;
    PoolIndices pool;
  };

  Node& node(Id id);
  const Node& node(Id id) const;
  Id push(Node n);
  void accumulate(Id id, Tensor4&& g);

  std::vector<Node> nodes_;
};

}  // namespace tfrhss::nn
