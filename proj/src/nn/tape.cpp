#include "tfrhss/nn/tape.hpp"

#include <stdexcept>

namespace tfrhss::nn {

Tape::Node& Tape::node(Id id) {
  if (id < 0 || static_cast<std::size_t>(id) >= nodes_.size()) throw std::out_of_range("Tape: bad node id");
  return nodes_[static_cast<std::size_t>(id)];
}

const Tape::Node& Tape::node(Id id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= nodes_.size()) throw std::out_of_range("Tape: bad node id");
  return nodes_[static_cast<std::size_t>(id)];
}

Tape::Id Tape::push(Node n) {
  for (Id p : n.parents) n.needs_grad = n.needs_grad || node(p).needs_grad;
  nodes_.push_back(std::move(n));
  return static_cast<Id>(nodes_.size() - 1);
}

void Tape::accumulate(Id id, Tensor4&& g) {
  Node& n = node(id);
  if (!n.needs_grad) return;
  require_dims(g, n.value.dims(), "Tape gradient");
  if (n.grad.empty()) {
    n.grad = std::move(g);
    return;
  }
  for (std::size_t k = 0; k < g.size(); ++k) n.grad[k] += g[k];
}

Tape::Id Tape::input(Tensor4 value) {
  Node n;
  n.value = std::move(value);
  return push(std::move(n));
}

Tape::Id Tape::parameter(const Tensor4& value, Tensor4* grad_sink) {
  if (grad_sink != nullptr) require_dims(*grad_sink, value.dims(), "Tape parameter sink");
  Node n;
  n.value = value;
  n.needs_grad = true;
  n.sink = grad_sink;
  return push(std::move(n));
}

Tape::Id Tape::conv2d(Id x, Id weight, Id bias, ConvOptions opt) {
  Node n;
  n.value = conv2d_forward(value(x), value(weight), value(bias), opt);
  n.parents = {x, weight, bias};
  n.backward = [this, x, weight, bias, opt](const Tensor4& g) {
    ConvGrads cg = conv2d_backward(value(x), value(weight), g, opt, node(x).needs_grad);
    if (node(x).needs_grad) accumulate(x, std::move(cg.input));
    accumulate(weight, std::move(cg.weight));
    accumulate(bias, std::move(cg.bias));
  };
  return push(std::move(n));
}

Tape::Id Tape::relu(Id x) {
  Node n;
  n.value = relu_forward(value(x));
  n.parents = {x};
  n.backward = [this, x](const Tensor4& g) { accumulate(x, relu_backward(value(x), g)); };
  return push(std::move(n));
}

Tape::Id Tape::maxpool2x2(Id x) {
  PoolResult r = maxpool2x2_forward(value(x));
  Node n;
  n.value = std::move(r.output);
  n.pool = std::move(r.indices);
  n.parents = {x};
  const Id self = static_cast<Id>(nodes_.size());
  n.backward = [this, x, self](const Tensor4& g) { accumulate(x, maxpool2x2_backward(g, node(self).pool)); };
  return push(std::move(n));
}

Tape::Id Tape::unpool2x2(Id x, Id pool) {
  Node n;
  n.value = unpool2x2_forward(value(x), pool_indices(pool));
  n.parents = {x};
  n.backward = [this, x, pool](const Tensor4& g) { accumulate(x, unpool2x2_backward(g, pool_indices(pool))); };
  return push(std::move(n));
}

Tape::Id Tape::upsample2x(Id x) {
  Node n;
  n.value = upsample_nearest2x_forward(value(x));
  n.parents = {x};
  n.backward = [this, x](const Tensor4& g) { accumulate(x, upsample_nearest2x_backward(g)); };
  return push(std::move(n));
}

Tape::Id Tape::affine(Id x, float scale, float shift) {
  Node n;
  n.value = value(x);
  for (auto& v : n.value.values()) v = scale * v + shift;
  n.parents = {x};
  n.backward = [this, x, scale](const Tensor4& g) {
    Tensor4 gx = g;
    for (auto& v : gx.values()) v *= scale;
    accumulate(x, std::move(gx));
  };
  return push(std::move(n));
}

Tape::Id Tape::linear(Id x, LinearMap forward, LinearMap adjoint) {
  Node n;
  n.value = forward(value(x));
  n.parents = {x};
  n.backward = [this, x, adjoint = std::move(adjoint)](const Tensor4& g) { accumulate(x, adjoint(g)); };
  return push(std::move(n));
}

const Tensor4& Tape::value(Id id) const { return node(id).value; }

const Tensor4& Tape::grad(Id id) const { return node(id).grad; }

const PoolIndices& Tape::pool_indices(Id pool) const {
  const Node& n = node(pool);
  if (n.pool.argmax.empty()) throw ShapeError("Tape: node is not a max-pool");
  return n.pool;
}

void Tape::backward(Id output, const Tensor4& seed) {
  for (auto& n : nodes_) n.grad = Tensor4();
  Node& out = node(output);
  require_dims(seed, out.value.dims(), "Tape seed");
  if (!out.needs_grad) return;
  out.grad = seed;
  for (Id id = output; id >= 0; --id) {
    Node& n = nodes_[static_cast<std::size_t>(id)];
    if (n.grad.empty()) continue;
    // Parents always have smaller ids, so n.grad is final here.
    if (n.backward) n.backward(n.grad);
    if (n.sink != nullptr) {
      Tensor4& s = *n.sink;
      for (std::size_t k = 0; k < s.size(); ++k) s[k] += n.grad[k];
    }
  }
}

}  // namespace tfrhss::nn
