#pragma once

// Reverse-mode gradient tape. Ops append nodes in execution order; backward()
// replays them in exact reverse order, once. Parameters are referenced, not
// copied, and must outlive the tape.

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "uhinet/numerics/ops.hpp"

namespace uhinet::num {

template <typename T>
class GradTape {
 public:
  using TensorT = BasicTensor<T>;

  struct Var {
    std::size_t id = 0;
  };

  // Receives the gradient flowing into the node; pushes contributions to parents.
  using BackwardFn = std::function<void(GradTape&, const TensorT& grad_out)>;

  GradTape() = default;
  GradTape(const GradTape&) = delete;
  GradTape& operator=(const GradTape&) = delete;
  GradTape(GradTape&&) noexcept = default;
  GradTape& operator=(GradTape&&) noexcept = default;

  Var input(TensorT value, bool requires_grad = false) {
    Node n;
    n.owned = std::move(value);
    n.requires_grad = requires_grad;
    n.keep_grad = requires_grad;
    return push(std::move(n));
  }

  Var parameter(const TensorT& value, std::size_t slot) {
    for (const auto& n : nodes_) {
      if (n.param_slot && *n.param_slot == slot) throw UsageError("tape: parameter slot registered twice");
    }
    Node n;
    n.external = &value;
    n.requires_grad = true;
    n.keep_grad = true;
    n.param_slot = slot;
    return push(std::move(n));
  }

  // Appends an op result. The backward closure is kept only when some parent
  // carries gradient.
  Var record(TensorT value, std::initializer_list<Var> parents, BackwardFn fn) {
    check_open();
    Node n;
    n.owned = std::move(value);
    for (Var p : parents) n.requires_grad = n.requires_grad || nodes_.at(p.id).requires_grad;
    if (n.requires_grad) n.backward = std::move(fn);
    return push(std::move(n));
  }

  const TensorT& value(Var v) const {
    const Node& n = nodes_.at(v.id);
    return n.external ? *n.external : n.owned;
  }

  bool requires_grad(Var v) const { return nodes_.at(v.id).requires_grad; }

  void accumulate(Var v, TensorT grad) {
    Node& n = nodes_.at(v.id);
    if (!n.requires_grad) return;
    if (grad.size() != value(v).size()) throw DimensionError("tape: gradient size does not match node value");
    if (!n.grad) {
      n.grad = std::move(grad).reshaped(value(v).shape());
      return;
    }
    auto dst = n.grad->data();
    auto src = grad.data();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
  }

  // Gradients for parameter slots [0, parameter_count); slots the loss does
  // not reach get zeros. The tape cannot be replayed afterwards.
  std::vector<TensorT> backward(Var loss, std::size_t parameter_count) {
    if (consumed_) throw UsageError("tape: backward already ran on this tape");
    const TensorT& root = value(loss);
    if (root.rank() != 0 || root.size() != 1) {
      throw UsageError("tape: backward root must be a scalar, got " + shape_string(root.shape()));
    }
    consumed_ = true;
    accumulate(loss, TensorT::scalar(T{1}));
    for (std::size_t id = loss.id + 1; id-- > 0;) {
      Node& n = nodes_[id];
      if (!n.grad || !n.backward) continue;
      n.backward(*this, *n.grad);
      n.backward = nullptr;
      if (!n.keep_grad) n.grad.reset();
    }
    std::vector<TensorT> grads(parameter_count);
    for (auto& n : nodes_) {
      if (!n.param_slot) continue;
      if (*n.param_slot >= parameter_count) throw UsageError("tape: parameter slot out of range");
      grads[*n.param_slot] = n.grad ? std::move(*n.grad) : TensorT(n.external->shape());
      n.grad.reset();
    }
    for (std::size_t s = 0; s < parameter_count; ++s) {
      if (grads[s].shape().empty() && grads[s].size() == 0) {
        throw UsageError("tape: parameter slot " + std::to_string(s) + " was never registered");
      }
    }
    return grads;
  }

  // Gradient of a non-parameter node registered with requires_grad, after backward().
  const TensorT* gradient(Var v) const {
    const Node& n = nodes_.at(v.id);
    return n.grad ? &*n.grad : nullptr;
  }

  bool consumed() const { return consumed_; }
  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    TensorT owned;
    const TensorT* external = nullptr;
    std::optional<TensorT> grad;
    BackwardFn backward;
    std::optional<std::size_t> param_slot;
    bool requires_grad = false;
    bool keep_grad = false;
  };

  void check_open() const {
    if (consumed_) throw UsageError("tape: cannot record on a consumed tape");
  }

  Var push(Node n) {
    check_open();
    nodes_.push_back(std::move(n));
    return Var{nodes_.size() - 1};
  }

  std::vector<Node> nodes_;
  bool consumed_ = false;
};

// Taped versions of the layer ops.
template <typename T>
using TapeVar = typename GradTape<T>::Var;

template <typename T>
TapeVar<T> conv2d(GradTape<T>& tape, TapeVar<T> x, TapeVar<T> kernel, TapeVar<T> bias, std::size_t stride,
                  Padding padding);
template <typename T>
TapeVar<T> conv2d_transpose(GradTape<T>& tape, TapeVar<T> x, TapeVar<T> kernel, TapeVar<T> bias,
                            std::size_t stride);
template <typename T>
TapeVar<T> max_pool2(GradTape<T>& tape, TapeVar<T> x);
template <typename T>
TapeVar<T> relu(GradTape<T>& tape, TapeVar<T> x);
template <typename T>
TapeVar<T> dropout(GradTape<T>& tape, TapeVar<T> x, double rate, Rng& rng, bool training);
template <typename T>
TapeVar<T> dense(GradTape<T>& tape, TapeVar<T> x, TapeVar<T> weights, TapeVar<T> bias);
template <typename T>
TapeVar<T> mse_loss(GradTape<T>& tape, TapeVar<T> pred, TapeVar<T> target);
template <typename T>
TapeVar<T> concat_last(GradTape<T>& tape, TapeVar<T> a, TapeVar<T> b);
template <typename T>
TapeVar<T> reshape(GradTape<T>& tape, TapeVar<T> x, Shape shape);

}  // namespace uhinet::num
