#include "uhinet/numerics/tape.hpp"

namespace uhinet::num {

template <typename T>
TapeVar<T> conv2d(GradTape<T>& tape, TapeVar<T> x, TapeVar<T> kernel, TapeVar<T> bias, std::size_t stride,
                  Padding padding) {
  auto out = conv2d(tape.value(x), tape.value(kernel), tape.value(bias), stride, padding);
  return tape.record(std::move(out), {x, kernel, bias}, [=](GradTape<T>& t, const BasicTensor<T>& g) {
    auto grads = conv2d_backward(t.value(x), t.value(kernel), g, stride, padding, t.requires_grad(x));
    if (t.requires_grad(x)) t.accumulate(x, std::move(grads.input));
    t.accumulate(kernel, std::move(grads.kernel));
    t.accumulate(bias, std::move(grads.bias));
  });
}

template <typename T>
TapeVar<T> conv2d_transpose(GradTape<T>& tape, TapeVar<T> x, TapeVar<T> kernel, TapeVar<T> bias,
                            std::size_t stride) {
  auto out = conv2d_transpose(tape.value(x), tape.value(kernel), tape.value(bias), stride);
  return tape.record(std::move(out), {x, kernel, bias}, [=](GradTape<T>& t, const BasicTensor<T>& g) {
    auto grads = conv2d_transpose_backward(t.value(x), t.value(kernel), g, stride, t.requires_grad(x));
    if (t.requires_grad(x)) t.accumulate(x, std::move(grads.input));
    t.accumulate(kernel, std::move(grads.kernel));
    t.accumulate(bias, std::move(grads.bias));
  });
}

template <typename T>
TapeVar<T> max_pool2(GradTape<T>& tape, TapeVar<T> x) {
  auto pooled = max_pool2(tape.value(x));
  auto argmax = std::make_shared<std::vector<std::size_t>>(std::move(pooled.argmax));
  return tape.record(std::move(pooled.output), {x}, [=](GradTape<T>& t, const BasicTensor<T>& g) {
    t.accumulate(x, max_pool2_backward(g, *argmax, t.value(x).shape()));
  });
}

template <typename T>
TapeVar<T> relu(GradTape<T>& tape, TapeVar<T> x) {
  auto out = relu(tape.value(x));
  return tape.record(std::move(out), {x}, [=](GradTape<T>& t, const BasicTensor<T>& g) {
    t.accumulate(x, relu_backward(t.value(x), g));
  });
}

template <typename T>
TapeVar<T> dropout(GradTape<T>& tape, TapeVar<T> x, double rate, Rng& rng, bool training) {
  auto r = dropout(tape.value(x), rate, rng, training);
  if (r.scale.empty()) {
    return tape.record(std::move(r.output), {x}, [=](GradTape<T>& t, const BasicTensor<T>& g) { t.accumulate(x, g); });
  }
  auto scale = std::make_shared<BasicTensor<T>>(std::move(r.scale));
  return tape.record(std::move(r.output), {x}, [=](GradTape<T>& t, const BasicTensor<T>& g) {
    BasicTensor<T> dx(g.shape());
    for (std::size_t i = 0; i < dx.size(); ++i) dx[i] = g[i] * (*scale)[i];
    t.accumulate(x, std::move(dx));
  });
}

template <typename T>
TapeVar<T> dense(GradTape<T>& tape, TapeVar<T> x, TapeVar<T> weights, TapeVar<T> bias) {
  auto out = dense(tape.value(x), tape.value(weights), tape.value(bias));
  return tape.record(std::move(out), {x, weights, bias}, [=](GradTape<T>& t, const BasicTensor<T>& g) {
    auto grads = dense_backward(t.value(x), t.value(weights), g);
    t.accumulate(x, std::move(grads.input));
    t.accumulate(weights, std::move(grads.weights));
    t.accumulate(bias, std::move(grads.bias));
  });
}

template <typename T>
TapeVar<T> mse_loss(GradTape<T>& tape, TapeVar<T> pred, TapeVar<T> target) {
  const double loss = mse_loss(tape.value(pred), tape.value(target));
  return tape.record(BasicTensor<T>::scalar(static_cast<T>(loss)), {pred, target},
                     [=](GradTape<T>& t, const BasicTensor<T>& g) {
                       const double upstream = static_cast<double>(g.item());
                       auto dp = mse_backward(t.value(pred), t.value(target), upstream);
                       if (t.requires_grad(target)) {
                         BasicTensor<T> dt(dp.shape());
                         for (std::size_t i = 0; i < dt.size(); ++i) dt[i] = -dp[i];
                         t.accumulate(target, std::move(dt));
                       }
                       t.accumulate(pred, std::move(dp));
                     });
}

template <typename T>
TapeVar<T> concat_last(GradTape<T>& tape, TapeVar<T> a, TapeVar<T> b) {
  auto out = concat_last(tape.value(a), tape.value(b));
  const std::size_t width = tape.value(a).shape().back();
  return tape.record(std::move(out), {a, b}, [=](GradTape<T>& t, const BasicTensor<T>& g) {
    auto [ga, gb] = split_last(g, width);
    t.accumulate(a, std::move(ga));
    t.accumulate(b, std::move(gb));
  });
}

template <typename T>
TapeVar<T> reshape(GradTape<T>& tape, TapeVar<T> x, Shape shape) {
  auto out = tape.value(x).reshaped(std::move(shape));
  return tape.record(std::move(out), {x}, [=](GradTape<T>& t, const BasicTensor<T>& g) { t.accumulate(x, g); });
}

#define UHINET_INSTANTIATE_TAPE(T)                                                                              \
  template TapeVar<T> conv2d(GradTape<T>&, TapeVar<T>, TapeVar<T>, TapeVar<T>, std::size_t, Padding);           \
  template TapeVar<T> conv2d_transpose(GradTape<T>&, TapeVar<T>, TapeVar<T>, TapeVar<T>, std::size_t);          \
  template TapeVar<T> max_pool2(GradTape<T>&, TapeVar<T>);                                                      \
  template TapeVar<T> relu(GradTape<T>&, TapeVar<T>);                                                           \
  template TapeVar<T> dropout(GradTape<T>&, TapeVar<T>, double, Rng&, bool);                                    \
  template TapeVar<T> dense(GradTape<T>&, TapeVar<T>, TapeVar<T>, TapeVar<T>);                                  \
  template TapeVar<T> mse_loss(GradTape<T>&, TapeVar<T>, TapeVar<T>);                                           \
  template TapeVar<T> concat_last(GradTape<T>&, TapeVar<T>, TapeVar<T>);                                        \
  template TapeVar<T> reshape(GradTape<T>&, TapeVar<T>, Shape);

UHINET_INSTANTIATE_TAPE(float)
UHINET_INSTANTIATE_TAPE(double)

#undef UHINET_INSTANTIATE_TAPE

}  // namespace uhinet::num
