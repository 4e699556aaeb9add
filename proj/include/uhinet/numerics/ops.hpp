#pragma once

// Forward and backward kernels for the layers of the encoder-decoder. Image
// tensors are channels-last: (H, W, C) or batched (N, H, W, C); outputs keep the
// rank of the input. Kernels are (KH, KW, C_in, C_out).

#include <cstdint>
#include <utility>
#include <vector>

#include "uhinet/numerics/tensor.hpp"
#include "uhinet/rng.hpp"

namespace uhinet::num {

enum class Padding { same, valid };

// Forward-convolution geometry from an (in_h, in_w) image to an (out_h, out_w)
// grid. "same" follows the usual rule out = ceil(in / stride) with the extra
// padding row/column placed at the bottom/right.
struct ConvGeometry {
  std::size_t batch = 1;
  std::size_t in_h = 0, in_w = 0, in_c = 0;
  std::size_t out_h = 0, out_w = 0, out_c = 0;
  std::size_t kernel_h = 0, kernel_w = 0;
  std::size_t stride = 1;
  std::size_t pad_top = 0, pad_left = 0;
};

ConvGeometry conv_geometry(const Shape& input, const Shape& kernel, std::size_t stride, Padding padding);

// Geometry of a transposed convolution seen as the forward convolution it is
// the adjoint of: the transposed layer's output is that convolution's input.
ConvGeometry conv_transpose_geometry(const Shape& input, const Shape& kernel, std::size_t stride);

template <typename T>
BasicTensor<T> conv2d(const BasicTensor<T>& input, const BasicTensor<T>& kernel, const BasicTensor<T>& bias,
                      std::size_t stride, Padding padding);

template <typename T>
struct ConvGrads {
  BasicTensor<T> input;  // empty when not requested
  BasicTensor<T> kernel;
  BasicTensor<T> bias;
};

template <typename T>
ConvGrads<T> conv2d_backward(const BasicTensor<T>& input, const BasicTensor<T>& kernel,
                             const BasicTensor<T>& grad_out, std::size_t stride, Padding padding,
                             bool want_input_grad = true);

// Upsampling convolution: output spatial size is input size times stride.
template <typename T>
BasicTensor<T> conv2d_transpose(const BasicTensor<T>& input, const BasicTensor<T>& kernel,
                                const BasicTensor<T>& bias, std::size_t stride);

template <typename T>
ConvGrads<T> conv2d_transpose_backward(const BasicTensor<T>& input, const BasicTensor<T>& kernel,
                                       const BasicTensor<T>& grad_out, std::size_t stride,
                                       bool want_input_grad = true);

template <typename T>
struct PoolResult {
  BasicTensor<T> output;
  std::vector<std::size_t> argmax;  // flat input offset feeding each output cell
};

// 2x2 window, stride 2. Ties go to the first position in row-major order.
template <typename T>
PoolResult<T> max_pool2(const BasicTensor<T>& input);

template <typename T>
BasicTensor<T> max_pool2_backward(const BasicTensor<T>& grad_out, const std::vector<std::size_t>& argmax,
                                  const Shape& input_shape);

template <typename T>
BasicTensor<T> relu(const BasicTensor<T>& input);

template <typename T>
BasicTensor<T> relu_backward(const BasicTensor<T>& input, const BasicTensor<T>& grad_out);

template <typename T>
struct DropoutResult {
  BasicTensor<T> output;
  BasicTensor<T> scale;  // 0 or 1/(1-rate) per element; empty when the op was the identity
};

// Inverted dropout. Identity (and no rng draws) when !training or rate == 0.
template <typename T>
DropoutResult<T> dropout(const BasicTensor<T>& input, double rate, Rng& rng, bool training);

// input (n) or (B, n), weights (n, m), bias (m).
template <typename T>
BasicTensor<T> dense(const BasicTensor<T>& input, const BasicTensor<T>& weights, const BasicTensor<T>& bias);

template <typename T>
struct DenseGrads {
  BasicTensor<T> input;
  BasicTensor<T> weights;
  BasicTensor<T> bias;
};

template <typename T>
DenseGrads<T> dense_backward(const BasicTensor<T>& input, const BasicTensor<T>& weights,
                             const BasicTensor<T>& grad_out);

// Mean of squared differences, accumulated in double.
template <typename T>
double mse_loss(const BasicTensor<T>& pred, const BasicTensor<T>& target);

// d(scale * mse)/d(pred) = scale * 2/n * (pred - target).
template <typename T>
BasicTensor<T> mse_backward(const BasicTensor<T>& pred, const BasicTensor<T>& target, double scale = 1.0);

// Concatenates along the last axis; all leading dimensions must agree.
template <typename T>
BasicTensor<T> concat_last(const BasicTensor<T>& a, const BasicTensor<T>& b);

// Inverse of concat_last: splits the last axis at `first_width`.
template <typename T>
std::pair<BasicTensor<T>, BasicTensor<T>> split_last(const BasicTensor<T>& x, std::size_t first_width);

}  // namespace uhinet::num
