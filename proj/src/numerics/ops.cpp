#include "uhinet/numerics/ops.hpp"

#include <cmath>
#include <cstring>

#include "uhinet/simd/kernels.hpp"

namespace uhinet::num {
namespace {

struct ImageDims {
  std::size_t batch, h, w, c;
  bool batched;
};

ImageDims image_dims(const Shape& s, const char* op) {
  if (s.size() == 3) return {1, s[0], s[1], s[2], false};
  if (s.size() == 4) return {s[0], s[1], s[2], s[3], true};
  throw DimensionError(std::string(op) + ": expected (H,W,C) or (N,H,W,C), got " + shape_string(s));
}

Shape image_shape(const ImageDims& like, std::size_t h, std::size_t w, std::size_t c) {
  if (like.batched) return {like.batch, h, w, c};
  return {h, w, c};
}

void check_kernel(const Shape& k, const char* op) {
  if (k.size() != 4) throw DimensionError(std::string(op) + ": kernel must be (KH,KW,C_in,C_out), got " + shape_string(k));
}

void check_bias(const Shape& b, std::size_t channels, const char* op) {
  if (b.size() != 1 || b[0] != channels) {
    throw DimensionError(std::string(op) + ": bias " + shape_string(b) + " does not match " +
                         std::to_string(channels) + " output channels");
  }
}

std::size_t same_pad_total(std::size_t in, std::size_t out, std::size_t k, std::size_t stride) {
  const std::size_t needed = (out - 1) * stride + k;
  return needed > in ? needed - in : 0;
}

// Gathers every receptive field of `g` into one row of `col`:
// rows (N*out_h*out_w), columns (kernel_h*kernel_w*channels).
template <typename T>
void im2col(const T* image, const ConvGeometry& g, std::size_t channels, T* col) {
  const std::size_t row_len = g.kernel_h * g.kernel_w * channels;
  for (std::size_t n = 0; n < g.batch; ++n) {
    const T* img = image + n * g.in_h * g.in_w * channels;
    for (std::size_t oy = 0; oy < g.out_h; ++oy) {
      for (std::size_t ox = 0; ox < g.out_w; ++ox) {
        T* row = col + ((n * g.out_h + oy) * g.out_w + ox) * row_len;
        for (std::size_t ky = 0; ky < g.kernel_h; ++ky) {
          const auto iy = static_cast<std::ptrdiff_t>(oy * g.stride + ky) - static_cast<std::ptrdiff_t>(g.pad_top);
          for (std::size_t kx = 0; kx < g.kernel_w; ++kx) {
            const auto ix =
                static_cast<std::ptrdiff_t>(ox * g.stride + kx) - static_cast<std::ptrdiff_t>(g.pad_left);
            T* dst = row + (ky * g.kernel_w + kx) * channels;
            if (iy < 0 || ix < 0 || iy >= static_cast<std::ptrdiff_t>(g.in_h) ||
                ix >= static_cast<std::ptrdiff_t>(g.in_w)) {
              std::fill_n(dst, channels, T{0});
            } else {
              std::memcpy(dst, img + (static_cast<std::size_t>(iy) * g.in_w + static_cast<std::size_t>(ix)) * channels,
                          channels * sizeof(T));
            }
          }
        }
      }
    }
  }
}

// Adjoint of im2col: scatter-adds rows back into a zeroed image.
template <typename T>
void col2im(const T* col, const ConvGeometry& g, std::size_t channels, T* image) {
  std::fill_n(image, g.batch * g.in_h * g.in_w * channels, T{0});
  const std::size_t row_len = g.kernel_h * g.kernel_w * channels;
  for (std::size_t n = 0; n < g.batch; ++n) {
    T* img = image + n * g.in_h * g.in_w * channels;
    for (std::size_t oy = 0; oy < g.out_h; ++oy) {
      for (std::size_t ox = 0; ox < g.out_w; ++ox) {
        const T* row = col + ((n * g.out_h + oy) * g.out_w + ox) * row_len;
        for (std::size_t ky = 0; ky < g.kernel_h; ++ky) {
          const auto iy = static_cast<std::ptrdiff_t>(oy * g.stride + ky) - static_cast<std::ptrdiff_t>(g.pad_top);
          if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(g.in_h)) continue;
          for (std::size_t kx = 0; kx < g.kernel_w; ++kx) {
            const auto ix =
                static_cast<std::ptrdiff_t>(ox * g.stride + kx) - static_cast<std::ptrdiff_t>(g.pad_left);
            if (ix < 0 || ix >= static_cast<std::ptrdiff_t>(g.in_w)) continue;
            const T* src = row + (ky * g.kernel_w + kx) * channels;
            T* dst = img + (static_cast<std::size_t>(iy) * g.in_w + static_cast<std::size_t>(ix)) * channels;
            for (std::size_t c = 0; c < channels; ++c) dst[c] += src[c];
          }
        }
      }
    }
  }
}

bool is_pointwise(const ConvGeometry& g) {
  return g.kernel_h == 1 && g.kernel_w == 1 && g.stride == 1 && g.pad_top == 0 && g.pad_left == 0;
}

template <typename T>
void add_bias_rows(T* out, std::size_t rows, const BasicTensor<T>& bias) {
  const std::size_t cols = bias.size();
  const T* b = bias.data().data();
  for (std::size_t r = 0; r < rows; ++r) {
    T* row = out + r * cols;
    for (std::size_t c = 0; c < cols; ++c) row[c] += b[c];
  }
}

// Column sums of a (rows x cols) matrix with double accumulation.
template <typename T>
BasicTensor<T> column_sums(const T* m, std::size_t rows, std::size_t cols) {
  std::vector<double> acc(cols, 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    const T* row = m + r * cols;
    for (std::size_t c = 0; c < cols; ++c) acc[c] += static_cast<double>(row[c]);
  }
  BasicTensor<T> out(Shape{cols});
  for (std::size_t c = 0; c < cols; ++c) out[c] = static_cast<T>(acc[c]);
  return out;
}

// (KH,KW,C,F) -> (C, KH*KW*F)
template <typename T>
std::vector<T> kernel_channel_major(const BasicTensor<T>& k) {
  const auto& s = k.shape();
  const std::size_t taps = s[0] * s[1], c_in = s[2], c_out = s[3];
  std::vector<T> out(k.size());
  for (std::size_t t = 0; t < taps; ++t) {
    for (std::size_t c = 0; c < c_in; ++c) {
      std::memcpy(out.data() + c * taps * c_out + t * c_out, k.data().data() + (t * c_in + c) * c_out,
                  c_out * sizeof(T));
    }
  }
  return out;
}

template <typename T>
BasicTensor<T> kernel_from_channel_major(const std::vector<T>& cm, const Shape& shape) {
  const std::size_t taps = shape[0] * shape[1], c_in = shape[2], c_out = shape[3];
  BasicTensor<T> k(shape);
  for (std::size_t t = 0; t < taps; ++t) {
    for (std::size_t c = 0; c < c_in; ++c) {
      std::memcpy(k.data().data() + (t * c_in + c) * c_out, cm.data() + c * taps * c_out + t * c_out,
                  c_out * sizeof(T));
    }
  }
  return k;
}

}  // namespace

ConvGeometry conv_geometry(const Shape& input, const Shape& kernel, std::size_t stride, Padding padding) {
  const auto in = image_dims(input, "conv2d");
  check_kernel(kernel, "conv2d");
  if (stride < 1) throw ParameterError("conv2d: stride must be >= 1");
  if (kernel[2] != in.c) {
    throw DimensionError("conv2d: input has " + std::to_string(in.c) + " channels, kernel expects " +
                         std::to_string(kernel[2]));
  }
  ConvGeometry g;
  g.batch = in.batch;
  g.in_h = in.h;
  g.in_w = in.w;
  g.in_c = in.c;
  g.out_c = kernel[3];
  g.kernel_h = kernel[0];
  g.kernel_w = kernel[1];
  g.stride = stride;
  if (g.kernel_h == 0 || g.kernel_w == 0) throw DimensionError("conv2d: empty kernel");
  if (padding == Padding::same) {
    g.out_h = (in.h + stride - 1) / stride;
    g.out_w = (in.w + stride - 1) / stride;
    g.pad_top = same_pad_total(in.h, g.out_h, g.kernel_h, stride) / 2;
    g.pad_left = same_pad_total(in.w, g.out_w, g.kernel_w, stride) / 2;
  } else {
    if (in.h < g.kernel_h || in.w < g.kernel_w) throw DimensionError("conv2d: valid padding needs input >= kernel");
    g.out_h = (in.h - g.kernel_h) / stride + 1;
    g.out_w = (in.w - g.kernel_w) / stride + 1;
  }
  return g;
}

ConvGeometry conv_transpose_geometry(const Shape& input, const Shape& kernel, std::size_t stride) {
  const auto in = image_dims(input, "conv2d_transpose");
  check_kernel(kernel, "conv2d_transpose");
  if (stride != 1 && stride != 2) throw ParameterError("conv2d_transpose: stride must be 1 or 2");
  if (kernel[2] != in.c) {
    throw DimensionError("conv2d_transpose: input has " + std::to_string(in.c) + " channels, kernel expects " +
                         std::to_string(kernel[2]));
  }
  ConvGeometry g;
  g.batch = in.batch;
  g.out_h = in.h;
  g.out_w = in.w;
  g.out_c = in.c;
  g.in_h = in.h * stride;
  g.in_w = in.w * stride;
  g.in_c = kernel[3];
  g.kernel_h = kernel[0];
  g.kernel_w = kernel[1];
  g.stride = stride;
  g.pad_top = same_pad_total(g.in_h, g.out_h, g.kernel_h, stride) / 2;
  g.pad_left = same_pad_total(g.in_w, g.out_w, g.kernel_w, stride) / 2;
  return g;
}

template <typename T>
BasicTensor<T> conv2d(const BasicTensor<T>& input, const BasicTensor<T>& kernel, const BasicTensor<T>& bias,
                      std::size_t stride, Padding padding) {
  const auto g = conv_geometry(input.shape(), kernel.shape(), stride, padding);
  check_bias(bias.shape(), g.out_c, "conv2d");
  const auto dims = image_dims(input.shape(), "conv2d");
  const std::size_t rows = g.batch * g.out_h * g.out_w;
  const std::size_t depth = g.kernel_h * g.kernel_w * g.in_c;
  BasicTensor<T> out(image_shape(dims, g.out_h, g.out_w, g.out_c));
  const T* col = input.data().data();
  std::vector<T> buffer;
  if (!is_pointwise(g)) {
    buffer.resize(rows * depth);
    im2col(input.data().data(), g, g.in_c, buffer.data());
    col = buffer.data();
  }
  simd::gemm(rows, g.out_c, depth, simd::row_major(col, depth), simd::row_major(kernel.data().data(), g.out_c),
             out.data().data(), g.out_c, false);
  add_bias_rows(out.data().data(), rows, bias);
  return out;
}

template <typename T>
ConvGrads<T> conv2d_backward(const BasicTensor<T>& input, const BasicTensor<T>& kernel,
                             const BasicTensor<T>& grad_out, std::size_t stride, Padding padding,
                             bool want_input_grad) {
  const auto g = conv_geometry(input.shape(), kernel.shape(), stride, padding);
  const std::size_t rows = g.batch * g.out_h * g.out_w;
  const std::size_t depth = g.kernel_h * g.kernel_w * g.in_c;
  if (grad_out.size() != rows * g.out_c) throw DimensionError("conv2d_backward: gradient shape mismatch");
  ConvGrads<T> grads;
  const T* col = input.data().data();
  std::vector<T> buffer;
  if (!is_pointwise(g)) {
    buffer.resize(rows * depth);
    im2col(input.data().data(), g, g.in_c, buffer.data());
    col = buffer.data();
  }
  const T* dy = grad_out.data().data();
  grads.kernel = BasicTensor<T>(kernel.shape());
  simd::gemm(depth, g.out_c, rows, simd::row_major(col, depth).transposed(), simd::row_major(dy, g.out_c),
             grads.kernel.data().data(), g.out_c, false);
  grads.bias = column_sums(dy, rows, g.out_c);
  if (want_input_grad) {
    grads.input = BasicTensor<T>(input.shape());
    const auto w_t = simd::row_major(kernel.data().data(), g.out_c).transposed();
    if (is_pointwise(g)) {
      simd::gemm(rows, depth, g.out_c, simd::row_major(dy, g.out_c), w_t, grads.input.data().data(), depth, false);
    } else {
      std::vector<T> dcol(rows * depth);
      simd::gemm(rows, depth, g.out_c, simd::row_major(dy, g.out_c), w_t, dcol.data(), depth, false);
      col2im(dcol.data(), g, g.in_c, grads.input.data().data());
    }
  }
  return grads;
}

template <typename T>
BasicTensor<T> conv2d_transpose(const BasicTensor<T>& input, const BasicTensor<T>& kernel,
                                const BasicTensor<T>& bias, std::size_t stride) {
  const auto g = conv_transpose_geometry(input.shape(), kernel.shape(), stride);
  check_bias(bias.shape(), g.in_c, "conv2d_transpose");
  const auto dims = image_dims(input.shape(), "conv2d_transpose");
  const std::size_t rows = g.batch * g.out_h * g.out_w;
  const std::size_t depth = g.kernel_h * g.kernel_w * g.in_c;
  const auto kcm = kernel_channel_major(kernel);
  std::vector<T> col(rows * depth);
  simd::gemm(rows, depth, g.out_c, simd::row_major(input.data().data(), g.out_c), simd::row_major(kcm.data(), depth),
             col.data(), depth, false);
  BasicTensor<T> out(image_shape(dims, g.in_h, g.in_w, g.in_c));
  col2im(col.data(), g, g.in_c, out.data().data());
  add_bias_rows(out.data().data(), g.batch * g.in_h * g.in_w, bias);
  return out;
}

template <typename T>
ConvGrads<T> conv2d_transpose_backward(const BasicTensor<T>& input, const BasicTensor<T>& kernel,
                                       const BasicTensor<T>& grad_out, std::size_t stride, bool want_input_grad) {
  const auto g = conv_transpose_geometry(input.shape(), kernel.shape(), stride);
  const std::size_t rows = g.batch * g.out_h * g.out_w;
  const std::size_t depth = g.kernel_h * g.kernel_w * g.in_c;
  if (grad_out.size() != g.batch * g.in_h * g.in_w * g.in_c) {
    throw DimensionError("conv2d_transpose_backward: gradient shape mismatch");
  }
  std::vector<T> col(rows * depth);
  im2col(grad_out.data().data(), g, g.in_c, col.data());
  ConvGrads<T> grads;
  std::vector<T> dk(kernel.size());
  simd::gemm(g.out_c, depth, rows, simd::row_major(input.data().data(), g.out_c).transposed(),
             simd::row_major(col.data(), depth), dk.data(), depth, false);
  grads.kernel = kernel_from_channel_major(dk, kernel.shape());
  grads.bias = column_sums(grad_out.data().data(), g.batch * g.in_h * g.in_w, g.in_c);
  if (want_input_grad) {
    const auto kcm = kernel_channel_major(kernel);
    grads.input = BasicTensor<T>(input.shape());
    simd::gemm(rows, g.out_c, depth, simd::row_major(col.data(), depth),
               simd::row_major(kcm.data(), depth).transposed(), grads.input.data().data(), g.out_c, false);
  }
  return grads;
}

template <typename T>
PoolResult<T> max_pool2(const BasicTensor<T>& input) {
  const auto d = image_dims(input.shape(), "max_pool2");
  if (d.h % 2 != 0 || d.w % 2 != 0) {
    throw DimensionError("max_pool2: spatial size " + shape_string(input.shape()) + " must be even");
  }
  const std::size_t oh = d.h / 2, ow = d.w / 2;
  PoolResult<T> r{BasicTensor<T>(image_shape(d, oh, ow, d.c)), {}};
  r.argmax.resize(r.output.size());
  const T* x = input.data().data();
  for (std::size_t n = 0; n < d.batch; ++n) {
    for (std::size_t oy = 0; oy < oh; ++oy) {
      for (std::size_t ox = 0; ox < ow; ++ox) {
        for (std::size_t c = 0; c < d.c; ++c) {
          const std::size_t base = ((n * d.h + 2 * oy) * d.w + 2 * ox) * d.c + c;
          const std::size_t candidates[4] = {base, base + d.c, base + d.w * d.c, base + (d.w + 1) * d.c};
          std::size_t best = candidates[0];
          for (std::size_t i = 1; i < 4; ++i) {
            if (x[candidates[i]] > x[best]) best = candidates[i];
          }
          const std::size_t o = ((n * oh + oy) * ow + ox) * d.c + c;
          r.output[o] = x[best];
          r.argmax[o] = best;
        }
      }
    }
  }
  return r;
}

template <typename T>
BasicTensor<T> max_pool2_backward(const BasicTensor<T>& grad_out, const std::vector<std::size_t>& argmax,
                                  const Shape& input_shape) {
  if (grad_out.size() != argmax.size()) throw DimensionError("max_pool2_backward: index count mismatch");
  BasicTensor<T> grad(input_shape);
  for (std::size_t i = 0; i < argmax.size(); ++i) grad[argmax[i]] += grad_out[i];
  return grad;
}

template <typename T>
BasicTensor<T> relu(const BasicTensor<T>& input) {
  BasicTensor<T> out(input.shape());
  simd::relu_forward(input.data(), out.data());
  return out;
}

template <typename T>
BasicTensor<T> relu_backward(const BasicTensor<T>& input, const BasicTensor<T>& grad_out) {
  if (input.shape() != grad_out.shape()) throw DimensionError("relu_backward: shape mismatch");
  BasicTensor<T> grad(input.shape());
  simd::relu_backward(input.data(), grad_out.data(), grad.data());
  return grad;
}

template <typename T>
DropoutResult<T> dropout(const BasicTensor<T>& input, double rate, Rng& rng, bool training) {
  if (!(rate >= 0.0 && rate < 1.0)) throw ParameterError("dropout: rate must lie in [0, 1)");
  if (!training || rate == 0.0) return {input, {}};
  const T keep_scale = static_cast<T>(1.0 / (1.0 - rate));
  DropoutResult<T> r{BasicTensor<T>(input.shape()), BasicTensor<T>(input.shape())};
  for (std::size_t i = 0; i < input.size(); ++i) {
    const T s = rng.uniform() < rate ? T{0} : keep_scale;
    r.scale[i] = s;
    r.output[i] = input[i] * s;
  }
  return r;
}

template <typename T>
BasicTensor<T> dense(const BasicTensor<T>& input, const BasicTensor<T>& weights, const BasicTensor<T>& bias) {
  if (weights.rank() != 2) throw DimensionError("dense: weights must be (n, m), got " + shape_string(weights.shape()));
  const std::size_t n = weights.dim(0), m = weights.dim(1);
  if (bias.rank() != 1 || bias.dim(0) != m) throw DimensionError("dense: bias must have length " + std::to_string(m));
  if (input.rank() < 1 || input.rank() > 2 || input.shape().back() != n) {
    throw DimensionError("dense: input " + shape_string(input.shape()) + " does not match weights " +
                         shape_string(weights.shape()));
  }
  const std::size_t batch = input.rank() == 2 ? input.dim(0) : 1;
  BasicTensor<T> out(input.rank() == 2 ? Shape{batch, m} : Shape{m});
  simd::gemm(batch, m, n, simd::row_major(input.data().data(), n), simd::row_major(weights.data().data(), m),
             out.data().data(), m, false);
  add_bias_rows(out.data().data(), batch, bias);
  return out;
}

template <typename T>
DenseGrads<T> dense_backward(const BasicTensor<T>& input, const BasicTensor<T>& weights,
                             const BasicTensor<T>& grad_out) {
  const std::size_t n = weights.dim(0), m = weights.dim(1);
  const std::size_t batch = input.rank() == 2 ? input.dim(0) : 1;
  if (grad_out.size() != batch * m) throw DimensionError("dense_backward: gradient shape mismatch");
  DenseGrads<T> g{BasicTensor<T>(input.shape()), BasicTensor<T>(weights.shape()), {}};
  const T* dy = grad_out.data().data();
  simd::gemm(batch, n, m, simd::row_major(dy, m), simd::row_major(weights.data().data(), m).transposed(),
             g.input.data().data(), n, false);
  simd::gemm(n, m, batch, simd::row_major(input.data().data(), n).transposed(), simd::row_major(dy, m),
             g.weights.data().data(), m, false);
  g.bias = column_sums(dy, batch, m);
  return g;
}

template <typename T>
double mse_loss(const BasicTensor<T>& pred, const BasicTensor<T>& target) {
  if (pred.shape() != target.shape()) {
    throw DimensionError("mse_loss: " + shape_string(pred.shape()) + " vs " + shape_string(target.shape()));
  }
  if (pred.empty()) throw DimensionError("mse_loss: empty tensors");
  return simd::sum_squared_diff(pred.data(), target.data()) / static_cast<double>(pred.size());
}

template <typename T>
BasicTensor<T> mse_backward(const BasicTensor<T>& pred, const BasicTensor<T>& target, double scale) {
  if (pred.shape() != target.shape()) throw DimensionError("mse_backward: shape mismatch");
  BasicTensor<T> grad(pred.shape());
  const double k = scale * 2.0 / static_cast<double>(pred.size());
  for (std::size_t i = 0; i < pred.size(); ++i) {
    grad[i] = static_cast<T>(k * (static_cast<double>(pred[i]) - static_cast<double>(target[i])));
  }
  return grad;
}

template <typename T>
BasicTensor<T> concat_last(const BasicTensor<T>& a, const BasicTensor<T>& b) {
  if (a.rank() == 0 || a.rank() != b.rank() ||
      !std::equal(a.shape().begin(), a.shape().end() - 1, b.shape().begin())) {
    throw DimensionError("concat_last: " + shape_string(a.shape()) + " vs " + shape_string(b.shape()));
  }
  const std::size_t wa = a.shape().back(), wb = b.shape().back();
  const std::size_t rows = wa ? a.size() / wa : (wb ? b.size() / wb : 0);
  Shape s = a.shape();
  s.back() = wa + wb;
  BasicTensor<T> out(s);
  T* dst = out.data().data();
  for (std::size_t r = 0; r < rows; ++r) {
    std::memcpy(dst, a.data().data() + r * wa, wa * sizeof(T));
    std::memcpy(dst + wa, b.data().data() + r * wb, wb * sizeof(T));
    dst += wa + wb;
  }
  return out;
}

template <typename T>
std::pair<BasicTensor<T>, BasicTensor<T>> split_last(const BasicTensor<T>& x, std::size_t first_width) {
  if (x.rank() == 0 || first_width > x.shape().back()) throw DimensionError("split_last: bad split");
  const std::size_t w = x.shape().back(), wb = w - first_width;
  const std::size_t rows = w ? x.size() / w : 0;
  Shape sa = x.shape(), sb = x.shape();
  sa.back() = first_width;
  sb.back() = wb;
  BasicTensor<T> a(sa), b(sb);
  for (std::size_t r = 0; r < rows; ++r) {
    std::memcpy(a.data().data() + r * first_width, x.data().data() + r * w, first_width * sizeof(T));
    std::memcpy(b.data().data() + r * wb, x.data().data() + r * w + first_width, wb * sizeof(T));
  }
  return {std::move(a), std::move(b)};
}

#define UHINET_INSTANTIATE_OPS(T)                                                                                  \
  template BasicTensor<T> conv2d(const BasicTensor<T>&, const BasicTensor<T>&, const BasicTensor<T>&, std::size_t, \
                                 Padding);                                                                         \
  template ConvGrads<T> conv2d_backward(const BasicTensor<T>&, const BasicTensor<T>&, const BasicTensor<T>&,       \
                                        std::size_t, Padding, bool);                                               \
  template BasicTensor<T> conv2d_transpose(const BasicTensor<T>&, const BasicTensor<T>&, const BasicTensor<T>&,    \
                                           std::size_t);                                                           \
  template ConvGrads<T> conv2d_transpose_backward(const BasicTensor<T>&, const BasicTensor<T>&,                    \
                                                  const BasicTensor<T>&, std::size_t, bool);                       \
  template PoolResult<T> max_pool2(const BasicTensor<T>&);                                                         \
  template BasicTensor<T> max_pool2_backward(const BasicTensor<T>&, const std::vector<std::size_t>&, const Shape&); \
  template BasicTensor<T> relu(const BasicTensor<T>&);                                                             \
  template BasicTensor<T> relu_backward(const BasicTensor<T>&, const BasicTensor<T>&);                             \
  template DropoutResult<T> dropout(const BasicTensor<T>&, double, Rng&, bool);                                    \
  template BasicTensor<T> dense(const BasicTensor<T>&, const BasicTensor<T>&, const BasicTensor<T>&);              \
  template DenseGrads<T> dense_backward(const BasicTensor<T>&, const BasicTensor<T>&, const BasicTensor<T>&);      \
  template double mse_loss(const BasicTensor<T>&, const BasicTensor<T>&);                                          \
  template BasicTensor<T> mse_backward(const BasicTensor<T>&, const BasicTensor<T>&, double);                      \
  template BasicTensor<T> concat_last(const BasicTensor<T>&, const BasicTensor<T>&);                               \
  template std::pair<BasicTensor<T>, BasicTensor<T>> split_last(const BasicTensor<T>&, std::size_t);

UHINET_INSTANTIATE_OPS(float)
UHINET_INSTANTIATE_OPS(double)

#undef UHINET_INSTANTIATE_OPS

}  // namespace uhinet::num
