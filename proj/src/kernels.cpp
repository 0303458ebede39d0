#include "salient/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "salient/error.hpp"

namespace salient {

Activation parse_activation(std::string_view name) {
  if (name == "elu") return Activation::elu;
  if (name == "relu") return Activation::relu;
  if (name == "tanh") return Activation::tanh;
  throw ConfigError("unknown activation '" + std::string(name) + "' (expected elu, relu or tanh)");
}

std::string_view activation_name(Activation a) {
  switch (a) {
    case Activation::elu: return "elu";
    case Activation::relu: return "relu";
    case Activation::tanh: return "tanh";
  }
  return "elu";
}

std::size_t conv_output_extent(std::size_t extent, std::size_t kernel, std::size_t stride,
                               std::size_t padding) {
  if (stride == 0) throw ShapeError("conv2d stride must be positive");
  if (extent + 2 * padding < kernel) {
    throw ShapeError("conv2d input extent " + std::to_string(extent) + " (padding " +
                     std::to_string(padding) + ") smaller than kernel " + std::to_string(kernel));
  }
  return (extent + 2 * padding - kernel) / stride + 1;
}

Tensor conv2d(const Tensor& input, const Conv2dParams& params) {
  if (input.rank() != 3) throw ShapeError("conv2d input must be C x H x W, got " + shape_string(input.shape()));
  const Tensor& w = params.weights;
  if (w.rank() != 4) throw ShapeError("conv2d weights must be rank 4, got " + shape_string(w.shape()));
  const std::size_t in_c = input.dim(0), in_h = input.dim(1), in_w = input.dim(2);
  const std::size_t out_c = w.dim(0), k_h = w.dim(2), k_w = w.dim(3);
  if (w.dim(1) != in_c) {
    throw ShapeError("conv2d weights expect " + std::to_string(w.dim(1)) + " input channels, input has " +
                     std::to_string(in_c));
  }
  require_shape(params.bias, {out_c}, "conv2d bias");
  const std::size_t stride = params.stride, pad = params.padding;
  const std::size_t out_h = conv_output_extent(in_h, k_h, stride, pad);
  const std::size_t out_w = conv_output_extent(in_w, k_w, stride, pad);

  // im2col: cols[ic][kh][kw][oh][ow] = input[ic][oh*stride - pad + kh][ow*stride - pad + kw], zero in the
  // padding. Each tap then updates a whole output plane in one contiguous loop.
  const std::size_t taps = k_h * k_w, pixels = out_h * out_w;
  std::vector<float> cols(in_c * taps * pixels, 0.0f);
  for (std::size_t ic = 0; ic < in_c; ++ic)
    for (std::size_t kh = 0; kh < k_h; ++kh)
      for (std::size_t kw = 0; kw < k_w; ++kw) {
        float* dst = cols.data() + ((ic * k_h + kh) * k_w + kw) * pixels;
        for (std::size_t oh = 0; oh < out_h; ++oh) {
          const std::ptrdiff_t ih = static_cast<std::ptrdiff_t>(oh * stride + kh) - static_cast<std::ptrdiff_t>(pad);
          if (ih < 0 || ih >= static_cast<std::ptrdiff_t>(in_h)) continue;
          const float* row = input.data() + (ic * in_h + static_cast<std::size_t>(ih)) * in_w;
          for (std::size_t ow = 0; ow < out_w; ++ow) {
            const std::ptrdiff_t iw = static_cast<std::ptrdiff_t>(ow * stride + kw) - static_cast<std::ptrdiff_t>(pad);
            if (iw >= 0 && iw < static_cast<std::ptrdiff_t>(in_w)) dst[oh * out_w + ow] = row[iw];
          }
        }
      }

  Tensor out({out_c, out_h, out_w});
  const std::size_t depth = in_c * taps;
  for (std::size_t oc = 0; oc < out_c; ++oc) std::fill_n(out.data() + oc * pixels, pixels, params.bias[oc]);
  std::size_t oc = 0;
  for (; oc + 4 <= out_c; oc += 4) {
    float* __restrict p0 = out.data() + oc * pixels;
    float* __restrict p1 = p0 + pixels;
    float* __restrict p2 = p1 + pixels;
    float* __restrict p3 = p2 + pixels;
    const float* w0 = w.data() + oc * depth;
    for (std::size_t k = 0; k < depth; ++k) {
      const float a = w0[k], b = w0[depth + k], c = w0[2 * depth + k], d = w0[3 * depth + k];
      const float* __restrict src = cols.data() + k * pixels;
      for (std::size_t p = 0; p < pixels; ++p) {
        const float x = src[p];
        p0[p] += a * x;
        p1[p] += b * x;
        p2[p] += c * x;
        p3[p] += d * x;
      }
    }
  }
  for (; oc < out_c; ++oc) {
    float* __restrict plane = out.data() + oc * pixels;
    const float* wrow = w.data() + oc * depth;
    for (std::size_t k = 0; k < depth; ++k) {
      const float wv = wrow[k];
      const float* __restrict src = cols.data() + k * pixels;
      for (std::size_t p = 0; p < pixels; ++p) plane[p] += wv * src[p];
    }
  }
  return out;
}

Tensor affine(const Tensor& x, const Tensor& weights, const Tensor& bias) {
  if (x.rank() != 1 || weights.rank() != 2) {
    throw ShapeError("affine expects a vector and a matrix, got " + shape_string(x.shape()) + " and " +
                     shape_string(weights.shape()));
  }
  const std::size_t rows = weights.dim(0), cols = weights.dim(1);
  if (cols != x.size()) {
    throw ShapeError("affine weights " + shape_string(weights.shape()) + " do not match input length " +
                     std::to_string(x.size()));
  }
  require_shape(bias, {rows}, "affine bias");
  Tensor y({rows});
  for (std::size_t r = 0; r < rows; ++r) {
    const float* wr = weights.data() + r * cols;
    float acc = bias[r];
    for (std::size_t c = 0; c < cols; ++c) acc += wr[c] * x[c];
    y[r] = acc;
  }
  return y;
}

namespace {

// acc[o] += sum_d wt[d][o] * x[d], d ascending.
void accumulate_transposed(std::span<float> acc, const Tensor& x, const Tensor& weights_t) {
  const std::size_t rows = acc.size();
  float* a = acc.data();
  for (std::size_t d = 0; d < x.size(); ++d) {
    const float xd = x[d];
    const float* wd = weights_t.data() + d * rows;
    for (std::size_t o = 0; o < rows; ++o) a[o] += wd[o] * xd;
  }
}

}  // namespace

Tensor affine_transposed(const Tensor& x, const Tensor& weights_t, const Tensor& bias) {
  if (x.rank() != 1 || weights_t.rank() != 2 || weights_t.dim(0) != x.size()) {
    throw ShapeError("affine_transposed weights " + shape_string(weights_t.shape()) +
                     " do not match input " + shape_string(x.shape()));
  }
  require_shape(bias, {weights_t.dim(1)}, "affine bias");
  Tensor y = bias;
  accumulate_transposed(y.values(), x, weights_t);
  return y;
}

Tensor transpose(const Tensor& matrix) {
  if (matrix.rank() != 2) throw ShapeError("transpose expects a matrix, got " + shape_string(matrix.shape()));
  const std::size_t rows = matrix.dim(0), cols = matrix.dim(1);
  Tensor t({cols, rows});
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) t[c * rows + r] = matrix[r * cols + c];
  return t;
}

float sigmoid(float x) noexcept { return 1.0f / (1.0f + std::exp(-x)); }

float activate(float x, Activation a) noexcept {
  switch (a) {
    case Activation::elu: return x > 0.0f ? x : std::expm1(x);
    case Activation::relu: return x > 0.0f ? x : 0.0f;
    case Activation::tanh: return std::tanh(x);
  }
  return x;
}

void activate_inplace(Tensor& t, Activation a) noexcept {
  for (float& v : t.values()) v = activate(v, a);
}

namespace {

LstmState lstm_gates_to_state(const Tensor& gates, const LstmState& state, std::size_t hidden) {
  LstmState next{Tensor({hidden}), Tensor({hidden})};
  for (std::size_t k = 0; k < hidden; ++k) {
    const float in_gate = sigmoid(gates[k]);
    const float forget_gate = sigmoid(gates[hidden + k]);
    const float candidate = std::tanh(gates[2 * hidden + k]);
    const float out_gate = sigmoid(gates[3 * hidden + k]);
    const float c = forget_gate * state.c[k] + in_gate * candidate;
    next.c[k] = c;
    next.h[k] = out_gate * std::tanh(c);
  }
  return next;
}

std::size_t check_lstm_shapes(const Tensor& x, const LstmState& state, const Shape& wi, const Shape& wh,
                              const Tensor& bias, bool transposed) {
  if (wi.size() != 2 || wh.size() != 2) throw ShapeError("lstm weights must be matrices");
  const std::size_t gate_rows = transposed ? wi[1] : wi[0];
  const std::size_t input_len = transposed ? wi[0] : wi[1];
  if (gate_rows % 4 != 0 || gate_rows == 0) {
    throw ShapeError("lstm gate rows " + std::to_string(gate_rows) + " not a positive multiple of 4");
  }
  const std::size_t hidden = gate_rows / 4;
  const Shape expected_wh = transposed ? Shape{hidden, gate_rows} : Shape{gate_rows, hidden};
  if (wh != expected_wh) {
    throw ShapeError("lstm recurrent weights: expected " + shape_string(expected_wh) + ", found " +
                     shape_string(wh));
  }
  require_shape(bias, {gate_rows}, "lstm bias");
  require_shape(x, {input_len}, "lstm input");
  require_shape(state.h, {hidden}, "lstm hidden state");
  require_shape(state.c, {hidden}, "lstm cell state");
  return hidden;
}

}  // namespace

LstmState lstm_step(const Tensor& x, const LstmState& state, const LstmParams& params) {
  const std::size_t hidden = check_lstm_shapes(x, state, params.input_weights.shape(),
                                               params.recurrent_weights.shape(), params.bias, false);
  const std::size_t rows = 4 * hidden, in_len = x.size();
  Tensor gates({rows});
  for (std::size_t r = 0; r < rows; ++r) {
    float acc = params.bias[r];
    const float* wi = params.input_weights.data() + r * in_len;
    for (std::size_t d = 0; d < in_len; ++d) acc += wi[d] * x[d];
    const float* wh = params.recurrent_weights.data() + r * hidden;
    for (std::size_t k = 0; k < hidden; ++k) acc += wh[k] * state.h[k];
    gates[r] = acc;
  }
  return lstm_gates_to_state(gates, state, hidden);
}

LstmState lstm_step_transposed(const Tensor& x, const LstmState& state, const Tensor& input_weights_t,
                               const Tensor& recurrent_weights_t, const Tensor& bias) {
  const std::size_t hidden =
      check_lstm_shapes(x, state, input_weights_t.shape(), recurrent_weights_t.shape(), bias, true);
  Tensor gates = bias;
  accumulate_transposed(gates.values(), x, input_weights_t);
  accumulate_transposed(gates.values(), state.h, recurrent_weights_t);
  return lstm_gates_to_state(gates, state, hidden);
}

Tensor softmax(const Tensor& logits) {
  if (logits.rank() != 1 || logits.empty()) throw ShapeError("softmax expects a non-empty vector");
  const float top = logits.max_value();
  Tensor out(logits.shape());
  float total = 0.0f;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - top);
    total += out[i];
  }
  for (float& v : out.values()) v /= total;
  return out;
}

std::vector<float> gaussian_kernel_1d(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw ParameterError("blur sigma must be positive, got " + std::to_string(sigma));
  }
  const auto radius = static_cast<std::ptrdiff_t>(std::ceil(3.0 * sigma));
  std::vector<double> raw;
  raw.reserve(static_cast<std::size_t>(2 * radius + 1));
  double total = 0.0;
  for (std::ptrdiff_t d = -radius; d <= radius; ++d) {
    const double g = std::exp(-static_cast<double>(d * d) / (2.0 * sigma * sigma));
    raw.push_back(g);
    total += g;
  }
  std::vector<float> taps;
  taps.reserve(raw.size());
  for (double g : raw) taps.push_back(static_cast<float>(g / total));
  return taps;
}

namespace {

// One renormalized blur pass along rows (horizontal) of a row-major h x w grid.
void blur_pass(const float* src, float* dst, std::size_t lines, std::size_t length, std::size_t line_step,
               std::size_t elem_step, const std::vector<float>& taps) {
  const auto radius = static_cast<std::ptrdiff_t>(taps.size() / 2);
  const auto n = static_cast<std::ptrdiff_t>(length);
  for (std::size_t line = 0; line < lines; ++line) {
    const float* s = src + line * line_step;
    float* d = dst + line * line_step;
    for (std::ptrdiff_t p = 0; p < n; ++p) {
      const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(-radius, -p);
      const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(radius, n - 1 - p);
      float acc = 0.0f, weight = 0.0f;
      for (std::ptrdiff_t o = lo; o <= hi; ++o) {
        const float t = taps[static_cast<std::size_t>(o + radius)];
        acc += t * s[static_cast<std::size_t>(p + o) * elem_step];
        weight += t;
      }
      d[static_cast<std::size_t>(p) * elem_step] = acc / weight;
    }
  }
}

}  // namespace

Tensor gaussian_blur(const Tensor& image, double sigma) {
  if (image.rank() != 2) throw ShapeError("gaussian_blur expects an H x W image, got " + shape_string(image.shape()));
  const std::vector<float> taps = gaussian_kernel_1d(sigma);
  const std::size_t h = image.dim(0), w = image.dim(1);
  Tensor tmp(image.shape());
  Tensor out(image.shape());
  blur_pass(image.data(), tmp.data(), h, w, w, 1, taps);
  blur_pass(tmp.data(), out.data(), w, h, 1, w, taps);
  return out;
}

Tensor gaussian_mask(std::size_t row, std::size_t col, double variance, std::size_t height, std::size_t width) {
  if (row >= height || col >= width) {
    throw ParameterError("mask center (" + std::to_string(row) + ", " + std::to_string(col) +
                         ") outside " + std::to_string(height) + "x" + std::to_string(width));
  }
  if (!(variance > 0.0) || !std::isfinite(variance)) {
    throw ParameterError("mask variance must be positive, got " + std::to_string(variance));
  }
  Tensor mask({height, width});
  for (std::size_t p = 0; p < height; ++p) {
    const double dp = static_cast<double>(p) - static_cast<double>(row);
    for (std::size_t q = 0; q < width; ++q) {
      const double dq = static_cast<double>(q) - static_cast<double>(col);
      mask.at(p, q) = static_cast<float>(std::exp(-(dp * dp + dq * dq) / (2.0 * variance)));
    }
  }
  return mask;
}

Tensor bilinear_upsample(const Tensor& map, std::size_t height, std::size_t width) {
  if (map.rank() != 2 || map.empty()) throw ParameterError("bilinear_upsample needs a non-empty h x w map");
  if (height == 0 || width == 0) throw ParameterError("bilinear_upsample target must be non-empty");
  const std::size_t h = map.dim(0), w = map.dim(1);

  // Source coordinate for each target index; exact integers land on the
  // source sample with zero fractional weight.
  auto axis = [](std::size_t src, std::size_t dst) {
    std::vector<std::pair<std::size_t, double>> pos(dst);
    for (std::size_t k = 0; k < dst; ++k) {
      if (dst == 1 || src == 1) {
        pos[k] = {0, 0.0};
        continue;
      }
      const std::size_t num = k * (src - 1);
      const std::size_t base = num / (dst - 1);
      const double frac = static_cast<double>(num % (dst - 1)) / static_cast<double>(dst - 1);
      pos[k] = {base, frac};
    }
    return pos;
  };
  const auto ry = axis(h, height);
  const auto rx = axis(w, width);

  Tensor out({height, width});
  for (std::size_t y = 0; y < height; ++y) {
    const auto [y0, fy] = ry[y];
    const std::size_t y1 = std::min(y0 + 1, h - 1);
    for (std::size_t x = 0; x < width; ++x) {
      const auto [x0, fx] = rx[x];
      const std::size_t x1 = std::min(x0 + 1, w - 1);
      if (fy == 0.0 && fx == 0.0) {
        out.at(y, x) = map.at(y0, x0);
        continue;
      }
      const double top = (1.0 - fx) * map.at(y0, x0) + fx * map.at(y0, x1);
      const double bottom = (1.0 - fx) * map.at(y1, x0) + fx * map.at(y1, x1);
      double v = (1.0 - fy) * top + fy * bottom;
      // Keep convex combinations inside the source range despite rounding.
      v = std::clamp(v, static_cast<double>(std::min({map.at(y0, x0), map.at(y0, x1), map.at(y1, x0), map.at(y1, x1)})),
                     static_cast<double>(std::max({map.at(y0, x0), map.at(y0, x1), map.at(y1, x0), map.at(y1, x1)})));
      out.at(y, x) = static_cast<float>(v);
    }
  }
  return out;
}

namespace {

template <typename Op>
Tensor zip(const Tensor& a, const Tensor& b, const char* what, Op op) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(what) + ": shapes " + shape_string(a.shape()) + " and " +
                     shape_string(b.shape()) + " differ");
  }
  Tensor out(a.shape());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = op(a[i], b[i]);
  return out;
}

}  // namespace

Tensor hadamard(const Tensor& a, const Tensor& b) {
  return zip(a, b, "hadamard", [](float x, float y) { return x * y; });
}

Tensor add(const Tensor& a, const Tensor& b) {
  return zip(a, b, "add", [](float x, float y) { return x + y; });
}

Tensor subtract(const Tensor& a, const Tensor& b) {
  return zip(a, b, "subtract", [](float x, float y) { return x - y; });
}

Tensor scale(const Tensor& a, float s) {
  Tensor out(a.shape());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * s;
  return out;
}

}  // namespace salient
