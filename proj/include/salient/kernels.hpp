#pragma once

#include <cstddef>
#include <string_view>
#include <utility>
#include <vector>

#include "salient/tensor.hpp"

namespace salient {

struct Conv2dParams {
  Tensor weights;  // out_channels x in_channels x kH x kW
  Tensor bias;     // out_channels
  std::size_t stride = 2;
  std::size_t padding = 1;
};

/// Gate rows are laid out in blocks of H: input, forget, candidate, output.
struct LstmParams {
  Tensor input_weights;      // 4H x D
  Tensor recurrent_weights;  // 4H x H
  Tensor bias;               // 4H
};

struct LstmState {
  Tensor h;
  Tensor c;
};

enum class Activation { elu, relu, tanh };

Activation parse_activation(std::string_view name);
std::string_view activation_name(Activation a);

/// Cross-correlation of a C x H x W input. Every output element accumulates
/// bias first, then taps in (in_channel, kh, kw) order; padded taps are skipped.
Tensor conv2d(const Tensor& input, const Conv2dParams& params);

/// Output spatial extent of conv2d along one axis.
std::size_t conv_output_extent(std::size_t extent, std::size_t kernel, std::size_t stride,
                               std::size_t padding);

/// y = W x + b, accumulated left to right over x for every row.
Tensor affine(const Tensor& x, const Tensor& weights, const Tensor& bias);

/// Same result as affine(x, transpose(weights_t), bias), bit for bit, but
/// reads a D x O weight matrix so the inner loop runs across output rows.
Tensor affine_transposed(const Tensor& x, const Tensor& weights_t, const Tensor& bias);

Tensor transpose(const Tensor& matrix);

LstmState lstm_step(const Tensor& x, const LstmState& state, const LstmParams& params);

/// lstm_step with pre-transposed weight matrices (D x 4H and H x 4H).
LstmState lstm_step_transposed(const Tensor& x, const LstmState& state,
                               const Tensor& input_weights_t, const Tensor& recurrent_weights_t,
                               const Tensor& bias);

float sigmoid(float x) noexcept;
float activate(float x, Activation a) noexcept;
void activate_inplace(Tensor& t, Activation a) noexcept;

Tensor softmax(const Tensor& logits);

/// Normalized 1-D Gaussian taps for offsets -r..r with r = ceil(3 sigma).
std::vector<float> gaussian_kernel_1d(double sigma);

/// Separable Gaussian blur of an H x W image. Near borders each pass divides
/// by the weight of the taps that fall inside the image.
Tensor gaussian_blur(const Tensor& image, double sigma);

/// exp(-d^2 / (2 variance)) around (row, col), so the center value is 1.
Tensor gaussian_mask(std::size_t row, std::size_t col, double variance, std::size_t height,
                     std::size_t width);

/// Align-corners bilinear resize of an h x w map.
Tensor bilinear_upsample(const Tensor& map, std::size_t height, std::size_t width);

Tensor hadamard(const Tensor& a, const Tensor& b);
Tensor add(const Tensor& a, const Tensor& b);
Tensor subtract(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, float s);

}  // namespace salient
