#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "salient/kernels.hpp"
#include "salient/tensor.hpp"

namespace salient {

inline constexpr std::size_t kFrameSize = 80;
inline constexpr std::size_t kConvChannels = 32;
inline constexpr std::size_t kConvLayers = 4;
inline constexpr std::size_t kDefaultHidden = 256;
inline constexpr int kWeightFormatVersion = 1;

struct NetworkConfig {
  std::size_t n_actions = 6;
  Activation activation = Activation::elu;
  std::size_t hidden_size = kDefaultHidden;

  /// 32 channels x 5 x 5 after four stride-2 convolutions of an 80 x 80 frame.
  std::size_t lstm_input_size() const;
  void validate() const;
};

struct ActorCriticParams {
  std::vector<Conv2dParams> conv;  // four layers, 32 filters, 3x3, stride 2, pad 1
  LstmParams lstm;
  Tensor head_weights;  // (n + 1) x hidden; row n is the value
  Tensor head_bias;     // n + 1
};

/// Every tensor of the architecture in container order, with its expected shape.
std::vector<std::pair<std::string, Shape>> parameter_layout(const NetworkConfig& config);

/// Mutable access to the tensor stored under a layout name.
Tensor& parameter_by_name(ActorCriticParams& params, const std::string& name);
const Tensor& parameter_by_name(const ActorCriticParams& params, const std::string& name);

/// Zero-filled parameters with the architecture's shapes.
ActorCriticParams zero_params(const NetworkConfig& config);

/// Throws ShapeError naming the first tensor whose shape is wrong.
void validate_params(const NetworkConfig& config, const ActorCriticParams& params);

struct RecurrentState {
  Tensor h;
  Tensor c;

  static RecurrentState zeros(std::size_t hidden) { return {Tensor({hidden}), Tensor({hidden})}; }
  friend bool operator==(const RecurrentState&, const RecurrentState&) = default;
};

struct PolicyOutput {
  Tensor logits;  // pre-softmax policy units
  Tensor probs;
  float value = 0.0f;

  friend bool operator==(const PolicyOutput&, const PolicyOutput&) = default;
};

/// Immutable network: configuration, weights, and the transposed copies the
/// recurrent and head layers read at inference time.
class ActorCritic {
 public:
  ActorCritic(NetworkConfig config, ActorCriticParams params);

  const NetworkConfig& config() const noexcept { return config_; }
  const ActorCriticParams& params() const noexcept { return params_; }

  /// Conv stack on one 80 x 80 image, flattened channel-major to the LSTM input.
  Tensor encode(const Tensor& image) const;

  /// One recurrent step: conv stack, LSTM, then the n + 1 unit head.
  std::pair<PolicyOutput, RecurrentState> step(const Tensor& image, const RecurrentState& state) const;

 private:
  NetworkConfig config_;
  ActorCriticParams params_;
  Tensor lstm_input_t_;
  Tensor lstm_recurrent_t_;
  Tensor head_t_;
};

std::pair<PolicyOutput, RecurrentState> forward_step(const ActorCritic& net, const Tensor& image,
                                                     const RecurrentState& state);

struct LoadedWeights {
  NetworkConfig config;
  ActorCriticParams params;
};

/// Reads `manifest.json` plus one little-endian f32 blob per tensor from `dir`.
LoadedWeights load_weights(const std::filesystem::path& dir);

/// Writes the container read by load_weights; creates `dir` if needed.
void save_weights(const std::filesystem::path& dir, const NetworkConfig& config, const ActorCriticParams& params);

}  // namespace salient
