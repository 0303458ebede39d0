#include "salient/network.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "salient/binary_io.hpp"
#include "salient/error.hpp"

namespace salient {

namespace fs = std::filesystem;
using nlohmann::json;

std::size_t NetworkConfig::lstm_input_size() const {
  std::size_t extent = kFrameSize;
  for (std::size_t l = 0; l < kConvLayers; ++l) extent = conv_output_extent(extent, 3, 2, 1);
  return kConvChannels * extent * extent;
}

void NetworkConfig::validate() const {
  if (n_actions < 2) throw ConfigError("n_actions must be at least 2, got " + std::to_string(n_actions));
  if (hidden_size == 0) throw ConfigError("hidden_size must be positive");
}

std::vector<std::pair<std::string, Shape>> parameter_layout(const NetworkConfig& config) {
  std::vector<std::pair<std::string, Shape>> layout;
  for (std::size_t l = 0; l < kConvLayers; ++l) {
    const std::string prefix = "conv" + std::to_string(l + 1);
    layout.push_back({prefix + ".weight", {kConvChannels, l == 0 ? 1 : kConvChannels, 3, 3}});
    layout.push_back({prefix + ".bias", {kConvChannels}});
  }
  const std::size_t h = config.hidden_size;
  layout.push_back({"lstm.weight_ih", {4 * h, config.lstm_input_size()}});
  layout.push_back({"lstm.weight_hh", {4 * h, h}});
  layout.push_back({"lstm.bias", {4 * h}});
  layout.push_back({"head.weight", {config.n_actions + 1, h}});
  layout.push_back({"head.bias", {config.n_actions + 1}});
  return layout;
}

namespace {

template <typename Params>
auto& lookup(Params& params, const std::string& name) {
  if (name.rfind("conv", 0) == 0 && name.size() > 5) {
    const std::size_t layer = static_cast<std::size_t>(name[4] - '1');
    const std::string field = name.substr(name.find('.') + 1);
    if (layer < params.conv.size()) {
      if (field == "weight") return params.conv[layer].weights;
      if (field == "bias") return params.conv[layer].bias;
    }
  }
  if (name == "lstm.weight_ih") return params.lstm.input_weights;
  if (name == "lstm.weight_hh") return params.lstm.recurrent_weights;
  if (name == "lstm.bias") return params.lstm.bias;
  if (name == "head.weight") return params.head_weights;
  if (name == "head.bias") return params.head_bias;
  throw ConfigError("unknown parameter tensor '" + name + "'");
}

}  // namespace

Tensor& parameter_by_name(ActorCriticParams& params, const std::string& name) { return lookup(params, name); }

const Tensor& parameter_by_name(const ActorCriticParams& params, const std::string& name) {
  return lookup(params, name);
}

ActorCriticParams zero_params(const NetworkConfig& config) {
  ActorCriticParams params;
  params.conv.resize(kConvLayers);
  for (const auto& [name, shape] : parameter_layout(config)) parameter_by_name(params, name) = Tensor::zeros(shape);
  return params;
}

void validate_params(const NetworkConfig& config, const ActorCriticParams& params) {
  config.validate();
  if (params.conv.size() != kConvLayers) {
    throw ShapeError("expected " + std::to_string(kConvLayers) + " conv layers, found " +
                     std::to_string(params.conv.size()));
  }
  for (const auto& [name, shape] : parameter_layout(config)) require_shape(parameter_by_name(params, name), shape, name);
  for (const auto& layer : params.conv) {
    if (layer.stride != 2 || layer.padding != 1) throw ShapeError("conv layers must use stride 2 and padding 1");
  }
}

ActorCritic::ActorCritic(NetworkConfig config, ActorCriticParams params)
    : config_(config), params_(std::move(params)) {
  validate_params(config_, params_);
  lstm_input_t_ = transpose(params_.lstm.input_weights);
  lstm_recurrent_t_ = transpose(params_.lstm.recurrent_weights);
  head_t_ = transpose(params_.head_weights);
}

Tensor ActorCritic::encode(const Tensor& image) const {
  require_shape(image, {kFrameSize, kFrameSize}, "frame");
  Tensor x = image.reshaped({1, kFrameSize, kFrameSize});
  for (const auto& layer : params_.conv) {
    x = conv2d(x, layer);
    activate_inplace(x, config_.activation);
  }
  return x.reshaped({x.size()});
}

std::pair<PolicyOutput, RecurrentState> ActorCritic::step(const Tensor& image, const RecurrentState& state) const {
  const Tensor features = encode(image);
  LstmState next = lstm_step_transposed(features, {state.h, state.c}, lstm_input_t_, lstm_recurrent_t_,
                                        params_.lstm.bias);
  const Tensor head = affine_transposed(next.h, head_t_, params_.head_bias);
  const std::size_t n = config_.n_actions;
  PolicyOutput out;
  out.logits = Tensor({n}, std::vector<float>(head.data(), head.data() + n));
  out.probs = softmax(out.logits);
  out.value = head[n];
  return {std::move(out), RecurrentState{std::move(next.h), std::move(next.c)}};
}

std::pair<PolicyOutput, RecurrentState> forward_step(const ActorCritic& net, const Tensor& image,
                                                     const RecurrentState& state) {
  return net.step(image, state);
}

LoadedWeights load_weights(const fs::path& dir) {
  const fs::path manifest_path = dir / "manifest.json";
  if (!fs::exists(manifest_path)) throw LoadError("weights manifest not found: " + manifest_path.string());
  json manifest;
  try {
    std::ifstream in(manifest_path);
    manifest = json::parse(in);
  } catch (const json::exception& e) {
    throw LoadError("cannot parse " + manifest_path.string() + ": " + e.what());
  }

  LoadedWeights loaded;
  try {
    const int version = manifest.at("format_version").get<int>();
    if (version != kWeightFormatVersion) {
      throw LoadError("unsupported weight format version " + std::to_string(version) + " in " +
                      manifest_path.string());
    }
    loaded.config.n_actions = manifest.at("n_actions").get<std::size_t>();
    loaded.config.activation = parse_activation(manifest.value("activation", std::string("elu")));
    loaded.config.hidden_size = manifest.value("hidden_size", kDefaultHidden);
  } catch (const json::exception& e) {
    throw LoadError("malformed manifest " + manifest_path.string() + ": " + e.what());
  }
  loaded.config.validate();

  std::map<std::string, json> entries;
  for (const auto& entry : manifest.value("tensors", json::array())) {
    entries[entry.at("name").get<std::string>()] = entry;
  }

  loaded.params.conv.resize(kConvLayers);
  for (const auto& [name, shape] : parameter_layout(loaded.config)) {
    const auto it = entries.find(name);
    if (it == entries.end()) throw LoadError("missing tensor '" + name + "' in " + manifest_path.string());
    const json& entry = it->second;
    const Shape declared = entry.at("shape").get<Shape>();
    if (declared != shape) {
      throw LoadError("tensor '" + name + "': expected shape " + shape_string(shape) + ", found " +
                      shape_string(declared));
    }
    if (entry.value("dtype", std::string("f32")) != "f32") {
      throw LoadError("tensor '" + name + "': only f32 is supported");
    }
    const fs::path blob = dir / entry.value("file", name + ".bin");
    parameter_by_name(loaded.params, name) = Tensor(shape, read_f32_le(blob, element_count(shape), "tensor '" + name + "'"));
  }
  return loaded;
}

void save_weights(const fs::path& dir, const NetworkConfig& config, const ActorCriticParams& params) {
  validate_params(config, params);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

  json tensors = json::array();
  for (const auto& [name, shape] : parameter_layout(config)) {
    const std::string file = name + ".bin";
    write_f32_le(dir / file, parameter_by_name(params, name).values());
    tensors.push_back({{"name", name}, {"shape", shape}, {"dtype", "f32"}, {"file", file}});
  }
  json manifest = {{"format_version", kWeightFormatVersion},
                   {"n_actions", config.n_actions},
                   {"activation", std::string(activation_name(config.activation))},
                   {"hidden_size", config.hidden_size},
                   {"byte_order", "little"},
                   {"layout", "row-major"},
                   {"tensors", tensors}};
  std::ofstream out(dir / "manifest.json", std::ios::trunc);
  if (!out) throw IoError("cannot write " + (dir / "manifest.json").string());
  out << manifest.dump(2) << '\n';
}

}  // namespace salient
