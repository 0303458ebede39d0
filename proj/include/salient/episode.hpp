#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "salient/image_io.hpp"
#include "salient/network.hpp"
#include "salient/tensor.hpp"

namespace salient {

/// Preprocessed 80 x 80 network input with every value in [0, 1].
class Frame {
 public:
  Frame() : pixels_({kFrameSize, kFrameSize}) {}
  /// Throws ShapeError on wrong dimensions, ParameterError on values outside [0, 1].
  explicit Frame(Tensor pixels);

  const Tensor& pixels() const noexcept { return pixels_; }
  float at(std::size_t r, std::size_t c) const noexcept { return pixels_.at(r, c); }

  friend bool operator==(const Frame&, const Frame&) = default;

 private:
  Tensor pixels_;
};

using RawFrame = Image8;

struct PreprocessConfig {
  std::size_t crop_top = 0;
  std::size_t crop_left = 0;
  std::array<double, 3> grayscale_weights{0.299, 0.587, 0.114};
};

/// Weighted channel sum, unnormalized (0..255).
Tensor to_grayscale(const RawFrame& raw, const std::array<double, 3>& weights);

/// 2 x 2 mean pooling; odd trailing rows/columns are dropped.
Tensor downsample2x(const Tensor& gray);

/// Grayscale, halve, crop 80 x 80 at the configured offsets, scale to [0, 1].
Frame preprocess(const RawFrame& raw, const PreprocessConfig& cfg);

/// Zeroes the top `rows` rows and lights the block of floor(80 / n_actions)
/// columns belonging to `action`. Leftover right columns stay dark.
Frame inject_hint_pixels(const Frame& frame, std::size_t action, std::size_t n_actions, std::size_t rows);

struct Episode {
  std::vector<Frame> frames;
  std::string source;
  std::optional<std::vector<int>> actions;

  std::size_t length() const noexcept { return frames.size(); }
};

/// Directory layout: `episode.json` plus `frame_%06d.png` (8-bit grayscale).
Episode load_episode(const std::filesystem::path& dir);
void save_episode(const Episode& episode, const std::filesystem::path& dir);

Image8 frame_to_image(const Frame& frame);
Frame image_to_frame(const Image8& image);

enum class SynthPattern { bouncing_dot, drifting_bar };

SynthPattern parse_pattern(const std::string& name);

/// Bouncing dot: a 3 x 3 bright square whose center moves by an integer
/// velocity each step inside [1, 78] on both axes. Crossing a wall reflects
/// the position about that wall and negates the velocity component.
/// Drifting bar: a 3-column full-height bar moving right, wrapping at 80.
Episode synth_episode(std::uint64_t seed, std::size_t length, SynthPattern pattern);

/// Uniform values in [-scale, scale] for every tensor, drawn in container order.
ActorCriticParams synth_weights(std::uint64_t seed, const NetworkConfig& config, double scale);

}  // namespace salient
