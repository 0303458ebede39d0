#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "salient/episode.hpp"
#include "salient/image_io.hpp"
#include "salient/saliency.hpp"
#include "salient/tensor.hpp"

namespace salient {

struct Normalization {
  enum class Kind { per_episode_max, fixed_scale } kind = Kind::per_episode_max;
  double scale = 1.0;  // fixed_scale only
};

/// "episode-max" or "fixed:<s>".
Normalization parse_normalization(const std::string& text);
std::string normalization_string(const Normalization& norm);

/// Actor saliency goes to blue, critic saliency to red.
struct OverlayConfig {
  Normalization normalization;
  double intensity_gain = 1.0;
};

/// Denominators that map each head's saliency onto [0, 1] before the gain.
struct OverlayScales {
  double actor = 0.0;
  double critic = 0.0;
};

/// Per-episode maxima (or the fixed scale) over every map of each head.
OverlayScales resolve_scales(const std::vector<SaliencyMap>& actor_maps, const std::vector<SaliencyMap>& critic_maps,
                             const Normalization& norm);

/// Planar RGB float image, values in [0, 1].
struct RgbImage {
  Tensor red, green, blue;  // each H x W
};

/// Gray frame replicated to RGB, then blue += actor / scale * gain and
/// red += critic / scale * gain, clamped to [0, 1]. A zero scale adds nothing.
RgbImage overlay(const Frame& frame, const SaliencyMap* actor, const SaliencyMap* critic, const OverlayConfig& cfg,
                 const OverlayScales& scales);

/// Nearest-neighbour integer upscale and 8-bit quantization.
Image8 to_image8(const RgbImage& image, std::size_t upscale = 1);

struct RegionSpec {
  std::size_t row_begin = 0, row_end = 0;  // half-open
  std::size_t col_begin = 0, col_end = 0;

  void validate(std::size_t height = 80, std::size_t width = 80) const;
};

/// "r0:r1,c0:c1" with half-open ranges.
RegionSpec parse_region(const std::string& text);

/// Share of the map's total inside the region; 0 for an all-zero map.
double region_mass(const SaliencyMap& map, const RegionSpec& region);

/// Writes overlay_%06d.png, numbering from `first_index`.
void write_frames(const std::vector<Image8>& frames, const std::filesystem::path& out_dir, std::size_t first_index = 0);

struct Series {
  std::vector<std::size_t> t;
  std::vector<std::string> names;
  std::vector<std::vector<double>> columns;  // columns[k][row]
};

/// CSV with a header row; `t` is the first column.
void write_series(const Series& series, const std::filesystem::path& out_path);

}  // namespace salient
