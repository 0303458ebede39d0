#include "salient/render.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "salient/error.hpp"

namespace salient {

namespace fs = std::filesystem;

Normalization parse_normalization(const std::string& text) {
  if (text == "episode-max" || text == "episode_max") return {};
  if (text.rfind("fixed:", 0) == 0) {
    const std::string value = text.substr(6);
    double s = 0.0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), s);
    if (ec != std::errc() || ptr != value.data() + value.size() || !(s > 0.0) || !std::isfinite(s)) {
      throw ConfigError("--norm fixed scale must be a positive number, got '" + value + "'");
    }
    return {Normalization::Kind::fixed_scale, s};
  }
  throw ConfigError("--norm must be episode-max or fixed:<s>, got '" + text + "'");
}

std::string normalization_string(const Normalization& norm) {
  if (norm.kind == Normalization::Kind::per_episode_max) return "episode-max";
  std::ostringstream os;
  os << "fixed:" << norm.scale;
  return os.str();
}

OverlayScales resolve_scales(const std::vector<SaliencyMap>& actor_maps, const std::vector<SaliencyMap>& critic_maps,
                             const Normalization& norm) {
  if (norm.kind == Normalization::Kind::fixed_scale) return {norm.scale, norm.scale};
  auto episode_max = [](const std::vector<SaliencyMap>& maps) {
    double m = 0.0;
    for (const auto& map : maps) m = std::max(m, static_cast<double>(map.scores.max_value()));
    return m;
  };
  return {episode_max(actor_maps), episode_max(critic_maps)};
}

namespace {

void check_map(const SaliencyMap* map, const char* what) {
  if (map && map->scores.shape() != Shape{kFrameSize, kFrameSize}) {
    throw ParameterError(std::string(what) + " map must be 80x80, got " + shape_string(map->scores.shape()));
  }
}

void add_channel(Tensor& channel, const SaliencyMap* map, double scale, double gain) {
  if (!map || !(scale > 0.0)) return;
  for (std::size_t k = 0; k < channel.size(); ++k) {
    const double v = channel[k] + static_cast<double>(map->scores[k]) / scale * gain;
    channel[k] = static_cast<float>(std::clamp(v, 0.0, 1.0));
  }
}

}  // namespace

RgbImage overlay(const Frame& frame, const SaliencyMap* actor, const SaliencyMap* critic, const OverlayConfig& cfg,
                 const OverlayScales& scales) {
  if (!(cfg.intensity_gain > 0.0)) throw ParameterError("overlay gain must be positive");
  check_map(actor, "actor");
  check_map(critic, "critic");
  RgbImage img{frame.pixels(), frame.pixels(), frame.pixels()};
  add_channel(img.blue, actor, scales.actor, cfg.intensity_gain);
  add_channel(img.red, critic, scales.critic, cfg.intensity_gain);
  return img;
}

Image8 to_image8(const RgbImage& image, std::size_t upscale) {
  if (upscale == 0) throw ParameterError("upscale must be at least 1");
  const std::size_t h = image.red.dim(0), w = image.red.dim(1);
  Image8 out{h * upscale, w * upscale, 3, std::vector<std::uint8_t>(h * w * upscale * upscale * 3)};
  auto quantize = [](float v) { return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0f, 1.0f) * 255.0f)); };
  for (std::size_t r = 0; r < out.height; ++r) {
    for (std::size_t c = 0; c < out.width; ++c) {
      const std::size_t src = (r / upscale) * w + (c / upscale);
      out.at(r, c, 0) = quantize(image.red[src]);
      out.at(r, c, 1) = quantize(image.green[src]);
      out.at(r, c, 2) = quantize(image.blue[src]);
    }
  }
  return out;
}

void RegionSpec::validate(std::size_t height, std::size_t width) const {
  if (row_begin >= row_end || col_begin >= col_end || row_end > height || col_end > width) {
    throw ConfigError("region rows " + std::to_string(row_begin) + ":" + std::to_string(row_end) + ", cols " +
                      std::to_string(col_begin) + ":" + std::to_string(col_end) + " is empty or outside " +
                      std::to_string(height) + "x" + std::to_string(width));
  }
}

RegionSpec parse_region(const std::string& text) {
  RegionSpec region;
  char tail = 0;
  if (std::sscanf(text.c_str(), "%zu:%zu,%zu:%zu%c", &region.row_begin, &region.row_end, &region.col_begin,
                  &region.col_end, &tail) != 4) {
    throw ConfigError("--region must look like r0:r1,c0:c1, got '" + text + "'");
  }
  region.validate();
  return region;
}

double region_mass(const SaliencyMap& map, const RegionSpec& region) {
  const std::size_t h = map.scores.dim(0), w = map.scores.dim(1);
  region.validate(h, w);
  double inside = 0.0, total = 0.0;
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      const double v = map.scores.at(r, c);
      total += v;
      if (r >= region.row_begin && r < region.row_end && c >= region.col_begin && c < region.col_end) inside += v;
    }
  }
  return total > 0.0 ? inside / total : 0.0;
}

void write_frames(const std::vector<Image8>& frames, const fs::path& out_dir, std::size_t first_index) {
  if (frames.empty()) throw ParameterError("no frames to write");
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());
  for (std::size_t k = 0; k < frames.size(); ++k) {
    char name[32];
    std::snprintf(name, sizeof name, "overlay_%06zu.png", first_index + k);
    write_png(out_dir / name, frames[k]);
  }
}

void write_series(const Series& series, const fs::path& out_path) {
  if (series.t.empty()) throw ParameterError("empty series");
  if (series.names.size() != series.columns.size()) throw ParameterError("series names and columns differ in count");
  for (const auto& col : series.columns) {
    if (col.size() != series.t.size()) throw ParameterError("series column length differs from t");
  }
  std::ofstream out(out_path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + out_path.string());
  out << 't';
  for (const auto& name : series.names) out << ',' << name;
  out << '\n';
  char buf[64];
  for (std::size_t row = 0; row < series.t.size(); ++row) {
    out << series.t[row];
    for (const auto& col : series.columns) {
      std::snprintf(buf, sizeof buf, "%.9g", col[row]);
      out << ',' << buf;
    }
    out << '\n';
  }
  if (!out) throw IoError("short write to " + out_path.string());
}

}  // namespace salient
