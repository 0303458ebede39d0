#include "salient/episode.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include <json.hpp>

#include "salient/error.hpp"

namespace salient {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kEpisodeFormatVersion = 1;

std::string frame_file_name(std::size_t index) {
  char name[32];
  std::snprintf(name, sizeof name, "frame_%06zu.png", index);
  return name;
}

// Portable uniform draw in [0, 1) from the top 24 bits of a 64-bit word.
float unit_float(std::mt19937_64& rng) {
  return static_cast<float>(rng() >> 40) * (1.0f / 16777216.0f);
}

}  // namespace

Frame::Frame(Tensor pixels) : pixels_(std::move(pixels)) {
  require_shape(pixels_, {kFrameSize, kFrameSize}, "frame");
  for (float v : pixels_.values()) {
    if (!(v >= 0.0f && v <= 1.0f)) throw ParameterError("frame value " + std::to_string(v) + " outside [0, 1]");
  }
}

Tensor to_grayscale(const RawFrame& raw, const std::array<double, 3>& weights) {
  if (raw.channels != 1 && raw.channels != 3) {
    throw ParameterError("raw frame must have 1 or 3 channels, got " + std::to_string(raw.channels));
  }
  if (raw.data.size() != raw.height * raw.width * raw.channels) {
    throw ShapeError("raw frame data does not match " + std::to_string(raw.height) + "x" +
                     std::to_string(raw.width) + "x" + std::to_string(raw.channels));
  }
  Tensor gray({raw.height, raw.width});
  for (std::size_t r = 0; r < raw.height; ++r) {
    for (std::size_t c = 0; c < raw.width; ++c) {
      if (raw.channels == 1) {
        gray.at(r, c) = raw.at(r, c);
      } else {
        const double v = weights[0] * raw.at(r, c, 0) + weights[1] * raw.at(r, c, 1) + weights[2] * raw.at(r, c, 2);
        gray.at(r, c) = static_cast<float>(v);
      }
    }
  }
  return gray;
}

Tensor downsample2x(const Tensor& gray) {
  if (gray.rank() != 2) throw ShapeError("downsample2x expects a 2-D image");
  const std::size_t h = gray.dim(0) / 2, w = gray.dim(1) / 2;
  Tensor out({h, w});
  for (std::size_t r = 0; r < h; ++r)
    for (std::size_t c = 0; c < w; ++c)
      out.at(r, c) = 0.25f * (gray.at(2 * r, 2 * c) + gray.at(2 * r, 2 * c + 1) + gray.at(2 * r + 1, 2 * c) +
                              gray.at(2 * r + 1, 2 * c + 1));
  return out;
}

Frame preprocess(const RawFrame& raw, const PreprocessConfig& cfg) {
  const double weight_sum = cfg.grayscale_weights[0] + cfg.grayscale_weights[1] + cfg.grayscale_weights[2];
  if (std::abs(weight_sum - 1.0) > 1e-6) throw ParameterError("grayscale weights must sum to 1");
  const Tensor small = downsample2x(to_grayscale(raw, cfg.grayscale_weights));
  if (cfg.crop_top + kFrameSize > small.dim(0) || cfg.crop_left + kFrameSize > small.dim(1)) {
    throw ParameterError("crop window at (" + std::to_string(cfg.crop_top) + ", " + std::to_string(cfg.crop_left) +
                         ") does not fit the " + std::to_string(small.dim(0)) + "x" + std::to_string(small.dim(1)) +
                         " downsampled frame");
  }
  Tensor out({kFrameSize, kFrameSize});
  for (std::size_t r = 0; r < kFrameSize; ++r)
    for (std::size_t c = 0; c < kFrameSize; ++c)
      out.at(r, c) = std::clamp(small.at(cfg.crop_top + r, cfg.crop_left + c) / 255.0f, 0.0f, 1.0f);
  return Frame(std::move(out));
}

Frame inject_hint_pixels(const Frame& frame, std::size_t action, std::size_t n_actions, std::size_t rows) {
  if (n_actions == 0 || n_actions > kFrameSize) throw ParameterError("n_actions must be in [1, 80]");
  if (action >= n_actions) {
    throw ParameterError("hint action " + std::to_string(action) + " outside [0, " + std::to_string(n_actions) + ")");
  }
  if (rows < 1 || rows > 5) throw ParameterError("hint rows must be in [1, 5], got " + std::to_string(rows));
  Tensor px = frame.pixels();
  const std::size_t block = kFrameSize / n_actions;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < kFrameSize; ++c) px.at(r, c) = 0.0f;
    for (std::size_t c = action * block; c < (action + 1) * block; ++c) px.at(r, c) = 1.0f;
  }
  return Frame(std::move(px));
}

Image8 frame_to_image(const Frame& frame) {
  Image8 img{kFrameSize, kFrameSize, 1, std::vector<std::uint8_t>(kFrameSize * kFrameSize)};
  const auto values = frame.pixels().values();
  for (std::size_t i = 0; i < values.size(); ++i) {
    img.data[i] = static_cast<std::uint8_t>(std::lround(std::clamp(values[i], 0.0f, 1.0f) * 255.0f));
  }
  return img;
}

Frame image_to_frame(const Image8& image) {
  if (image.height != kFrameSize || image.width != kFrameSize || image.channels != 1) {
    throw ShapeError("episode frames must be 80x80 grayscale, got " + std::to_string(image.height) + "x" +
                     std::to_string(image.width) + "x" + std::to_string(image.channels));
  }
  Tensor px({kFrameSize, kFrameSize});
  for (std::size_t i = 0; i < image.data.size(); ++i) px[i] = static_cast<float>(image.data[i]) / 255.0f;
  return Frame(std::move(px));
}

Episode load_episode(const fs::path& dir) {
  const fs::path manifest_path = dir / "episode.json";
  if (!fs::exists(manifest_path)) throw LoadError("episode manifest not found: " + manifest_path.string());
  json manifest;
  try {
    std::ifstream in(manifest_path);
    manifest = json::parse(in);
  } catch (const json::exception& e) {
    throw LoadError("cannot parse " + manifest_path.string() + ": " + e.what());
  }

  Episode episode;
  std::size_t length = 0;
  try {
    const int version = manifest.value("format_version", kEpisodeFormatVersion);
    if (version != kEpisodeFormatVersion) {
      throw LoadError("unsupported episode format version " + std::to_string(version));
    }
    length = manifest.at("T").get<std::size_t>();
    episode.source = manifest.value("source", dir.filename().string());
    if (manifest.contains("actions") && !manifest["actions"].is_null()) {
      episode.actions = manifest["actions"].get<std::vector<int>>();
    }
  } catch (const json::exception& e) {
    throw LoadError("malformed episode manifest " + manifest_path.string() + ": " + e.what());
  }
  if (length == 0) throw LoadError("episode " + dir.string() + " declares T = 0");
  if (episode.actions && episode.actions->size() != length) {
    throw LoadError("episode " + dir.string() + " has " + std::to_string(episode.actions->size()) +
                    " actions for T = " + std::to_string(length));
  }

  episode.frames.reserve(length);
  for (std::size_t t = 0; t < length; ++t) {
    const fs::path file = dir / frame_file_name(t);
    if (!fs::exists(file)) {
      throw LoadError("frame " + std::to_string(t) + " missing: " + file.string() + " (manifest declares T = " +
                      std::to_string(length) + ")");
    }
    try {
      episode.frames.push_back(image_to_frame(read_png(file)));
    } catch (const ShapeError& e) {
      throw LoadError("frame " + file.string() + ": " + e.what());
    }
  }
  return episode;
}

void save_episode(const Episode& episode, const fs::path& dir) {
  if (episode.frames.empty()) throw ParameterError("cannot save an empty episode");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  for (std::size_t t = 0; t < episode.frames.size(); ++t) write_png(dir / frame_file_name(t), frame_to_image(episode.frames[t]));
  json manifest = {{"format_version", kEpisodeFormatVersion}, {"T", episode.frames.size()}, {"source", episode.source}};
  if (episode.actions) manifest["actions"] = *episode.actions;
  std::ofstream out(dir / "episode.json", std::ios::trunc);
  if (!out) throw IoError("cannot write " + (dir / "episode.json").string());
  out << manifest.dump(2) << '\n';
}

SynthPattern parse_pattern(const std::string& name) {
  if (name == "bouncing_dot" || name == "bouncing-dot") return SynthPattern::bouncing_dot;
  if (name == "drifting_bar" || name == "drifting-bar") return SynthPattern::drifting_bar;
  throw ConfigError("unknown pattern '" + name + "' (expected bouncing_dot or drifting_bar)");
}

Episode synth_episode(std::uint64_t seed, std::size_t length, SynthPattern pattern) {
  if (length == 0) throw ParameterError("synthetic episode needs at least one frame");
  std::mt19937_64 rng(seed);
  Episode episode;
  episode.frames.reserve(length);

  if (pattern == SynthPattern::bouncing_dot) {
    constexpr long lo = 1, hi = static_cast<long>(kFrameSize) - 2;
    auto draw_velocity = [&rng] {
      const long v = static_cast<long>(rng() % 2) + 1;
      return (rng() % 2) ? v : -v;
    };
    long row = lo + static_cast<long>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
    long col = lo + static_cast<long>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
    long v_row = draw_velocity(), v_col = draw_velocity();
    auto advance = [](long& p, long& v) {
      p += v;
      if (p < lo) {
        p = 2 * lo - p;
        v = -v;
      } else if (p > hi) {
        p = 2 * hi - p;
        v = -v;
      }
    };
    for (std::size_t t = 0; t < length; ++t) {
      if (t > 0) {
        advance(row, v_row);
        advance(col, v_col);
      }
      Tensor px({kFrameSize, kFrameSize});
      for (long r = row - 1; r <= row + 1; ++r)
        for (long c = col - 1; c <= col + 1; ++c) px.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = 1.0f;
      episode.frames.emplace_back(std::move(px));
    }
    episode.source = "synth:bouncing_dot:" + std::to_string(seed);
  } else {
    std::size_t col = static_cast<std::size_t>(rng() % kFrameSize);
    const std::size_t speed = static_cast<std::size_t>(rng() % 3) + 1;
    for (std::size_t t = 0; t < length; ++t) {
      Tensor px({kFrameSize, kFrameSize});
      for (std::size_t w = 0; w < 3; ++w) {
        const std::size_t c = (col + w) % kFrameSize;
        for (std::size_t r = 0; r < kFrameSize; ++r) px.at(r, c) = 1.0f;
      }
      episode.frames.emplace_back(std::move(px));
      col = (col + speed) % kFrameSize;
    }
    episode.source = "synth:drifting_bar:" + std::to_string(seed);
  }
  return episode;
}

ActorCriticParams synth_weights(std::uint64_t seed, const NetworkConfig& config, double scale) {
  if (!(scale >= 0.0) || !std::isfinite(scale)) throw ParameterError("weight scale must be non-negative");
  config.validate();
  std::mt19937_64 rng(seed);
  ActorCriticParams params = zero_params(config);
  const float s = static_cast<float>(scale);
  for (const auto& [name, shape] : parameter_layout(config)) {
    Tensor& t = parameter_by_name(params, name);
    for (float& v : t.values()) v = s * (2.0f * unit_float(rng) - 1.0f);
  }
  return params;
}

}  // namespace salient
