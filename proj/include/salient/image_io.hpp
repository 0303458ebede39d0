#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace salient {

/// Interleaved 8-bit image, 1 (gray) or 3 (RGB) channels.
struct Image8 {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t channels = 1;
  std::vector<std::uint8_t> data;

  std::uint8_t& at(std::size_t r, std::size_t c, std::size_t ch = 0) { return data[(r * width + c) * channels + ch]; }
  std::uint8_t at(std::size_t r, std::size_t c, std::size_t ch = 0) const {
    return data[(r * width + c) * channels + ch];
  }
};

/// Reads a PNG; grayscale sources stay 1-channel, everything else becomes RGB.
/// Alpha is dropped. Throws LoadError.
Image8 read_png(const std::filesystem::path& path);

/// Throws IoError.
void write_png(const std::filesystem::path& path, const Image8& image);

}  // namespace salient
