#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace salient {

/// Raw little-endian float32 blob, no header.
void write_f32_le(const std::filesystem::path& path, std::span<const float> values);

/// Throws LoadError (naming `what`) if the file is missing or not exactly `count` floats.
std::vector<float> read_f32_le(const std::filesystem::path& path, std::size_t count, const std::string& what);

}  // namespace salient
