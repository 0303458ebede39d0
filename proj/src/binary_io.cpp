#include "salient/binary_io.hpp"

#include <bit>
#include <cstdint>
#include <fstream>
#include <iterator>

#include "salient/error.hpp"

namespace salient {

void write_f32_le(const std::filesystem::path& path, std::span<const float> values) {
  std::string bytes(values.size() * 4, '\0');
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto bits = std::bit_cast<std::uint32_t>(values[i]);
    for (std::size_t b = 0; b < 4; ++b) bytes[i * 4 + b] = static_cast<char>((bits >> (8 * b)) & 0xFFu);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("short write to " + path.string());
}

std::vector<float> read_f32_le(const std::filesystem::path& path, std::size_t count, const std::string& what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError(what + ": cannot open " + path.string());
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() != count * 4) {
    throw LoadError(what + ": expected " + std::to_string(count * 4) + " bytes in " + path.string() + ", found " +
                    std::to_string(bytes.size()));
  }
  std::vector<float> values(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::uint32_t bits = 0;
    for (std::size_t b = 4; b-- > 0;) bits = (bits << 8) | static_cast<unsigned char>(bytes[i * 4 + b]);
    values[i] = std::bit_cast<float>(bits);
  }
  return values;
}

}  // namespace salient
