#include "salient/image_io.hpp"

#include <png.h>

#include <cstring>
#include <string>

#include "salient/error.hpp"

namespace salient {

Image8 read_png(const std::filesystem::path& path) {
  png_image img;
  std::memset(&img, 0, sizeof img);
  img.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&img, path.c_str())) {
    throw LoadError("cannot read image " + path.string() + ": " + img.message);
  }
  const bool gray = (img.format & PNG_FORMAT_FLAG_COLOR) == 0;
  img.format = gray ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;

  Image8 out;
  out.height = img.height;
  out.width = img.width;
  out.channels = gray ? 1 : 3;
  out.data.resize(PNG_IMAGE_SIZE(img));
  if (!png_image_finish_read(&img, nullptr, out.data.data(), 0, nullptr)) {
    const std::string msg = img.message;
    png_image_free(&img);
    throw LoadError("corrupt image " + path.string() + ": " + msg);
  }
  return out;
}

void write_png(const std::filesystem::path& path, const Image8& image) {
  if (image.channels != 1 && image.channels != 3) throw IoError("write_png supports 1 or 3 channels");
  if (image.data.size() != image.height * image.width * image.channels) {
    throw IoError("write_png: image buffer does not match its dimensions");
  }
  png_image img;
  std::memset(&img, 0, sizeof img);
  img.version = PNG_IMAGE_VERSION;
  img.width = static_cast<png_uint_32>(image.width);
  img.height = static_cast<png_uint_32>(image.height);
  img.format = image.channels == 1 ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&img, path.c_str(), 0, image.data.data(), 0, nullptr)) {
    throw IoError("cannot write image " + path.string() + ": " + img.message);
  }
}

}  // namespace salient
