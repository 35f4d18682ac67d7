#include "roigs/png_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <memory>
#include <vector>

#include "roigs/errors.hpp"

namespace roigs {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f != nullptr) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

}  // namespace

RasterImage read_png(const std::filesystem::path& path) {
  FilePtr file(std::fopen(path.c_str(), "rb"));
  if (!file) throw Error("cannot open PNG: " + path.string());

  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (png == nullptr) throw Error("png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw Error("png_create_info_struct failed");
  }
  std::vector<png_bytep> row_pointers;
  std::vector<png_byte> data;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw ParseError("malformed PNG: " + path.string());
  }
  png_init_io(png, file.get());
  png_read_info(png, info);

  const png_uint_32 width = png_get_image_width(png, info);
  const png_uint_32 height = png_get_image_height(png, info);
  const int bit_depth = png_get_bit_depth(png, info);
  const int color_type = png_get_color_type(png, info);

  // Normalize every variant to RGB at the file's bit depth.
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) {
    png_set_expand_gray_1_2_4_to_8(png);
  }
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if (color_type == PNG_COLOR_TYPE_GRAY ||
      color_type == PNG_COLOR_TYPE_GRAY_ALPHA) {
    png_set_gray_to_rgb(png);
  }
  png_set_strip_alpha(png);
  if (bit_depth == 16) png_set_swap(png);  // PNG is big-endian on disk
  png_read_update_info(png, info);

  const int out_depth = png_get_bit_depth(png, info);
  const std::size_t row_bytes = png_get_rowbytes(png, info);
  data.resize(row_bytes * height);
  row_pointers.resize(height);
  for (png_uint_32 y = 0; y < height; ++y) {
    row_pointers[y] = data.data() + y * row_bytes;
  }
  png_read_image(png, row_pointers.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  RasterImage image;
  image.width = static_cast<int>(width);
  image.height = static_cast<int>(height);
  image.samples.resize(static_cast<std::size_t>(width) * height * 3);
  if (out_depth == 16) {
    const auto* src = reinterpret_cast<const std::uint16_t*>(data.data());
    for (std::size_t i = 0; i < image.samples.size(); ++i) {
      image.samples[i] = src[i] / 65535.0;
    }
  } else {
    for (std::size_t i = 0; i < image.samples.size(); ++i) {
      image.samples[i] = data[i] / 255.0;
    }
  }
  return image;
}

void write_png(const RasterImage& image, const std::filesystem::path& path,
               int bit_depth) {
  if (bit_depth != 8 && bit_depth != 16) {
    throw DataError("PNG bit depth must be 8 or 16");
  }
  FilePtr file(std::fopen(path.c_str(), "wb"));
  if (!file) throw Error("cannot open PNG for writing: " + path.string());

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                            nullptr, nullptr);
  if (png == nullptr) throw Error("png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_write_struct(&png, nullptr);
    throw Error("png_create_info_struct failed");
  }
  std::vector<png_byte> data;
  std::vector<png_bytep> row_pointers;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error("PNG write failed: " + path.string());
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(image.width),
               static_cast<png_uint_32>(image.height), bit_depth,
               PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  if (bit_depth == 16) png_set_swap(png);

  const std::size_t pixels =
      static_cast<std::size_t>(image.width) *
      static_cast<std::size_t>(image.height);
  const std::size_t row_bytes = static_cast<std::size_t>(image.width) * 3 *
                                (bit_depth == 16 ? 2 : 1);
  data.resize(row_bytes * static_cast<std::size_t>(image.height));
  const double scale = bit_depth == 16 ? 65535.0 : 255.0;
  if (bit_depth == 16) {
    auto* dst = reinterpret_cast<std::uint16_t*>(data.data());
    for (std::size_t i = 0; i < pixels * 3; ++i) {
      const double v = std::clamp(image.samples[i], 0.0, 1.0);
      dst[i] = static_cast<std::uint16_t>(std::lround(v * scale));
    }
  } else {
    for (std::size_t i = 0; i < pixels * 3; ++i) {
      const double v = std::clamp(image.samples[i], 0.0, 1.0);
      data[i] = static_cast<png_byte>(std::lround(v * scale));
    }
  }
  row_pointers.resize(static_cast<std::size_t>(image.height));
  for (int y = 0; y < image.height; ++y) {
    row_pointers[static_cast<std::size_t>(y)] =
        data.data() + static_cast<std::size_t>(y) * row_bytes;
  }
  png_write_image(png, row_pointers.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace roigs
