#pragma once

#include <filesystem>

#include "roigs/evaluation.hpp"

namespace roigs {

/// Decodes an 8- or 16-bit PNG to unit-range RGB (divide by the type
/// maximum); grayscale and alpha variants are expanded/stripped.
RasterImage read_png(const std::filesystem::path& path);

/// Encodes quantized unit-range RGB; bit_depth must be 8 or 16.
void write_png(const RasterImage& image, const std::filesystem::path& path,
               int bit_depth = 8);

}  // namespace roigs
