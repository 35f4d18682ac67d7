#pragma once

#include <cstdint>
#include <vector>

#include "roigs/geometry.hpp"

namespace roigs {

/// RGB image, unit-range samples, row-major interleaved.
struct RasterImage {
  int width = 0;
  int height = 0;
  std::vector<double> samples;  // width * height * 3

  static RasterImage filled(int width, int height, double value);

  double at(int x, int y, int c) const {
    return samples[(static_cast<std::size_t>(y) *
                        static_cast<std::size_t>(width) +
                    static_cast<std::size_t>(x)) *
                       3 +
                   static_cast<std::size_t>(c)];
  }
  double& at(int x, int y, int c) {
    return samples[(static_cast<std::size_t>(y) *
                        static_cast<std::size_t>(width) +
                    static_cast<std::size_t>(x)) *
                       3 +
                   static_cast<std::size_t>(c)];
  }
};

struct RoiMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;  // one per pixel, row-major

  bool test(int x, int y) const {
    return bits[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                static_cast<std::size_t>(x)] != 0;
  }
  std::size_t set_count() const;
};

/// Pixel set iff its center (x+0.5, y+0.5) lies in the projected-AABB
/// polygon (closed boundary); all-clear when the box is not visible.
RoiMask mask_from_aabb(const CameraIntrinsics& intrinsics,
                       const PosedImage& pose, const Aabb& box, int width,
                       int height);

inline constexpr double kPsnrCapDb = 100.0;

/// 10*log10(1/MSE) with MSE over masked pixels and all channels, peak 1.0;
/// capped at 100 dB for identical masked regions.
double masked_psnr(const RasterImage& a, const RasterImage& b,
                   const RoiMask& mask);

/// Standard SSIM (11x11 Gaussian window, sigma 1.5, C1=0.01^2, C2=0.03^2 on
/// unit dynamic range), per channel and averaged; the window map is averaged
/// over windows that fit entirely inside the image and whose center pixel is
/// masked.
double masked_ssim(const RasterImage& a, const RasterImage& b,
                   const RoiMask& mask);

}  // namespace roigs
