#include "roigs/evaluation.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace roigs {

RasterImage RasterImage::filled(int width, int height, double value) {
  RasterImage out;
  out.width = width;
  out.height = height;
  out.samples.assign(
      static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3,
      value);
  return out;
}

std::size_t RoiMask::set_count() const {
  std::size_t n = 0;
  for (const std::uint8_t b : bits) n += b != 0;
  return n;
}

RoiMask mask_from_aabb(const CameraIntrinsics& intrinsics,
                       const PosedImage& pose, const Aabb& box, int width,
                       int height) {
  RoiMask mask;
  mask.width = width;
  mask.height = height;
  mask.bits.assign(
      static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0);
  const auto polygon = projected_aabb(intrinsics, pose, box);
  if (!polygon) return mask;

  // Bounding rows/cols of the polygon keep the scan tight.
  double lo_x = polygon->vertices[0].x(), hi_x = lo_x;
  double lo_y = polygon->vertices[0].y(), hi_y = lo_y;
  for (const auto& v : polygon->vertices) {
    lo_x = std::min(lo_x, v.x());
    hi_x = std::max(hi_x, v.x());
    lo_y = std::min(lo_y, v.y());
    hi_y = std::max(hi_y, v.y());
  }
  const int x0 = std::max(0, static_cast<int>(std::floor(lo_x - 0.5)));
  const int x1 = std::min(width - 1, static_cast<int>(std::ceil(hi_x)));
  const int y0 = std::max(0, static_cast<int>(std::floor(lo_y - 0.5)));
  const int y1 = std::min(height - 1, static_cast<int>(std::ceil(hi_y)));
  std::size_t set = 0;
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const Eigen::Vector2d center(x + 0.5, y + 0.5);
      if (polygon->contains(center)) {
        mask.bits[static_cast<std::size_t>(y) *
                      static_cast<std::size_t>(width) +
                  static_cast<std::size_t>(x)] = 1;
        ++set;
      }
    }
  }
  if (set == 0) {
    // Sub-pixel polygons can miss every pixel center; a visible box still
    // yields a non-empty mask via the pixel under the polygon centroid.
    Eigen::Vector2d centroid = Eigen::Vector2d::Zero();
    for (const auto& v : polygon->vertices) centroid += v;
    centroid /= static_cast<double>(polygon->vertices.size());
    const int cx = std::clamp(static_cast<int>(centroid.x()), 0, width - 1);
    const int cy = std::clamp(static_cast<int>(centroid.y()), 0, height - 1);
    mask.bits[static_cast<std::size_t>(cy) * static_cast<std::size_t>(width) +
              static_cast<std::size_t>(cx)] = 1;
  }
  return mask;
}

namespace {

void check_dimensions(const RasterImage& a, const RasterImage& b,
                      const RoiMask& mask) {
  if (a.width != b.width || a.height != b.height) {
    throw DataError("image dimension mismatch: " + std::to_string(a.width) +
                    "x" + std::to_string(a.height) + " vs " +
                    std::to_string(b.width) + "x" + std::to_string(b.height));
  }
  if (mask.width != a.width || mask.height != a.height) {
    throw DataError("mask dimension mismatch");
  }
}

}  // namespace

double masked_psnr(const RasterImage& a, const RasterImage& b,
                   const RoiMask& mask) {
  check_dimensions(a, b, mask);
  double sum_sq = 0.0;
  std::size_t masked = 0;
  for (int y = 0; y < a.height; ++y) {
    for (int x = 0; x < a.width; ++x) {
      if (!mask.test(x, y)) continue;
      ++masked;
      for (int c = 0; c < 3; ++c) {
        const double d = a.at(x, y, c) - b.at(x, y, c);
        sum_sq += d * d;
      }
    }
  }
  if (masked == 0) throw DataError("masked_psnr: empty mask");
  const double mse = sum_sq / (static_cast<double>(masked) * 3.0);
  if (mse <= 0.0) return kPsnrCapDb;
  return std::min(kPsnrCapDb, 10.0 * std::log10(1.0 / mse));
}

namespace {

constexpr int kSsimWindow = 11;
constexpr int kSsimRadius = kSsimWindow / 2;
constexpr double kSsimSigma = 1.5;
constexpr double kSsimC1 = 0.01 * 0.01;
constexpr double kSsimC2 = 0.03 * 0.03;

const std::array<double, kSsimWindow>& ssim_kernel() {
  static const std::array<double, kSsimWindow> kernel = [] {
    std::array<double, kSsimWindow> k{};
    double sum = 0.0;
    for (int i = 0; i < kSsimWindow; ++i) {
      const double d = i - kSsimRadius;
      k[static_cast<std::size_t>(i)] =
          std::exp(-(d * d) / (2.0 * kSsimSigma * kSsimSigma));
      sum += k[static_cast<std::size_t>(i)];
    }
    for (double& v : k) v /= sum;
    return k;
  }();
  return kernel;
}

// Separable 11-tap filter; output is defined on the interior where the
// window fits, matching the classic valid-region SSIM.
class WindowFilter {
 public:
  WindowFilter(int width, int height)
      : width_(width), height_(height), row_pass_(size()), out_(size()) {}

  // in: width*height plane. Result readable at interior positions only.
  void apply(const std::vector<double>& in) {
    const auto& k = ssim_kernel();
    for (int y = 0; y < height_; ++y) {
      for (int x = kSsimRadius; x < width_ - kSsimRadius; ++x) {
        double acc = 0.0;
        for (int t = -kSsimRadius; t <= kSsimRadius; ++t) {
          acc += k[static_cast<std::size_t>(t + kSsimRadius)] *
                 in[idx(x + t, y)];
        }
        row_pass_[idx(x, y)] = acc;
      }
    }
    for (int y = kSsimRadius; y < height_ - kSsimRadius; ++y) {
      for (int x = kSsimRadius; x < width_ - kSsimRadius; ++x) {
        double acc = 0.0;
        for (int t = -kSsimRadius; t <= kSsimRadius; ++t) {
          acc += k[static_cast<std::size_t>(t + kSsimRadius)] *
                 row_pass_[idx(x, y + t)];
        }
        out_[idx(x, y)] = acc;
      }
    }
  }

  double at(int x, int y) const { return out_[idx(x, y)]; }

 private:
  std::size_t size() const {
    return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
  }
  std::size_t idx(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }
  int width_;
  int height_;
  std::vector<double> row_pass_;
  std::vector<double> out_;
};

}  // namespace

double masked_ssim(const RasterImage& a, const RasterImage& b,
                   const RoiMask& mask) {
  check_dimensions(a, b, mask);
  if (a.width < kSsimWindow || a.height < kSsimWindow) {
    throw DataError("masked_ssim requires images of at least 11x11");
  }
  const std::size_t plane_size =
      static_cast<std::size_t>(a.width) * static_cast<std::size_t>(a.height);

  std::vector<double> pa(plane_size), pb(plane_size), paa(plane_size),
      pbb(plane_size), pab(plane_size);
  WindowFilter mu_a(a.width, a.height), mu_b(a.width, a.height),
      m_aa(a.width, a.height), m_bb(a.width, a.height),
      m_ab(a.width, a.height);

  double channel_sum = 0.0;
  for (int c = 0; c < 3; ++c) {
    for (int y = 0; y < a.height; ++y) {
      for (int x = 0; x < a.width; ++x) {
        const std::size_t i =
            static_cast<std::size_t>(y) * static_cast<std::size_t>(a.width) +
            static_cast<std::size_t>(x);
        const double va = a.at(x, y, c);
        const double vb = b.at(x, y, c);
        pa[i] = va;
        pb[i] = vb;
        paa[i] = va * va;
        pbb[i] = vb * vb;
        pab[i] = va * vb;
      }
    }
    mu_a.apply(pa);
    mu_b.apply(pb);
    m_aa.apply(paa);
    m_bb.apply(pbb);
    m_ab.apply(pab);

    double sum = 0.0;
    std::size_t windows = 0;
    for (int y = kSsimRadius; y < a.height - kSsimRadius; ++y) {
      for (int x = kSsimRadius; x < a.width - kSsimRadius; ++x) {
        if (!mask.test(x, y)) continue;
        const double ma = mu_a.at(x, y);
        const double mb = mu_b.at(x, y);
        const double var_a = m_aa.at(x, y) - ma * ma;
        const double var_b = m_bb.at(x, y) - mb * mb;
        const double cov = m_ab.at(x, y) - ma * mb;
        const double ssim =
            ((2.0 * ma * mb + kSsimC1) * (2.0 * cov + kSsimC2)) /
            ((ma * ma + mb * mb + kSsimC1) * (var_a + var_b + kSsimC2));
        sum += ssim;
        ++windows;
      }
    }
    if (windows == 0) {
      throw DataError(
          "masked_ssim: no masked window centers inside the valid region");
    }
    channel_sum += sum / static_cast<double>(windows);
  }
  return channel_sum / 3.0;
}

}  // namespace roigs
