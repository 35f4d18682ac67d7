#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "roigs/colmap_model.hpp"
#include "roigs/errors.hpp"

namespace roigs {

/// Axis-aligned box, closed on all faces.
struct Aabb {
  Eigen::Vector3d min = Eigen::Vector3d::Zero();
  Eigen::Vector3d max = Eigen::Vector3d::Zero();

  Eigen::Vector3d center() const { return 0.5 * (min + max); }
  Eigen::Vector3d extent() const { return max - min; }
  bool valid() const {
    return (min.array() <= max.array()).all() &&
           (extent().array() > 0.0).all();
  }
  std::array<Eigen::Vector3d, 8> corners() const;
};

/// Strictly positive overlap test is intentionally not used: boxes sharing a
/// face overlap under the closed-membership convention.
bool aabbs_overlap(const Aabb& a, const Aabb& b);

/// Closed-box membership; boundary points count as inside.
template <typename Derived>
bool point_in_aabb(const Eigen::MatrixBase<Derived>& p, const Aabb& box) {
  return (p.derived().template cast<double>().array() >= box.min.array())
             .all() &&
         (p.derived().template cast<double>().array() <= box.max.array())
             .all();
}

/// Depth below this is treated as behind the camera.
inline constexpr double kNearPlane = 1e-6;

/// Camera-space point through the camera model (distortion applied for
/// SIMPLE_RADIAL / OPENCV); nullopt when depth <= kNearPlane.
std::optional<Eigen::Vector2d> project_camera_point(
    const CameraIntrinsics& intrinsics, const Eigen::Vector3d& p_camera);

/// World point through pose + camera model.
std::optional<Eigen::Vector2d> project(const CameraIntrinsics& intrinsics,
                                       const PosedImage& pose,
                                       const Eigen::Vector3d& p_world);

/// Convex polygon in pixel coordinates, vertices counter-clockwise.
struct ImagePolygon {
  std::vector<Eigen::Vector2d> vertices;
  double area = 0.0;  // shoelace value of `vertices`, pixels^2

  bool contains(const Eigen::Vector2d& p) const;  // closed boundary
};

double polygon_area(const std::vector<Eigen::Vector2d>& vertices);

/// Convex hull of the box corner projections, with box edges clipped against
/// the near plane in camera space first, then intersected with the image
/// rectangle [0,width]x[0,height]. nullopt when the intersection is empty.
std::optional<ImagePolygon> projected_aabb(const CameraIntrinsics& intrinsics,
                                           const PosedImage& pose,
                                           const Aabb& box);

/// Per-image ids of in-box points observed by that image, from SfM tracks.
/// Images observing no in-box point are omitted; lists are sorted ascending
/// and de-duplicated. The paper's initial filtering step.
std::map<std::int32_t, std::vector<std::int64_t>> roi_visibility(
    const SfmModel& model, const Aabb& box, int threads = 1);

}  // namespace roigs
