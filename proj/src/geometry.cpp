#include "roigs/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "roigs/parallel_for.hpp"

namespace roigs {

std::array<Eigen::Vector3d, 8> Aabb::corners() const {
  std::array<Eigen::Vector3d, 8> out;
  for (int i = 0; i < 8; ++i) {
    out[static_cast<std::size_t>(i)] =
        Eigen::Vector3d((i & 1) ? max.x() : min.x(),
                        (i & 2) ? max.y() : min.y(),
                        (i & 4) ? max.z() : min.z());
  }
  return out;
}

bool aabbs_overlap(const Aabb& a, const Aabb& b) {
  return (a.min.array() <= b.max.array()).all() &&
         (b.min.array() <= a.max.array()).all();
}

std::optional<Eigen::Vector2d> project_camera_point(
    const CameraIntrinsics& intrinsics, const Eigen::Vector3d& p_camera) {
  if (p_camera.z() <= kNearPlane) return std::nullopt;
  const double xn = p_camera.x() / p_camera.z();
  const double yn = p_camera.y() / p_camera.z();
  const auto& k = intrinsics.params;
  switch (intrinsics.model) {
    case CameraModel::kSimplePinhole:
      return Eigen::Vector2d(k[0] * xn + k[1], k[0] * yn + k[2]);
    case CameraModel::kPinhole:
      return Eigen::Vector2d(k[0] * xn + k[2], k[1] * yn + k[3]);
    case CameraModel::kSimpleRadial: {
      const double r2 = xn * xn + yn * yn;
      const double d = 1.0 + k[3] * r2;
      return Eigen::Vector2d(k[0] * d * xn + k[1], k[0] * d * yn + k[2]);
    }
    case CameraModel::kOpencv: {
      // fx fy cx cy k1 k2 p1 p2, COLMAP parameter order.
      const double r2 = xn * xn + yn * yn;
      const double radial = 1.0 + k[4] * r2 + k[5] * r2 * r2;
      const double xd =
          xn * radial + 2.0 * k[6] * xn * yn + k[7] * (r2 + 2.0 * xn * xn);
      const double yd =
          yn * radial + k[6] * (r2 + 2.0 * yn * yn) + 2.0 * k[7] * xn * yn;
      return Eigen::Vector2d(k[0] * xd + k[2], k[1] * yd + k[3]);
    }
  }
  return std::nullopt;
}

std::optional<Eigen::Vector2d> project(const CameraIntrinsics& intrinsics,
                                       const PosedImage& pose,
                                       const Eigen::Vector3d& p_world) {
  const Eigen::Vector3d p_camera =
      pose.rotation_matrix() * p_world + pose.translation;
  return project_camera_point(intrinsics, p_camera);
}

double polygon_area(const std::vector<Eigen::Vector2d>& vertices) {
  double twice = 0.0;
  const std::size_t n = vertices.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = vertices[i];
    const auto& b = vertices[(i + 1) % n];
    twice += a.x() * b.y() - b.x() * a.y();
  }
  return 0.5 * twice;
}

bool ImagePolygon::contains(const Eigen::Vector2d& p) const {
  const std::size_t n = vertices.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = vertices[i];
    const auto& b = vertices[(i + 1) % n];
    const double cross = (b.x() - a.x()) * (p.y() - a.y()) -
                         (b.y() - a.y()) * (p.x() - a.x());
    if (cross < 0.0) return false;  // CCW polygon, closed boundary
  }
  return true;
}

namespace {

// Andrew monotone chain; returns CCW hull without repeated endpoint.
std::vector<Eigen::Vector2d> convex_hull(std::vector<Eigen::Vector2d> pts) {
  std::sort(pts.begin(), pts.end(),
            [](const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
              return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
            });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
                          return a.x() == b.x() && a.y() == b.y();
                        }),
            pts.end());
  const std::size_t n = pts.size();
  if (n < 3) return pts;
  auto cross = [](const Eigen::Vector2d& o, const Eigen::Vector2d& a,
                  const Eigen::Vector2d& b) {
    return (a.x() - o.x()) * (b.y() - o.y()) -
           (a.y() - o.y()) * (b.x() - o.x());
  };
  std::vector<Eigen::Vector2d> hull(2 * n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  for (std::size_t i = n - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

// Sutherland-Hodgman clip of a convex CCW polygon against a half-plane
// n.dot(p) <= c.
std::vector<Eigen::Vector2d> clip_half_plane(
    const std::vector<Eigen::Vector2d>& poly, const Eigen::Vector2d& n,
    double c) {
  std::vector<Eigen::Vector2d> out;
  const std::size_t count = poly.size();
  out.reserve(count + 1);
  for (std::size_t i = 0; i < count; ++i) {
    const Eigen::Vector2d& a = poly[i];
    const Eigen::Vector2d& b = poly[(i + 1) % count];
    const double da = n.dot(a) - c;
    const double db = n.dot(b) - c;
    const bool ina = da <= 0.0;
    const bool inb = db <= 0.0;
    if (ina) out.push_back(a);
    if (ina != inb) {
      const double t = da / (da - db);
      out.push_back(a + t * (b - a));
    }
  }
  return out;
}

}  // namespace

std::optional<ImagePolygon> projected_aabb(const CameraIntrinsics& intrinsics,
                                           const PosedImage& pose,
                                           const Aabb& box) {
  const Eigen::Matrix3d rot = pose.rotation_matrix();
  std::array<Eigen::Vector3d, 8> cam_corners;
  const auto world_corners = box.corners();
  for (int i = 0; i < 8; ++i) {
    cam_corners[static_cast<std::size_t>(i)] =
        rot * world_corners[static_cast<std::size_t>(i)] + pose.translation;
  }

  // Gather corners in front of the near plane plus the near-plane
  // intersections of the 12 box edges. Dropping behind-camera corners
  // outright would shrink the silhouette exactly for close-up views.
  static constexpr int kEdges[12][2] = {{0, 1}, {2, 3}, {4, 5}, {6, 7},
                                        {0, 2}, {1, 3}, {4, 6}, {5, 7},
                                        {0, 4}, {1, 5}, {2, 6}, {3, 7}};
  std::vector<Eigen::Vector3d> front;
  front.reserve(16);
  for (const auto& corner : cam_corners) {
    if (corner.z() > kNearPlane) front.push_back(corner);
  }
  // Cut plane sits a hair in front of the near plane so the cut points
  // survive the depth test in project_camera_point.
  const double cut_z = kNearPlane * (1.0 + 1e-9);
  for (const auto& edge : kEdges) {
    const Eigen::Vector3d& a = cam_corners[static_cast<std::size_t>(edge[0])];
    const Eigen::Vector3d& b = cam_corners[static_cast<std::size_t>(edge[1])];
    const bool fa = a.z() > cut_z;
    const bool fb = b.z() > cut_z;
    if (fa == fb) continue;
    const double t = (cut_z - a.z()) / (b.z() - a.z());
    Eigen::Vector3d cut = a + t * (b - a);
    cut.z() = cut_z;
    front.push_back(cut);
  }
  if (front.empty()) return std::nullopt;

  std::vector<Eigen::Vector2d> projected;
  projected.reserve(front.size());
  for (const auto& p : front) {
    if (const auto px = project_camera_point(intrinsics, p)) {
      projected.push_back(*px);
    }
  }
  if (projected.size() < 3) return std::nullopt;

  std::vector<Eigen::Vector2d> hull = convex_hull(std::move(projected));
  if (hull.size() < 3) return std::nullopt;

  const double w = static_cast<double>(intrinsics.width);
  const double h = static_cast<double>(intrinsics.height);
  hull = clip_half_plane(hull, Eigen::Vector2d(-1.0, 0.0), 0.0);
  hull = clip_half_plane(hull, Eigen::Vector2d(1.0, 0.0), w);
  hull = clip_half_plane(hull, Eigen::Vector2d(0.0, -1.0), 0.0);
  hull = clip_half_plane(hull, Eigen::Vector2d(0.0, 1.0), h);
  if (hull.size() < 3) return std::nullopt;

  const double area = polygon_area(hull);
  if (!(area > 0.0)) return std::nullopt;
  return ImagePolygon{std::move(hull), area};
}

std::map<std::int32_t, std::vector<std::int64_t>> roi_visibility(
    const SfmModel& model, const Aabb& box, int threads) {
  // Scan observations per image instead of tracks per point: identical
  // result for validated models (tracks are bidirectional) and trivially
  // parallel over images.
  std::vector<const PosedImage*> images;
  images.reserve(model.images.size());
  for (const auto& [id, image] : model.images) images.push_back(&image);

  std::vector<std::vector<std::int64_t>> hits(images.size());
  parallel_for(images.size(), threads, [&](std::size_t i) {
    const PosedImage& image = *images[i];
    std::vector<std::int64_t>& list = hits[i];
    for (const auto& obs : image.observations) {
      if (!obs.point3d_id) continue;
      const auto it = model.points.find(*obs.point3d_id);
      if (it == model.points.end()) continue;
      if (point_in_aabb(it->second.position, box)) {
        list.push_back(*obs.point3d_id);
      }
    }
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  });

  std::map<std::int32_t, std::vector<std::int64_t>> out;
  for (std::size_t i = 0; i < images.size(); ++i) {
    if (!hits[i].empty()) {
      out.emplace(images[i]->image_id, std::move(hits[i]));
    }
  }
  return out;
}

}  // namespace roigs
