#include <doctest.h>

#include <cmath>
#include <vector>

#include "roigs/geometry.hpp"
#include "roigs/rng.hpp"
#include "roigs/synthetic.hpp"

using namespace roigs;

namespace {

CameraIntrinsics pinhole_100() {
  CameraIntrinsics cam;
  cam.camera_id = 1;
  cam.model = CameraModel::kPinhole;
  cam.width = 100;
  cam.height = 100;
  cam.params = {100.0, 100.0, 50.0, 50.0};
  return cam;
}

PosedImage identity_pose() {
  PosedImage image;
  image.image_id = 1;
  image.camera_id = 1;
  return image;
}

// Sutherland-Hodgman rectangle clip used as the area oracle for partially
// visible boxes; written against the raw corner projections, independent of
// projected_aabb's hull path.
std::vector<Eigen::Vector2d> clip_rect_oracle(
    std::vector<Eigen::Vector2d> poly, double w, double h) {
  struct Edge {
    int axis;
    double limit;
    bool keep_below;
  };
  const Edge edges[4] = {
      {0, 0.0, false}, {0, w, true}, {1, 0.0, false}, {1, h, true}};
  for (const Edge& e : edges) {
    std::vector<Eigen::Vector2d> next;
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const Eigen::Vector2d& a = poly[i];
      const Eigen::Vector2d& b = poly[(i + 1) % poly.size()];
      auto inside = [&](const Eigen::Vector2d& p) {
        return e.keep_below ? p[e.axis] <= e.limit : p[e.axis] >= e.limit;
      };
      auto cut = [&]() {
        const double t = (e.limit - a[e.axis]) / (b[e.axis] - a[e.axis]);
        return Eigen::Vector2d(a + t * (b - a));
      };
      if (inside(a)) {
        next.push_back(a);
        if (!inside(b)) next.push_back(cut());
      } else if (inside(b)) {
        next.push_back(cut());
      }
    }
    poly = std::move(next);
    if (poly.empty()) break;
  }
  return poly;
}

double shoelace(const std::vector<Eigen::Vector2d>& poly) {
  double twice = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const auto& a = poly[i];
    const auto& b = poly[(i + 1) % poly.size()];
    twice += a.x() * b.y() - b.x() * a.y();
  }
  return std::abs(0.5 * twice);
}

}  // namespace

TEST_CASE("point_in_aabb: closed boundary and basic membership") {
  const Aabb box{Eigen::Vector3d(-0.5, -0.5, -0.5),
                 Eigen::Vector3d(0.5, 0.5, 0.5)};
  CHECK(point_in_aabb(box.min, box));  // corner counts as inside
  CHECK(point_in_aabb(Eigen::Vector3d(0, 0, 0), box));
  CHECK_FALSE(point_in_aabb(Eigen::Vector3d(2, 0, 0), box));
}

TEST_CASE("point_in_aabb: 1000 random points match the brute-force check") {
  const Aabb box{Eigen::Vector3d(-1.0, 0.5, -2.0),
                 Eigen::Vector3d(0.25, 1.5, 3.0)};
  SplitMix64 rng(42);
  for (int i = 0; i < 1000; ++i) {
    const Eigen::Vector3d p(rng.next_in(-2, 2), rng.next_in(-1, 3),
                            rng.next_in(-4, 5));
    const bool brute = p.x() >= box.min.x() && p.x() <= box.max.x() &&
                       p.y() >= box.min.y() && p.y() <= box.max.y() &&
                       p.z() >= box.min.z() && p.z() <= box.max.z();
    CHECK(point_in_aabb(p, box) == brute);
  }
}

TEST_CASE("project: pinhole examples") {
  const CameraIntrinsics cam = pinhole_100();
  const PosedImage pose = identity_pose();
  SUBCASE("principal-point ray") {
    const auto px = project(cam, pose, Eigen::Vector3d(0, 0, 1));
    REQUIRE(px.has_value());
    CHECK(px->x() == doctest::Approx(50.0));
    CHECK(px->y() == doctest::Approx(50.0));
  }
  SUBCASE("u = fx*x/z + cx") {
    const auto px = project(cam, pose, Eigen::Vector3d(0.1, 0, 1));
    REQUIRE(px.has_value());
    CHECK(px->x() == doctest::Approx(60.0));
    CHECK(px->y() == doctest::Approx(50.0));
  }
  SUBCASE("behind the camera") {
    CHECK_FALSE(project(cam, pose, Eigen::Vector3d(0, 0, -1)).has_value());
  }
}

TEST_CASE("project: distortion models") {
  const PosedImage pose = identity_pose();
  SUBCASE("simple radial") {
    CameraIntrinsics cam;
    cam.model = CameraModel::kSimpleRadial;
    cam.width = 200;
    cam.height = 200;
    cam.params = {100.0, 100.0, 100.0, 0.1};  // f cx cy k
    // x' = 0.2, r2 = 0.04, factor = 1.004 -> u = 100*0.2*1.004 + 100
    const auto px = project(cam, pose, Eigen::Vector3d(0.2, 0, 1));
    REQUIRE(px.has_value());
    CHECK(px->x() == doctest::Approx(120.08).epsilon(1e-12));
    CHECK(px->y() == doctest::Approx(100.0));
  }
  SUBCASE("opencv radial-tangential") {
    CameraIntrinsics cam;
    cam.model = CameraModel::kOpencv;
    cam.width = 200;
    cam.height = 200;
    cam.params = {100.0, 110.0, 100.0, 100.0, 0.1, 0.01, 0.002, 0.003};
    const double xn = 0.2, yn = -0.1;
    const double r2 = xn * xn + yn * yn;
    const double radial = 1.0 + 0.1 * r2 + 0.01 * r2 * r2;
    const double xd = xn * radial + 2 * 0.002 * xn * yn +
                      0.003 * (r2 + 2 * xn * xn);
    const double yd = yn * radial + 0.002 * (r2 + 2 * yn * yn) +
                      2 * 0.003 * xn * yn;
    const auto px = project(cam, pose, Eigen::Vector3d(0.2, -0.1, 1.0));
    REQUIRE(px.has_value());
    CHECK(px->x() == doctest::Approx(100.0 * xd + 100.0).epsilon(1e-14));
    CHECK(px->y() == doctest::Approx(110.0 * yd + 100.0).epsilon(1e-14));
  }
}

TEST_CASE("projected_aabb: unit box at depth 10") {
  const CameraIntrinsics cam = pinhole_100();
  const PosedImage pose = identity_pose();
  const Aabb box{Eigen::Vector3d(-0.5, -0.5, 9.5),
                 Eigen::Vector3d(0.5, 0.5, 10.5)};
  const auto poly = projected_aabb(cam, pose, box);
  REQUIRE(poly.has_value());
  // Near-face corners dominate: square of half-width 100*0.5/9.5 px.
  const double half = 100.0 * 0.5 / 9.5;
  CHECK(poly->area == doctest::Approx(4.0 * half * half).epsilon(1e-9));
  for (const auto& v : poly->vertices) {
    CHECK(std::abs(v.x() - 50.0) <= half * (1 + 1e-12));
    CHECK(std::abs(v.y() - 50.0) <= half * (1 + 1e-12));
  }
}

TEST_CASE("projected_aabb: fully behind the camera") {
  const CameraIntrinsics cam = pinhole_100();
  const PosedImage pose = identity_pose();
  const Aabb box{Eigen::Vector3d(-0.5, -0.5, -10.5),
                 Eigen::Vector3d(0.5, 0.5, -9.5)};
  CHECK_FALSE(projected_aabb(cam, pose, box).has_value());
}

TEST_CASE("projected_aabb: partial visibility matches the clip oracle") {
  const CameraIntrinsics cam = pinhole_100();
  const PosedImage pose = identity_pose();
  // Box shifted so its projection pokes out of the right image border.
  const Aabb box{Eigen::Vector3d(4.0, -0.5, 9.5),
                 Eigen::Vector3d(5.0, 0.5, 10.5)};
  const auto poly = projected_aabb(cam, pose, box);
  REQUIRE(poly.has_value());

  // Oracle: project all 8 corners (all in front here), take the convex hull
  // by gift wrapping, then Sutherland-Hodgman clip against the image.
  std::vector<Eigen::Vector2d> corners2d;
  for (const auto& corner : box.corners()) {
    corners2d.push_back(*project(cam, pose, corner));
  }
  std::vector<Eigen::Vector2d> hull;
  std::size_t start = 0;
  for (std::size_t i = 1; i < corners2d.size(); ++i) {
    if (corners2d[i].x() < corners2d[start].x() ||
        (corners2d[i].x() == corners2d[start].x() &&
         corners2d[i].y() < corners2d[start].y())) {
      start = i;
    }
  }
  std::size_t current = start;
  do {
    hull.push_back(corners2d[current]);
    std::size_t next = (current + 1) % corners2d.size();
    for (std::size_t i = 0; i < corners2d.size(); ++i) {
      const Eigen::Vector2d a = corners2d[next] - corners2d[current];
      const Eigen::Vector2d b = corners2d[i] - corners2d[current];
      const double cross = a.x() * b.y() - a.y() * b.x();
      if (cross > 0.0 ||
          (cross == 0.0 && b.squaredNorm() > a.squaredNorm())) {
        next = i;
      }
    }
    current = next;
  } while (current != start && hull.size() <= corners2d.size());

  const auto clipped = clip_rect_oracle(hull, 100.0, 100.0);
  CHECK(poly->area == doctest::Approx(shoelace(clipped)).epsilon(1e-9));
  CHECK(poly->area < shoelace(hull));
  for (const auto& v : poly->vertices) {
    CHECK(v.x() >= -1e-9);
    CHECK(v.x() <= 100.0 + 1e-9);
  }
}

TEST_CASE("projected_aabb: area is invariant under rigid world transforms") {
  // Rigid transforms that keep an axis-aligned box axis-aligned: random
  // translations composed with 90-degree rotations about the world axes.
  const CameraIntrinsics cam = pinhole_100();
  std::vector<Eigen::Matrix3d> axis_rotations;
  axis_rotations.push_back(Eigen::Matrix3d::Identity());
  for (int axis = 0; axis < 3; ++axis) {
    axis_rotations.push_back(
        Eigen::AngleAxisd(M_PI / 2.0, Eigen::Vector3d::Unit(axis))
            .toRotationMatrix());
    axis_rotations.push_back(
        Eigen::AngleAxisd(M_PI, Eigen::Vector3d::Unit(axis))
            .toRotationMatrix());
  }
  SplitMix64 rng(7);
  for (int trial = 0; trial < 30; ++trial) {
    PosedImage pose = identity_pose();
    pose.rotation =
        Eigen::Quaterniond(Eigen::AngleAxisd(rng.next_in(-0.2, 0.2),
                                             Eigen::Vector3d::UnitY()));
    pose.translation = Eigen::Vector3d(rng.next_in(-1, 1), rng.next_in(-1, 1),
                                       rng.next_in(-1, 1));
    const Aabb box{Eigen::Vector3d(-0.4, -0.6, 8.0),
                   Eigen::Vector3d(0.6, 0.4, 9.0)};
    const auto base = projected_aabb(cam, pose, box);
    REQUIRE(base.has_value());

    const Eigen::Matrix3d q =
        axis_rotations[rng.next_below(axis_rotations.size())];
    const Eigen::Vector3d shift(rng.next_in(-5, 5), rng.next_in(-5, 5),
                                rng.next_in(-5, 5));
    // World transform p' = q p + shift; the composed extrinsics satisfy
    // R' p' + t' = R p + t.
    PosedImage moved = pose;
    moved.rotation =
        Eigen::Quaterniond(pose.rotation_matrix() * q.transpose());
    moved.translation =
        pose.translation - pose.rotation_matrix() * q.transpose() * shift;
    Aabb moved_box;
    moved_box.min = moved_box.max = q * box.corners()[0] + shift;
    for (const auto& corner : box.corners()) {
      const Eigen::Vector3d moved_corner = q * corner + shift;
      moved_box.min = moved_box.min.cwiseMin(moved_corner);
      moved_box.max = moved_box.max.cwiseMax(moved_corner);
    }
    const auto after = projected_aabb(cam, moved, moved_box);
    REQUIRE(after.has_value());
    CHECK(after->area == doctest::Approx(base->area).epsilon(1e-6));
  }
}

TEST_CASE("roi_visibility: fixture with known tracks") {
  SceneRecipe recipe;
  recipe.seed = 3;
  recipe.points_in_roi = 5;
  recipe.points_background = 20;
  recipe.cameras = 4;
  recipe.max_view_angle_deg = 180.0;  // every camera sees every point
  const SyntheticScene scene = generate(recipe);
  const Aabb box = recipe.box;

  SUBCASE("no points inside an elsewhere box means an empty map") {
    const Aabb far_box{Eigen::Vector3d(100, 100, 100),
                       Eigen::Vector3d(101, 101, 101)};
    CHECK(roi_visibility(scene.model, far_box).empty());
  }
  SUBCASE("per-image lists match a double loop over (image, point)") {
    const auto vis = roi_visibility(scene.model, box);
    for (const auto& [image_id, image] : scene.model.images) {
      std::vector<std::int64_t> brute;
      for (const auto& [pid, point] : scene.model.points) {
        if (!point_in_aabb(point.position, box)) continue;
        for (const auto& entry : point.track) {
          if (entry.image_id == image_id) {
            brute.push_back(pid);
            break;
          }
        }
      }
      std::sort(brute.begin(), brute.end());
      brute.erase(std::unique(brute.begin(), brute.end()), brute.end());
      if (brute.empty()) {
        CHECK(vis.find(image_id) == vis.end());
      } else {
        REQUIRE(vis.find(image_id) != vis.end());
        CHECK(vis.at(image_id) == brute);
      }
    }
  }
}

TEST_CASE("roi_visibility: hand-checked synthetic counts") {
  // 5 in-box points, all visible to every camera; image A sees 3 of them
  // after manual track surgery, image B none.
  SceneRecipe recipe;
  recipe.seed = 11;
  recipe.points_in_roi = 5;
  recipe.cameras = 2;
  recipe.max_view_angle_deg = 180.0;
  SyntheticScene scene = generate(recipe);
  SfmModel& model = scene.model;
  // Rebuild tracks: image 1 observes points 1..3, image 2 observes nothing.
  for (auto& [pid, point] : model.points) point.track.clear();
  for (auto& [iid, image] : model.images) image.observations.clear();
  PosedImage& a = model.images.at(1);
  for (std::int64_t pid = 1; pid <= 3; ++pid) {
    a.observations.push_back({0.0, 0.0, pid});
    model.points.at(pid).track.push_back(
        {1, static_cast<std::int32_t>(pid - 1)});
  }
  const auto vis = roi_visibility(model, recipe.box);
  REQUIRE(vis.size() == 1);
  CHECK(vis.at(1) == std::vector<std::int64_t>{1, 2, 3});
}

TEST_CASE("roi_visibility: shrinking the box never adds images") {
  SceneRecipe recipe;
  recipe.seed = 23;
  recipe.points_in_roi = 60;
  recipe.points_background = 40;
  recipe.cameras = 12;
  recipe.dropout = 0.2;
  const SyntheticScene scene = generate(recipe);
  const Aabb big = recipe.box;
  SplitMix64 rng(99);
  for (int trial = 0; trial < 10; ++trial) {
    Aabb small;
    for (int axis = 0; axis < 3; ++axis) {
      const double a = rng.next_in(big.min[axis], big.max[axis]);
      const double b = rng.next_in(big.min[axis], big.max[axis]);
      small.min[axis] = std::min(a, b);
      small.max[axis] = std::max(a, b) + 1e-6;
    }
    const auto vis_big = roi_visibility(scene.model, big);
    const auto vis_small = roi_visibility(scene.model, small);
    for (const auto& [image_id, ids] : vis_small) {
      CHECK(vis_big.find(image_id) != vis_big.end());
    }
  }
}

TEST_CASE("roi_visibility: thread count does not change the result") {
  SceneRecipe recipe;
  recipe.seed = 5;
  recipe.points_in_roi = 40;
  recipe.points_background = 60;
  recipe.cameras = 9;
  const SyntheticScene scene = generate(recipe);
  const auto serial = roi_visibility(scene.model, recipe.box, 1);
  const auto parallel = roi_visibility(scene.model, recipe.box, 4);
  CHECK(serial == parallel);
}
