#include "roigs/synthetic.hpp"

#include <algorithm>
#include <cmath>

#include "roigs/errors.hpp"
#include "roigs/kv_file.hpp"
#include "roigs/rng.hpp"

namespace roigs {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;
constexpr double kGoldenAngle = 2.39996322972865332;

Eigen::Quaterniond look_at(const Eigen::Vector3d& camera_center,
                           const Eigen::Vector3d& target) {
  const Eigen::Vector3d forward = (target - camera_center).normalized();
  Eigen::Vector3d up(0.0, 0.0, 1.0);
  if (std::abs(forward.dot(up)) > 0.999) up = Eigen::Vector3d(0.0, 1.0, 0.0);
  const Eigen::Vector3d right = up.cross(forward).normalized();
  const Eigen::Vector3d down = forward.cross(right);
  Eigen::Matrix3d world_to_camera;
  world_to_camera.row(0) = right.transpose();
  world_to_camera.row(1) = down.transpose();
  world_to_camera.row(2) = forward.transpose();
  Eigen::Quaterniond q(world_to_camera);
  q.normalize();
  if (q.w() < 0.0) q.coeffs() = -q.coeffs();
  return q;
}

Eigen::Vector3d sample_unit_sphere(SplitMix64& rng) {
  const double z = rng.next_in(-1.0, 1.0);
  const double azimuth = rng.next_in(0.0, kTwoPi);
  const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
  return {r * std::cos(azimuth), r * std::sin(azimuth), z};
}

Eigen::Vector3d sample_in_box(SplitMix64& rng, const Aabb& box) {
  return {rng.next_in(box.min.x(), box.max.x()),
          rng.next_in(box.min.y(), box.max.y()),
          rng.next_in(box.min.z(), box.max.z())};
}

Aabb expanded_box(const Aabb& box, double factor) {
  const Eigen::Vector3d center = box.center();
  const Eigen::Vector3d half = 0.5 * factor * box.extent();
  return {center - half, center + half};
}

}  // namespace

void SceneRecipe::check() const {
  if (points_in_roi < 0 || points_background < 0) {
    throw DataError("recipe: point counts must be >= 0");
  }
  if (!box.valid()) throw DataError("recipe: invalid ROI box");
  if (cameras <= 0) throw DataError("recipe: at least one camera required");
  if (points_in_roi + points_background <= 0) {
    throw DataError("recipe: at least one point required");
  }
  if (dropout < 0.0 || dropout >= 1.0) {
    throw DataError("recipe: dropout must lie in [0, 1)");
  }
  if (max_view_angle_deg <= 0.0 || max_view_angle_deg > 180.0) {
    throw DataError("recipe: max_view_angle_deg must lie in (0, 180]");
  }
}

SyntheticScene generate(const SceneRecipe& recipe) {
  recipe.check();
  const Eigen::Vector3d center = recipe.box.center();
  const double sphere_radius = 0.5 * recipe.box.extent().minCoeff();
  const double half_diagonal = 0.5 * recipe.box.extent().norm();

  SyntheticScene scene;
  CameraIntrinsics camera;
  camera.camera_id = 1;
  camera.model = CameraModel::kPinhole;
  camera.width = 800;
  camera.height = 800;
  camera.params = {800.0, 800.0, 400.0, 400.0};
  scene.model.cameras.emplace(camera.camera_id, camera);

  // Points: ROI points on the inscribed sphere with outward normals,
  // background points in the surrounding shell.
  struct PointSample {
    Eigen::Vector3d position;
    Eigen::Vector3d normal;
    bool in_roi;
  };
  std::vector<PointSample> samples;
  samples.reserve(static_cast<std::size_t>(recipe.points_in_roi +
                                           recipe.points_background));
  SplitMix64 point_rng = stream_rng(recipe.seed, "points");
  // Sphere density is lobed toward a seed-dependent axis, like an object
  // whose featured side carries most of the reconstructed keypoints; view
  // statistics then vary systematically with viewpoint.
  const Eigen::Vector3d lobe_axis = sample_unit_sphere(point_rng);
  for (int i = 0; i < recipe.points_in_roi;) {
    const Eigen::Vector3d n = sample_unit_sphere(point_rng);
    const double density = 0.15 + 0.85 * 0.5 * (1.0 + n.dot(lobe_axis));
    if (point_rng.next_unit() > density) continue;
    samples.push_back({center + sphere_radius * n, n, true});
    ++i;
  }
  const Aabb shell = expanded_box(recipe.box, 4.0);
  for (int i = 0; i < recipe.points_background; ++i) {
    Eigen::Vector3d p;
    do {
      p = sample_in_box(point_rng, shell);
    } while (point_in_aabb(p, recipe.box));
    Eigen::Vector3d n = p - center;
    const double norm = n.norm();
    n = norm > 1e-12 ? Eigen::Vector3d(n / norm) : Eigen::Vector3d::UnitZ();
    samples.push_back({p, n, false});
  }

  SplitMix64 color_rng = stream_rng(recipe.seed, "colors");
  SplitMix64 error_rng = stream_rng(recipe.seed, "errors");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    ScenePoint point;
    point.point3d_id = static_cast<std::int64_t>(i) + 1;
    point.position = samples[i].position;
    point.color = {static_cast<std::uint8_t>(color_rng.next_below(256)),
                   static_cast<std::uint8_t>(color_rng.next_below(256)),
                   static_cast<std::uint8_t>(color_rng.next_below(256))};
    point.reprojection_error = error_rng.next_in(0.1, 1.5);
    scene.model.points.emplace(point.point3d_id, std::move(point));
  }

  // Cameras sit exactly on the declared layout; pose features then vary
  // smoothly along it instead of carrying per-camera noise.
  const double radius = 1.6 * half_diagonal;
  for (int i = 0; i < recipe.cameras; ++i) {
    Eigen::Vector3d position;
    if (recipe.layout == CameraLayout::kRing) {
      const double azimuth =
          kTwoPi * static_cast<double>(i) / recipe.cameras;
      position = center + Eigen::Vector3d(radius * std::cos(azimuth),
                                          radius * std::sin(azimuth), 0.0);
    } else {
      const double z01 = (static_cast<double>(i) + 0.5) / recipe.cameras;
      const double elevation = std::asin(z01);  // upper hemisphere
      const double azimuth = kGoldenAngle * static_cast<double>(i);
      position =
          center + radius * Eigen::Vector3d(
                                std::cos(elevation) * std::cos(azimuth),
                                std::cos(elevation) * std::sin(azimuth),
                                std::sin(elevation));
    }
    PosedImage image;
    image.image_id = i + 1;
    image.camera_id = camera.camera_id;
    image.rotation = look_at(position, center);
    image.translation = -(image.rotation.toRotationMatrix() * position);
    char name[32];
    std::snprintf(name, sizeof(name), "cam_%04d.png", i + 1);
    image.name = name;
    scene.model.images.emplace(image.image_id, std::move(image));
  }

  // Tracks: a point joins an image when its normal faces the camera within
  // the cone and it projects in front of the camera; dropout then thins the
  // observations. Ground truth for ROI points is recorded before dropout.
  const double cos_cone =
      std::cos(recipe.max_view_angle_deg * M_PI / 180.0);
  SplitMix64 dropout_rng = stream_rng(recipe.seed, "dropout");
  for (auto& [image_id, image] : scene.model.images) {
    const Eigen::Vector3d camera_center = image.camera_center();
    std::vector<std::int64_t>* truth = nullptr;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const PointSample& sample = samples[i];
      const std::int64_t point_id = static_cast<std::int64_t>(i) + 1;
      Eigen::Vector3d to_camera = camera_center - sample.position;
      const double distance = to_camera.norm();
      if (distance < 1e-12) continue;
      to_camera /= distance;
      if (sample.normal.dot(to_camera) < cos_cone) continue;
      const auto pixel = project(camera, image, sample.position);
      if (!pixel) continue;
      if (sample.in_roi) {
        if (truth == nullptr) {
          truth = &scene.ground_truth_visibility[image_id];
        }
        truth->push_back(point_id);
      }
      if (recipe.dropout > 0.0 && dropout_rng.next_unit() < recipe.dropout) {
        continue;
      }
      const auto obs_index =
          static_cast<std::int32_t>(image.observations.size());
      image.observations.push_back({pixel->x(), pixel->y(), point_id});
      scene.model.points.at(point_id).track.push_back({image_id, obs_index});
    }
  }
  return scene;
}

SplatSet generate_splats(const SceneRecipe& recipe, std::int64_t inside_count,
                         std::int64_t outside_count, int sh_degree) {
  if (inside_count < 0 || outside_count < 0) {
    throw DataError("splat counts must be >= 0");
  }
  if (!recipe.box.valid()) throw DataError("recipe: invalid ROI box");
  SplatSet set(sh_degree, static_cast<Eigen::Index>(inside_count +
                                                    outside_count));
  const int rest = set.rest_count();
  const Aabb shell = expanded_box(recipe.box, 4.0);
  SplitMix64 rng = stream_rng(recipe.seed, "splats");

  for (Eigen::Index r = 0; r < set.size(); ++r) {
    const bool inside = r < inside_count;
    // Classify membership on the float32-rounded position so boundary
    // rounding can never flip a record across the box.
    Eigen::Vector3f position;
    for (;;) {
      const Eigen::Vector3d p =
          inside ? sample_in_box(rng, recipe.box) : sample_in_box(rng, shell);
      position = p.cast<float>();
      if (point_in_aabb(position, recipe.box) == inside) break;
    }
    auto row = set.components().row(r);
    row.head<3>() = position;
    row.segment<3>(3).setZero();  // normals carried as zero
    for (int c = 0; c < 3; ++c) {
      row(6 + c) = static_cast<float>(rng.next_in(-1.0, 1.0));
    }
    for (int c = 0; c < rest; ++c) {
      row(9 + c) = static_cast<float>(rng.next_in(-0.05, 0.05));
    }
    row(9 + rest) = static_cast<float>(rng.next_in(-4.0, 4.0));  // opacity
    for (int c = 0; c < 3; ++c) {
      row(10 + rest + c) = static_cast<float>(rng.next_in(-6.0, -2.0));
    }
    row(13 + rest) = 1.0f;  // identity rotation
    row.segment<3>(14 + rest).setZero();
  }
  return set;
}

SceneRecipe recipe_from_text(std::string_view text) {
  const KvFile kv = KvFile::parse(text);
  SceneRecipe recipe;
  for (const auto& [key, value] : kv.entries()) {
    if (key.rfind("splats_", 0) == 0) continue;  // CLI-level keys
    if (key == "seed") {
      recipe.seed = static_cast<std::uint64_t>(*kv.get_int(key));
    } else if (key == "points_in_roi") {
      recipe.points_in_roi = static_cast<int>(*kv.get_int(key));
    } else if (key == "points_background") {
      recipe.points_background = static_cast<int>(*kv.get_int(key));
    } else if (key == "box_min_x") {
      recipe.box.min.x() = *kv.get_real(key);
    } else if (key == "box_min_y") {
      recipe.box.min.y() = *kv.get_real(key);
    } else if (key == "box_min_z") {
      recipe.box.min.z() = *kv.get_real(key);
    } else if (key == "box_max_x") {
      recipe.box.max.x() = *kv.get_real(key);
    } else if (key == "box_max_y") {
      recipe.box.max.y() = *kv.get_real(key);
    } else if (key == "box_max_z") {
      recipe.box.max.z() = *kv.get_real(key);
    } else if (key == "cameras") {
      recipe.cameras = static_cast<int>(*kv.get_int(key));
    } else if (key == "layout") {
      if (value == "ring") {
        recipe.layout = CameraLayout::kRing;
      } else if (value == "hemisphere") {
        recipe.layout = CameraLayout::kHemisphere;
      } else {
        throw ParseError("recipe: unknown layout \"" + value + "\"");
      }
    } else if (key == "max_view_angle_deg") {
      recipe.max_view_angle_deg = *kv.get_real(key);
    } else if (key == "dropout") {
      recipe.dropout = *kv.get_real(key);
    } else {
      throw ParseError("recipe: unknown key \"" + key + "\"");
    }
  }
  return recipe;
}

std::string ground_truth_text(const SyntheticScene& scene) {
  std::string out;
  for (const auto& [image_id, ids] : scene.ground_truth_visibility) {
    out += std::to_string(image_id);
    out += ':';
    for (const std::int64_t id : ids) {
      out += ' ';
      out += std::to_string(id);
    }
    out += '\n';
  }
  return out;
}

}  // namespace roigs
