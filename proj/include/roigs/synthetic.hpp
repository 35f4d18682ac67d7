#pragma once

#include <cstdint>
#include <map>
#include <string_view>
#include <vector>

#include "roigs/colmap_model.hpp"
#include "roigs/geometry.hpp"
#include "roigs/splat_io.hpp"

namespace roigs {

enum class CameraLayout { kRing, kHemisphere };

/// Deterministic synthetic capture: points on the sphere inscribed in the
/// ROI box plus a uniform background shell, cameras on a ring or hemisphere
/// looking at the box center. Identical recipes generate identical models
/// on every platform (SplitMix64 substreams per entity class).
struct SceneRecipe {
  std::uint64_t seed = 1;
  int points_in_roi = 0;
  int points_background = 0;
  Aabb box{Eigen::Vector3d(-1, -1, -1), Eigen::Vector3d(1, 1, 1)};
  int cameras = 0;
  CameraLayout layout = CameraLayout::kRing;
  double max_view_angle_deg = 90.0;  // normal-to-view-direction cone
  double dropout = 0.0;              // per-(point, camera) track omission

  void check() const;
};

struct SyntheticScene {
  SfmModel model;
  /// In-box point ids visible per image before dropout was applied.
  std::map<std::int32_t, std::vector<std::int64_t>> ground_truth_visibility;
};

SyntheticScene generate(const SceneRecipe& recipe);

/// Splat fixture with exact in-box / out-of-box record counts; positions
/// uniform in the box and in a surrounding shell.
SplatSet generate_splats(const SceneRecipe& recipe, std::int64_t inside_count,
                         std::int64_t outside_count, int sh_degree = 3);

SceneRecipe recipe_from_text(std::string_view text);

std::string ground_truth_text(const SyntheticScene& scene);

}  // namespace roigs
