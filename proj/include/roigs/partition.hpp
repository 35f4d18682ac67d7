#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "roigs/geometry.hpp"

namespace roigs {

/// Deterministic test hold-out by stride sampling over the ascending id
/// list: n = round(|ids| * fraction) ids at positions 0, s, 2s, ... with
/// s = floor(|ids| / n). Throws DataError when the split would leave the
/// test set or the remainder empty.
std::pair<std::vector<std::int32_t>, std::vector<std::int32_t>> hold_out_test(
    std::span<const std::int32_t> roi_visible_ids, double fraction);

struct RoiSelection {
  std::string roi_id;
  std::vector<std::int32_t> ordered_ids;  // selection order preserved
};

struct RoiPartition {
  std::string roi_id;
  std::vector<std::int32_t> object_train_ids;  // ordered, full selection
  std::vector<std::int32_t> retained_ids;      // also kept in scene training
};

struct PartitionPlan {
  std::vector<std::int32_t> test_ids;
  std::vector<std::int32_t> scene_train_ids;  // ascending
  std::vector<RoiPartition> rois;
};

/// Splits images into scene/object training sets. Retention takes the
/// stride-sampled share of each ordered selection (ratio 0.5 keeps the
/// even-indexed half); an image selected by several ROIs joins every object
/// set and stays in scene training when at least one ROI retains it.
PartitionPlan build_partition(std::span<const std::int32_t> all_ids,
                              std::span<const std::int32_t> test_ids,
                              std::span<const RoiSelection> selections,
                              double retain_ratio = 0.5);

enum class ModelRole { kScene, kObject };
enum class Initialization { kSfmPoints, kSceneCheckpoint };

struct TrainingManifest {
  ModelRole model_role = ModelRole::kScene;
  std::string roi_id;  // object manifests only
  int iterations = 20000;
  std::optional<Aabb> densify_region;           // object only
  std::optional<int> densify_until_iteration;   // object only
  Initialization initialization = Initialization::kSfmPoints;
  bool shuffle = true;  // object training preserves selection order
  std::string images_file;
};

/// Aabb plus id, the only RoiSpec fields manifests need.
struct RoiSpecLite {
  std::string roi_id;
  Aabb box;
};

/// One scene manifest plus one per ROI, with the training constants the
/// external 3DGS trainer consumes (20K/30K iterations, densification
/// confined to the ROI box until 15K, object models initialized from the
/// scene checkpoint). Throws DataError on duplicate file paths.
std::vector<TrainingManifest> emit_manifests(
    const PartitionPlan& plan, std::span<const RoiSpecLite> roi_boxes,
    const std::string& scene_images_file,
    const std::map<std::string, std::string>& object_images_files);

/// Bit-exact manifest serialization: fixed key order, 9 significant digits,
/// LF line endings.
std::string manifest_text(const TrainingManifest& manifest);

std::string image_list_text(const SfmModel& model,
                            std::span<const std::int32_t> ids);

}  // namespace roigs
