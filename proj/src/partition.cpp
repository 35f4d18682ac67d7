#include "roigs/partition.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_set>

#include "roigs/kv_file.hpp"

namespace roigs {

namespace {

// Indices 0, s, 2s, ... of a length-n prefix pick; count chosen by rounding
// so fractions written as m/len select exactly m despite representation
// error.
std::vector<std::size_t> stride_indices(std::size_t len, double fraction) {
  const auto picked = static_cast<std::int64_t>(
      std::llround(static_cast<double>(len) * fraction));
  if (picked <= 0) return {};
  const std::size_t n =
      std::min(static_cast<std::size_t>(picked), len);
  const std::size_t stride = len / n;
  std::vector<std::size_t> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(i * stride);
  return out;
}

}  // namespace

std::pair<std::vector<std::int32_t>, std::vector<std::int32_t>> hold_out_test(
    std::span<const std::int32_t> roi_visible_ids, double fraction) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw DataError("test fraction must lie in (0, 1)");
  }
  if (!std::is_sorted(roi_visible_ids.begin(), roi_visible_ids.end())) {
    throw DataError("hold_out_test expects ids sorted ascending");
  }
  const auto indices = stride_indices(roi_visible_ids.size(), fraction);
  if (indices.empty()) {
    throw DataError("test fraction selects no test images");
  }
  if (indices.size() == roi_visible_ids.size()) {
    throw DataError("test fraction leaves no training images");
  }
  std::vector<std::int32_t> test;
  test.reserve(indices.size());
  std::vector<std::uint8_t> taken(roi_visible_ids.size(), 0);
  for (const std::size_t i : indices) {
    test.push_back(roi_visible_ids[i]);
    taken[i] = 1;
  }
  std::vector<std::int32_t> remaining;
  remaining.reserve(roi_visible_ids.size() - indices.size());
  for (std::size_t i = 0; i < roi_visible_ids.size(); ++i) {
    if (!taken[i]) remaining.push_back(roi_visible_ids[i]);
  }
  return {std::move(test), std::move(remaining)};
}

PartitionPlan build_partition(std::span<const std::int32_t> all_ids,
                              std::span<const std::int32_t> test_ids,
                              std::span<const RoiSelection> selections,
                              double retain_ratio) {
  if (retain_ratio < 0.0 || retain_ratio > 1.0) {
    throw DataError("retain_ratio must lie in [0, 1]");
  }
  const std::unordered_set<std::int32_t> known(all_ids.begin(), all_ids.end());
  const std::unordered_set<std::int32_t> test(test_ids.begin(),
                                              test_ids.end());
  for (const std::int32_t id : test_ids) {
    if (known.find(id) == known.end()) {
      throw DataError("test id " + std::to_string(id) + " is unknown");
    }
  }

  PartitionPlan plan;
  plan.test_ids.assign(test_ids.begin(), test_ids.end());

  std::unordered_set<std::int32_t> excluded;  // selected by some ROI
  std::unordered_set<std::int32_t> retained;  // retained by at least one ROI
  for (const auto& selection : selections) {
    RoiPartition part;
    part.roi_id = selection.roi_id;
    part.object_train_ids.assign(selection.ordered_ids.begin(),
                                 selection.ordered_ids.end());
    for (const std::int32_t id : selection.ordered_ids) {
      if (known.find(id) == known.end()) {
        throw DataError("selection " + selection.roi_id +
                        " references unknown id " + std::to_string(id));
      }
      if (test.find(id) != test.end()) {
        throw DataError("selection " + selection.roi_id +
                        " contains test id " + std::to_string(id));
      }
      excluded.insert(id);
    }
    const auto keep = stride_indices(selection.ordered_ids.size(),
                                     retain_ratio);
    part.retained_ids.reserve(keep.size());
    for (const std::size_t i : keep) {
      part.retained_ids.push_back(selection.ordered_ids[i]);
      retained.insert(selection.ordered_ids[i]);
    }
    plan.rois.push_back(std::move(part));
  }

  std::set<std::int32_t> scene(all_ids.begin(), all_ids.end());
  for (const std::int32_t id : test) scene.erase(id);
  for (const std::int32_t id : excluded) {
    if (retained.find(id) == retained.end()) scene.erase(id);
  }
  plan.scene_train_ids.assign(scene.begin(), scene.end());
  return plan;
}

std::vector<TrainingManifest> emit_manifests(
    const PartitionPlan& plan, std::span<const RoiSpecLite> roi_boxes,
    const std::string& scene_images_file,
    const std::map<std::string, std::string>& object_images_files) {
  std::vector<TrainingManifest> out;
  std::unordered_set<std::string> used_paths;

  TrainingManifest scene;
  scene.model_role = ModelRole::kScene;
  scene.iterations = 20000;
  scene.initialization = Initialization::kSfmPoints;
  scene.shuffle = true;
  scene.images_file = scene_images_file;
  used_paths.insert(scene.images_file);
  out.push_back(std::move(scene));

  for (const auto& part : plan.rois) {
    const auto box_it =
        std::find_if(roi_boxes.begin(), roi_boxes.end(),
                     [&](const RoiSpecLite& r) { return r.roi_id == part.roi_id; });
    if (box_it == roi_boxes.end()) {
      throw DataError("no ROI box for selection " + part.roi_id);
    }
    const auto file_it = object_images_files.find(part.roi_id);
    if (file_it == object_images_files.end()) {
      throw DataError("no images file for ROI " + part.roi_id);
    }
    TrainingManifest manifest;
    manifest.model_role = ModelRole::kObject;
    manifest.roi_id = part.roi_id;
    manifest.iterations = 30000;
    manifest.densify_region = box_it->box;
    manifest.densify_until_iteration = 15000;
    manifest.initialization = Initialization::kSceneCheckpoint;
    manifest.shuffle = false;  // selection order carries information
    manifest.images_file = file_it->second;
    if (!used_paths.insert(manifest.images_file).second) {
      throw DataError("manifest path collision: " + manifest.images_file);
    }
    out.push_back(std::move(manifest));
  }
  return out;
}

std::string manifest_text(const TrainingManifest& manifest) {
  KvFile kv;
  kv.add("model_role",
         manifest.model_role == ModelRole::kScene ? "scene" : "object");
  if (manifest.model_role == ModelRole::kObject) {
    kv.add("roi_id", manifest.roi_id);
  }
  kv.add_int("iterations", manifest.iterations);
  if (manifest.densify_region) {
    const Aabb& box = *manifest.densify_region;
    kv.add_real("densify_min_x", box.min.x());
    kv.add_real("densify_min_y", box.min.y());
    kv.add_real("densify_min_z", box.min.z());
    kv.add_real("densify_max_x", box.max.x());
    kv.add_real("densify_max_y", box.max.y());
    kv.add_real("densify_max_z", box.max.z());
  }
  if (manifest.densify_until_iteration) {
    kv.add_int("densify_until_iteration", *manifest.densify_until_iteration);
  }
  kv.add("initialization",
         manifest.initialization == Initialization::kSfmPoints
             ? "sfm_points"
             : "scene_checkpoint");
  kv.add("shuffle", manifest.shuffle ? "true" : "false");
  kv.add("images_file", manifest.images_file);
  return kv.text();
}

std::string image_list_text(const SfmModel& model,
                            std::span<const std::int32_t> ids) {
  std::string out;
  for (const std::int32_t id : ids) {
    const auto it = model.images.find(id);
    if (it == model.images.end()) {
      throw DataError("image list references unknown image " +
                      std::to_string(id));
    }
    out += it->second.name;
    out += '\n';
  }
  return out;
}

}  // namespace roigs
