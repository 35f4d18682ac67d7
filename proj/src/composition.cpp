#include "roigs/composition.hpp"

#include "roigs/kv_file.hpp"

namespace roigs {

namespace {

bool center_in_box(const SplatSet& set, Eigen::Index row, const Aabb& box) {
  return point_in_aabb(set.position(row), box);
}

// First box (in input order) containing the record center, or -1.
int first_containing_box(const SplatSet& set, Eigen::Index row,
                         std::span<const ObjectSplats> objects) {
  for (std::size_t i = 0; i < objects.size(); ++i) {
    if (center_in_box(set, row, objects[i].box)) return static_cast<int>(i);
  }
  return -1;
}

}  // namespace

std::pair<SplatSet, SplatSet> filter_in_box(const SplatSet& set,
                                            const Aabb& box) {
  Eigen::Index inside_count = 0;
  for (Eigen::Index r = 0; r < set.size(); ++r) {
    if (center_in_box(set, r, box)) ++inside_count;
  }
  SplatSet inside(set.sh_degree(), inside_count);
  SplatSet outside(set.sh_degree(), set.size() - inside_count);
  Eigen::Index in_row = 0;
  Eigen::Index out_row = 0;
  for (Eigen::Index r = 0; r < set.size(); ++r) {
    if (center_in_box(set, r, box)) {
      inside.components().row(in_row++) = set.components().row(r);
    } else {
      outside.components().row(out_row++) = set.components().row(r);
    }
  }
  return {std::move(inside), std::move(outside)};
}

std::pair<SplatSet, CompositionReport> compose(
    const SplatSet& scene, std::span<const ObjectSplats> objects,
    OverlapPolicy policy) {
  for (const auto& object : objects) {
    if (object.splats == nullptr) {
      throw DataError("object splat set for ROI " + object.roi_id +
                      " is missing");
    }
    if (!object.box.valid()) {
      throw DataError("ROI " + object.roi_id + ": invalid box");
    }
    if (object.splats->sh_degree() != scene.sh_degree()) {
      throw DataError("ROI " + object.roi_id + ": sh_degree " +
                      std::to_string(object.splats->sh_degree()) +
                      " does not match the scene's " +
                      std::to_string(scene.sh_degree()));
    }
  }
  if (policy == OverlapPolicy::kReject) {
    for (std::size_t i = 0; i < objects.size(); ++i) {
      for (std::size_t j = i + 1; j < objects.size(); ++j) {
        if (aabbs_overlap(objects[i].box, objects[j].box)) {
          throw DataError("ROI boxes overlap: " + objects[i].roi_id + " and " +
                          objects[j].roi_id +
                          " (use first_wins to compose anyway)");
        }
      }
    }
  }

  CompositionReport report;
  report.scene_in = scene.size();
  report.rois.resize(objects.size());
  for (std::size_t i = 0; i < objects.size(); ++i) {
    report.rois[i].roi_id = objects[i].roi_id;
  }

  // Pass 1: classify scene records by the first box claiming them, and count
  // object records inside their effective region (own box minus the boxes of
  // earlier ROIs under first_wins; boxes are disjoint under reject).
  std::vector<int> scene_owner(static_cast<std::size_t>(scene.size()), -1);
  Eigen::Index scene_kept = 0;
  for (Eigen::Index r = 0; r < scene.size(); ++r) {
    const int owner = first_containing_box(scene, r, objects);
    scene_owner[static_cast<std::size_t>(r)] = owner;
    if (owner < 0) {
      ++scene_kept;
    } else {
      ++report.rois[static_cast<std::size_t>(owner)].scene_removed;
    }
  }
  std::vector<std::vector<Eigen::Index>> object_rows(objects.size());
  for (std::size_t i = 0; i < objects.size(); ++i) {
    const SplatSet& splats = *objects[i].splats;
    for (Eigen::Index r = 0; r < splats.size(); ++r) {
      if (!center_in_box(splats, r, objects[i].box)) continue;
      const int owner = first_containing_box(splats, r, objects);
      if (static_cast<std::size_t>(owner) == i) {
        object_rows[i].push_back(r);
      }
    }
    report.rois[i].object_inserted =
        static_cast<std::int64_t>(object_rows[i].size());
  }

  Eigen::Index total = scene_kept;
  for (const auto& rows : object_rows) {
    total += static_cast<Eigen::Index>(rows.size());
  }
  SplatSet merged(scene.sh_degree(), total);
  Eigen::Index row = 0;
  for (Eigen::Index r = 0; r < scene.size(); ++r) {
    if (scene_owner[static_cast<std::size_t>(r)] < 0) {
      merged.components().row(row++) = scene.components().row(r);
    }
  }
  for (std::size_t i = 0; i < objects.size(); ++i) {
    const SplatSet& splats = *objects[i].splats;
    for (const Eigen::Index r : object_rows[i]) {
      merged.components().row(row++) = splats.components().row(r);
    }
  }
  report.merged_out = merged.size();
  return {std::move(merged), std::move(report)};
}

std::string composition_report_text(const CompositionReport& report) {
  KvFile kv;
  kv.add_int("scene_gaussians", report.scene_in);
  for (const auto& roi : report.rois) {
    kv.add_int("roi." + roi.roi_id + ".scene_removed", roi.scene_removed);
    kv.add_int("roi." + roi.roi_id + ".object_inserted", roi.object_inserted);
  }
  kv.add_int("merged_gaussians", report.merged_out);
  return kv.text();
}

}  // namespace roigs
