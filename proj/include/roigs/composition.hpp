#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "roigs/geometry.hpp"
#include "roigs/splat_io.hpp"

namespace roigs {

enum class OverlapPolicy {
  kReject,     // ROI boxes must be pairwise disjoint (default)
  kFirstWins,  // earlier ROIs claim the overlap region
};

struct RoiCompositionReport {
  std::string roi_id;
  std::int64_t scene_removed = 0;
  std::int64_t object_inserted = 0;
};

struct CompositionReport {
  std::int64_t scene_in = 0;
  std::int64_t merged_out = 0;  // = scene_in - sum(removed) + sum(inserted)
  std::vector<RoiCompositionReport> rois;
};

/// Partition by Gaussian center membership (closed box); record order is
/// preserved within each part.
std::pair<SplatSet, SplatSet> filter_in_box(const SplatSet& set,
                                            const Aabb& box);

struct ObjectSplats {
  std::string roi_id;
  const SplatSet* splats = nullptr;
  Aabb box;
};

/// AABB replacement: scene records outside every box, then per ROI in input
/// order the object records inside that ROI's effective box. Object records
/// outside their own box are discarded. No transform is applied; all inputs
/// share the SfM coordinate frame.
std::pair<SplatSet, CompositionReport> compose(
    const SplatSet& scene, std::span<const ObjectSplats> objects,
    OverlapPolicy policy = OverlapPolicy::kReject);

/// `key: value` report mirroring the per-ROI and total Gaussian counts.
std::string composition_report_text(const CompositionReport& report);

}  // namespace roigs
