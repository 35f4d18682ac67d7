#pragma once

// Brute-force re-implementation of the coverage score and greedy selection,
// kept deliberately naive (std::set counting, from-scratch evaluation each
// step) and independent of the SelectionProblem/CoverageState code paths.

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <vector>

#include "roigs/selection.hpp"

namespace roigs::testing {

inline int oracle_voxel(const Eigen::Vector3d& p, const Aabb& box, int grid) {
  auto cell = [&](int axis) {
    const double rel =
        (p[axis] - box.min[axis]) / (box.max[axis] - box.min[axis]);
    return std::clamp(static_cast<int>(std::floor(rel * grid)), 0, grid - 1);
  };
  return (cell(2) * grid + cell(1)) * grid + cell(0);
}

inline int oracle_bin(const Eigen::Vector3d& dir) {
  const int az = std::clamp(
      static_cast<int>(std::floor((std::atan2(dir.y(), dir.x()) + M_PI) /
                                  (2.0 * M_PI) * 12.0)),
      0, 11);
  const int el = std::clamp(
      static_cast<int>(std::floor(
          (std::asin(std::clamp(dir.z(), -1.0, 1.0)) + M_PI / 2.0) / M_PI *
          6.0)),
      0, 5);
  return el * 12 + az;
}

struct OracleContext {
  const SfmModel* model;
  Aabb box;
  int grid;
  double wd, wo, wa;
  std::vector<std::int32_t> candidates;
  std::map<std::int32_t, std::set<std::int64_t>> in_box;  // per candidate
  std::size_t pool_points, pool_voxels, pool_bins;

  static OracleContext build(const SfmModel& model, const RoiSpec& roi,
                             const std::vector<std::int32_t>& candidates) {
    OracleContext ctx;
    ctx.model = &model;
    ctx.box = roi.box;
    ctx.grid = roi.voxel_grid;
    ctx.wd = roi.w_density;
    ctx.wo = roi.w_occupancy;
    ctx.wa = roi.w_angle;
    ctx.candidates = candidates;
    std::set<std::int64_t> pool;
    std::set<int> voxels, bins;
    for (const std::int32_t id : candidates) {
      const PosedImage& image = model.images.at(id);
      for (const auto& obs : image.observations) {
        if (!obs.point3d_id) continue;
        const ScenePoint& point = model.points.at(*obs.point3d_id);
        if (!point_in_aabb(point.position, roi.box)) continue;
        ctx.in_box[id].insert(*obs.point3d_id);
        pool.insert(*obs.point3d_id);
        voxels.insert(oracle_voxel(point.position, roi.box, roi.voxel_grid));
      }
      bins.insert(oracle_bin(
          (image.camera_center() - roi.box.center()).normalized()));
    }
    ctx.pool_points = pool.size();
    ctx.pool_voxels = voxels.size();
    ctx.pool_bins = bins.size();
    return ctx;
  }

  double total(const std::vector<std::int32_t>& selected) const {
    std::set<std::int64_t> points;
    std::set<int> voxels, bins;
    for (const std::int32_t id : selected) {
      const auto it = in_box.find(id);
      if (it != in_box.end()) {
        for (const std::int64_t pid : it->second) {
          points.insert(pid);
          voxels.insert(
              oracle_voxel(model->points.at(pid).position, box, grid));
        }
      }
      bins.insert(oracle_bin(
          (model->images.at(id).camera_center() - box.center()).normalized()));
    }
    return wd * (static_cast<double>(points.size()) /
                 static_cast<double>(pool_points)) +
           wo * (static_cast<double>(voxels.size()) /
                 static_cast<double>(pool_voxels)) +
           wa * (static_cast<double>(bins.size()) /
                 static_cast<double>(pool_bins));
  }

  // Static composite recomputed spreadsheet-style.
  std::vector<std::int32_t> static_order() const {
    std::vector<double> dist, area, kp;
    for (const std::int32_t id : candidates) {
      const PosedImage& image = model->images.at(id);
      const CameraIntrinsics& cam = model->cameras.at(image.camera_id);
      dist.push_back((image.camera_center() - box.center()).norm());
      const auto poly = projected_aabb(cam, image, box);
      area.push_back(poly ? poly->area / (static_cast<double>(cam.width) *
                                          static_cast<double>(cam.height))
                          : 0.0);
      const auto it = in_box.find(id);
      kp.push_back(it == in_box.end()
                       ? 0.0
                       : static_cast<double>(it->second.size()));
    }
    auto norm = [](const std::vector<double>& v, double x) {
      const double lo = *std::min_element(v.begin(), v.end());
      const double hi = *std::max_element(v.begin(), v.end());
      return hi > lo ? (x - lo) / (hi - lo) : 0.5;
    };
    std::vector<std::pair<double, std::int32_t>> scored;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      scored.emplace_back(((1.0 - norm(dist, dist[i])) + norm(area, area[i]) +
                           norm(kp, kp[i])) /
                              3.0,
                          candidates[i]);
    }
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;
    });
    std::vector<std::int32_t> out;
    for (const auto& [s, id] : scored) out.push_back(id);
    return out;
  }

  // Greedy by true marginal gain, seeded with the static winner, ties by
  // ascending id.
  std::vector<std::int32_t> greedy(std::size_t k) const {
    std::vector<std::int32_t> selected;
    std::vector<std::int32_t> remaining = candidates;
    const std::int32_t seed_view = static_order().front();
    selected.push_back(seed_view);
    remaining.erase(std::find(remaining.begin(), remaining.end(), seed_view));
    while (selected.size() < k && !remaining.empty()) {
      const double base = total(selected);
      double best_gain = -1.0;
      std::int32_t best_id = remaining.front();
      for (const std::int32_t id : remaining) {  // ascending ids
        std::vector<std::int32_t> trial = selected;
        trial.push_back(id);
        const double gain = total(trial) - base;
        if (gain > best_gain) {
          best_gain = gain;
          best_id = id;
        }
      }
      selected.push_back(best_id);
      remaining.erase(std::find(remaining.begin(), remaining.end(), best_id));
    }
    return selected;
  }
};

}  // namespace roigs::testing
