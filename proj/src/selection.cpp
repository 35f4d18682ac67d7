#include "roigs/selection.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "roigs/kv_file.hpp"
#include "roigs/parallel_for.hpp"

namespace roigs {

void RoiSpec::check() const {
  if (roi_id.empty()) throw DataError("roi_id must be non-empty");
  if (!box.valid()) {
    throw DataError("roi " + roi_id +
                    ": box must satisfy min <= max with positive volume");
  }
  if (select_count < 1) {
    throw DataError("roi " + roi_id + ": select_count must be >= 1");
  }
  if (voxel_grid < 2) {
    throw DataError("roi " + roi_id + ": voxel_grid must be >= 2");
  }
  if (w_density < 0.0 || w_occupancy < 0.0 || w_angle < 0.0 ||
      std::abs(w_density + w_occupancy + w_angle - 1.0) > 1e-9) {
    throw DataError("roi " + roi_id +
                    ": score weights must be non-negative and sum to 1");
  }
}

StaticFeatures static_features(const SfmModel& model,
                               const CameraIntrinsics& intrinsics,
                               const PosedImage& image, const Aabb& box) {
  StaticFeatures out;
  out.distance = (image.camera_center() - box.center()).norm();
  if (const auto poly = projected_aabb(intrinsics, image, box)) {
    const double image_area = static_cast<double>(intrinsics.width) *
                              static_cast<double>(intrinsics.height);
    out.proj_area = poly->area / image_area;
  }
  std::vector<std::int64_t> ids;
  for (const auto& obs : image.observations) {
    if (!obs.point3d_id) continue;
    const auto it = model.points.find(*obs.point3d_id);
    if (it != model.points.end() && point_in_aabb(it->second.position, box)) {
      ids.push_back(*obs.point3d_id);
    }
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  out.keypoint_count = static_cast<double>(ids.size());
  return out;
}

namespace {

struct MinMax {
  double lo = 0.0;
  double hi = 0.0;
  double normalized(double v) const {
    return hi > lo ? (v - lo) / (hi - lo) : 0.5;
  }
};

MinMax min_max(std::span<const CandidateView> candidates,
               double (*get)(const CandidateView&)) {
  MinMax mm{get(candidates[0]), get(candidates[0])};
  for (const auto& c : candidates) {
    mm.lo = std::min(mm.lo, get(c));
    mm.hi = std::max(mm.hi, get(c));
  }
  return mm;
}

}  // namespace

std::vector<std::int32_t> static_rank(
    std::span<const CandidateView> candidates) {
  if (candidates.empty()) {
    throw DataError("static_rank requires at least one candidate");
  }
  const MinMax dist = min_max(
      candidates, +[](const CandidateView& c) { return c.statics.distance; });
  const MinMax area = min_max(
      candidates, +[](const CandidateView& c) { return c.statics.proj_area; });
  const MinMax kp = min_max(candidates, +[](const CandidateView& c) {
    return c.statics.keypoint_count;
  });

  std::vector<std::pair<double, std::int32_t>> scored;
  scored.reserve(candidates.size());
  for (const auto& c : candidates) {
    const double composite = ((1.0 - dist.normalized(c.statics.distance)) +
                              area.normalized(c.statics.proj_area) +
                              kp.normalized(c.statics.keypoint_count)) /
                             3.0;
    scored.emplace_back(composite, c.image_id);
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  std::vector<std::int32_t> out;
  out.reserve(scored.size());
  for (const auto& [score, id] : scored) out.push_back(id);
  return out;
}

int direction_bin(const Eigen::Vector3d& unit_dir) {
  const double azimuth = std::atan2(unit_dir.y(), unit_dir.x());  // [-pi, pi]
  const double elevation =
      std::asin(std::clamp(unit_dir.z(), -1.0, 1.0));  // [-pi/2, pi/2]
  int az = static_cast<int>((azimuth + M_PI) / (2.0 * M_PI) * kAzimuthBins);
  int el =
      static_cast<int>((elevation + M_PI / 2.0) / M_PI * kElevationBins);
  az = std::clamp(az, 0, kAzimuthBins - 1);
  el = std::clamp(el, 0, kElevationBins - 1);
  return el * kAzimuthBins + az;
}

int voxel_index(const Eigen::Vector3d& p, const Aabb& box, int grid) {
  const Eigen::Vector3d rel =
      (p - box.min).cwiseQuotient(box.extent()) * static_cast<double>(grid);
  Eigen::Vector3i cell = rel.array().floor().cast<int>();
  cell = cell.cwiseMax(0).cwiseMin(grid - 1);
  return (cell.z() * grid + cell.y()) * grid + cell.x();
}

RoiScore roi_score(const SfmModel& model,
                   std::span<const std::int64_t> selected_point_ids,
                   std::span<const Eigen::Vector3d> selected_view_dirs,
                   const Aabb& box, int grid, const ScoreWeights& weights,
                   const PoolNormalizers& normalizers) {
  if (normalizers.pool_points <= 0 || normalizers.pool_voxels <= 0 ||
      normalizers.pool_bins <= 0) {
    throw DataError("degenerate ROI: a pool normalizer is zero");
  }
  std::unordered_set<std::int64_t> distinct;
  std::unordered_set<int> voxels;
  for (const std::int64_t id : selected_point_ids) {
    const auto it = model.points.find(id);
    if (it == model.points.end()) {
      throw DataError("roi_score: unknown point id " + std::to_string(id));
    }
    if (!point_in_aabb(it->second.position, box)) continue;
    if (distinct.insert(id).second) {
      voxels.insert(voxel_index(it->second.position, box, grid));
    }
  }
  std::unordered_set<int> bins;
  for (const auto& dir : selected_view_dirs) {
    bins.insert(direction_bin(dir));
  }
  RoiScore out;
  out.density = static_cast<double>(distinct.size()) /
                static_cast<double>(normalizers.pool_points);
  out.occupancy = static_cast<double>(voxels.size()) /
                  static_cast<double>(normalizers.pool_voxels);
  out.angle_coverage = static_cast<double>(bins.size()) /
                       static_cast<double>(normalizers.pool_bins);
  out.total = weights.density * out.density +
              weights.occupancy * out.occupancy +
              weights.angle * out.angle_coverage;
  return out;
}

// --- GpPosterior ---------------------------------------------------------------

GpPosterior::GpPosterior(const GpPosterior& other)
    : inputs_(other.inputs_),
      targets_(other.targets_),
      alpha_(other.alpha_),
      chol_lower_(other.chol_lower_),
      sf2_(other.sf2_),
      sn2_(other.sn2_),
      jitter_(other.jitter_),
      clamp_count_(other.clamp_count_.load()) {}

GpPosterior& GpPosterior::operator=(const GpPosterior& other) {
  if (this != &other) {
    inputs_ = other.inputs_;
    targets_ = other.targets_;
    alpha_ = other.alpha_;
    chol_lower_ = other.chol_lower_;
    sf2_ = other.sf2_;
    sn2_ = other.sn2_;
    jitter_ = other.jitter_;
    clamp_count_.store(other.clamp_count_.load());
  }
  return *this;
}

GpPosterior GpPosterior::fit(Eigen::MatrixXd inputs, Eigen::VectorXd targets) {
  return fit(std::move(inputs), std::move(targets),
             Eigen::VectorXd::Zero(targets.size()));
}

GpPosterior GpPosterior::fit(Eigen::MatrixXd inputs, Eigen::VectorXd targets,
                             const Eigen::VectorXd& extra_relative_noise) {
  const Eigen::Index n = inputs.rows();
  if (n < 1) throw DataError("gp_fit requires at least one training pair");
  if (targets.size() != n || extra_relative_noise.size() != n) {
    throw DataError("gp_fit: inputs/targets size mismatch");
  }

  GpPosterior gp;
  const double mean = targets.mean();
  const double variance =
      (targets.array() - mean).square().sum() / static_cast<double>(n);
  gp.sf2_ = std::max(variance, 1e-6);
  gp.sn2_ = 1e-4 * gp.sf2_;

  Eigen::MatrixXd kernel(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    kernel(i, i) = gp.sf2_;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double sq = (inputs.row(i) - inputs.row(j)).squaredNorm();
      const double k = gp.sf2_ * std::exp(-0.5 * sq);
      kernel(i, j) = k;
      kernel(j, i) = k;
    }
  }
  kernel.diagonal().array() +=
      gp.sn2_ + gp.sf2_ * extra_relative_noise.array();

  double jitter = 0.0;
  Eigen::LLT<Eigen::MatrixXd> llt(kernel);
  while (llt.info() != Eigen::Success) {
    jitter = jitter == 0.0 ? 1e-10 : jitter * 10.0;
    if (jitter > 1e-4) {
      const double max_diag = kernel.diagonal().maxCoeff();
      const double min_diag = kernel.diagonal().minCoeff();
      throw DataError(
          "gp_fit: factorization failed after jitter escalation "
          "(diagonal ratio ~" +
          format_real(max_diag / std::max(min_diag, 1e-300)) + ")");
    }
    Eigen::MatrixXd jittered = kernel;
    jittered.diagonal().array() += jitter;
    llt.compute(jittered);
  }
  gp.jitter_ = jitter;
  gp.alpha_ = llt.solve(targets);
  gp.chol_lower_ = llt.matrixL();
  gp.inputs_ = std::move(inputs);
  gp.targets_ = std::move(targets);
  return gp;
}

std::pair<double, double> GpPosterior::predict(
    const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (x.size() != inputs_.cols()) {
    throw DataError("gp_predict: input has " + std::to_string(x.size()) +
                    " dims, posterior was fitted on " +
                    std::to_string(inputs_.cols()));
  }
  const Eigen::Index n = inputs_.rows();
  Eigen::VectorXd k(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    k(i) = sf2_ *
           std::exp(-0.5 * (inputs_.row(i).transpose() - x).squaredNorm());
  }
  const double mean = k.dot(alpha_);
  const Eigen::VectorXd v =
      chol_lower_.triangularView<Eigen::Lower>().solve(k);
  double variance = sf2_ - v.squaredNorm();
  if (variance < 0.0) {
    clamp_count_.fetch_add(1, std::memory_order_relaxed);
    variance = 0.0;
  }
  return {mean, variance};
}

// --- SelectionProblem ------------------------------------------------------------

SelectionProblem build_selection_problem(
    const SfmModel& model, const RoiSpec& roi,
    std::span<const std::int32_t> candidate_ids, int threads) {
  roi.check();
  if (candidate_ids.empty()) {
    throw DataError("roi " + roi.roi_id + ": empty candidate pool");
  }
  std::vector<std::int32_t> ids(candidate_ids.begin(), candidate_ids.end());
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());

  SelectionProblem problem;
  problem.box = roi.box;
  problem.grid = roi.voxel_grid;
  problem.weights = {roi.w_density, roi.w_occupancy, roi.w_angle};
  problem.mode = roi.feature_mode;

  const std::size_t n = ids.size();
  problem.candidates.resize(n);
  std::vector<std::vector<std::int64_t>> in_box_ids(n);

  // Resolve references serially; workers must not throw.
  std::vector<const PosedImage*> images(n);
  std::vector<const CameraIntrinsics*> cameras(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto image_it = model.images.find(ids[i]);
    if (image_it == model.images.end()) {
      throw DataError("candidate image " + std::to_string(ids[i]) +
                      " is not in the model");
    }
    const auto camera_it = model.cameras.find(image_it->second.camera_id);
    if (camera_it == model.cameras.end()) {
      throw DataError("image " + std::to_string(ids[i]) +
                      ": dangling camera reference");
    }
    images[i] = &image_it->second;
    cameras[i] = &camera_it->second;
  }

  parallel_for(n, threads, [&](std::size_t i) {
    const PosedImage& image = *images[i];
    std::vector<std::int64_t>& list = in_box_ids[i];
    for (const auto& obs : image.observations) {
      if (!obs.point3d_id) continue;
      const auto it = model.points.find(*obs.point3d_id);
      if (it != model.points.end() &&
          point_in_aabb(it->second.position, roi.box)) {
        list.push_back(*obs.point3d_id);
      }
    }
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());

    CandidateView& view = problem.candidates[i];
    view.image_id = ids[i];
    view.center = image.camera_center();
    view.forward = image.view_direction();
    view.statics.distance = (view.center - roi.box.center()).norm();
    if (const auto poly = projected_aabb(*cameras[i], image, roi.box)) {
      view.statics.proj_area =
          poly->area / (static_cast<double>(cameras[i]->width) *
                        static_cast<double>(cameras[i]->height));
    }
    view.statics.keypoint_count = static_cast<double>(list.size());
  });

  // Dense pool-point index space.
  for (const auto& list : in_box_ids) {
    problem.pool_point_ids.insert(problem.pool_point_ids.end(), list.begin(),
                                  list.end());
  }
  std::sort(problem.pool_point_ids.begin(), problem.pool_point_ids.end());
  problem.pool_point_ids.erase(
      std::unique(problem.pool_point_ids.begin(), problem.pool_point_ids.end()),
      problem.pool_point_ids.end());
  if (problem.pool_point_ids.empty()) {
    throw DataError("roi " + roi.roi_id +
                    ": degenerate ROI, no candidate observes an in-box point");
  }
  std::unordered_map<std::int64_t, std::int32_t> dense_index;
  dense_index.reserve(problem.pool_point_ids.size());
  for (std::size_t i = 0; i < problem.pool_point_ids.size(); ++i) {
    dense_index.emplace(problem.pool_point_ids[i],
                        static_cast<std::int32_t>(i));
  }
  problem.candidate_points.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& dst = problem.candidate_points[i];
    dst.reserve(in_box_ids[i].size());
    for (const std::int64_t id : in_box_ids[i]) {
      dst.push_back(dense_index.at(id));
    }
  }

  // Remap raw voxel cells and direction bins of the pool to dense indices;
  // cells the pool never touches cannot contribute to any score.
  std::unordered_map<int, std::int32_t> voxel_remap;
  problem.point_voxel.resize(problem.pool_point_ids.size());
  for (std::size_t i = 0; i < problem.pool_point_ids.size(); ++i) {
    const auto& point = model.points.at(problem.pool_point_ids[i]);
    const int raw = voxel_index(point.position, roi.box, roi.voxel_grid);
    const auto [it, inserted] = voxel_remap.emplace(
        raw, static_cast<std::int32_t>(voxel_remap.size()));
    problem.point_voxel[i] = it->second;
  }
  std::unordered_map<int, std::int32_t> bin_remap;
  problem.candidate_bin.resize(n);
  const Eigen::Vector3d box_center = roi.box.center();
  for (std::size_t i = 0; i < n; ++i) {
    Eigen::Vector3d dir = problem.candidates[i].center - box_center;
    const double norm = dir.norm();
    dir = norm > 1e-12 ? Eigen::Vector3d(dir / norm)
                       : Eigen::Vector3d::UnitZ();
    const int raw = direction_bin(dir);
    const auto [it, inserted] =
        bin_remap.emplace(raw, static_cast<std::int32_t>(bin_remap.size()));
    problem.candidate_bin[i] = it->second;
  }
  problem.normalizers.pool_points =
      static_cast<std::int64_t>(problem.pool_point_ids.size());
  problem.normalizers.pool_voxels =
      static_cast<std::int64_t>(voxel_remap.size());
  problem.normalizers.pool_bins = static_cast<std::int64_t>(bin_remap.size());

  // Raw 9-feature rows, then a pool z-score. Constant features standardize
  // to zero instead of dividing by a vanishing spread.
  problem.features.resize(static_cast<Eigen::Index>(n), 9);
  for (std::size_t i = 0; i < n; ++i) {
    const CandidateView& c = problem.candidates[i];
    problem.features.row(static_cast<Eigen::Index>(i))
        << c.center.x(), c.center.y(), c.center.z(), c.forward.x(),
        c.forward.y(), c.forward.z(), c.statics.distance, c.statics.proj_area,
        c.statics.keypoint_count;
  }
  const Eigen::RowVectorXd mean_row = problem.features.colwise().mean();
  const Eigen::MatrixXd centered = problem.features.rowwise() - mean_row;
  Eigen::RowVectorXd stddev_row =
      (centered.array().square().colwise().sum() / static_cast<double>(n))
          .sqrt()
          .matrix();
  for (Eigen::Index d = 0; d < 9; ++d) {
    if (stddev_row(d) < 1e-12) stddev_row(d) = 1.0;
  }
  for (Eigen::Index d = 0; d < 9; ++d) {
    problem.features.col(d) = centered.col(d) / stddev_row(d);
  }
  problem.feature_mean = mean_row.transpose();
  problem.feature_stddev = stddev_row.transpose();
  return problem;
}

// --- CoverageState ---------------------------------------------------------------

CoverageState::CoverageState(const SelectionProblem& problem)
    : problem_(&problem),
      point_covered_(problem.pool_point_ids.size(), 0),
      voxel_occupied_(static_cast<std::size_t>(problem.normalizers.pool_voxels),
                      0),
      bin_occupied_(static_cast<std::size_t>(problem.normalizers.pool_bins),
                    0) {}

RoiScore CoverageState::score() const {
  const auto& norm = problem_->normalizers;
  RoiScore out;
  out.density =
      static_cast<double>(points_) / static_cast<double>(norm.pool_points);
  out.occupancy =
      static_cast<double>(voxels_) / static_cast<double>(norm.pool_voxels);
  out.angle_coverage =
      static_cast<double>(bins_) / static_cast<double>(norm.pool_bins);
  const auto& w = problem_->weights;
  out.total = w.density * out.density + w.occupancy * out.occupancy +
              w.angle * out.angle_coverage;
  return out;
}

double CoverageState::add_candidate(std::size_t candidate_index) {
  const double before = score().total;
  for (const std::int32_t pt : problem_->candidate_points[candidate_index]) {
    auto& covered = point_covered_[static_cast<std::size_t>(pt)];
    if (covered) continue;
    covered = 1;
    ++points_;
    auto& occ = voxel_occupied_[static_cast<std::size_t>(
        problem_->point_voxel[static_cast<std::size_t>(pt)])];
    if (!occ) {
      occ = 1;
      ++voxels_;
    }
  }
  auto& bin = bin_occupied_[static_cast<std::size_t>(
      problem_->candidate_bin[candidate_index])];
  if (!bin) {
    bin = 1;
    ++bins_;
  }
  return score().total - before;
}

double CoverageState::peek_gain(std::size_t candidate_index) const {
  std::int64_t new_points = 0;
  std::int64_t new_voxels = 0;
  std::unordered_set<std::int32_t> seen_voxels;
  for (const std::int32_t pt : problem_->candidate_points[candidate_index]) {
    if (point_covered_[static_cast<std::size_t>(pt)]) continue;
    ++new_points;
    const std::int32_t voxel =
        problem_->point_voxel[static_cast<std::size_t>(pt)];
    if (!voxel_occupied_[static_cast<std::size_t>(voxel)] &&
        seen_voxels.insert(voxel).second) {
      ++new_voxels;
    }
  }
  const std::int64_t new_bins =
      bin_occupied_[static_cast<std::size_t>(
          problem_->candidate_bin[candidate_index])]
          ? 0
          : 1;
  // Same expression shape as score() so peeked and realized gains agree to
  // the last bit.
  const auto& w = problem_->weights;
  const auto& norm = problem_->normalizers;
  const double density = static_cast<double>(points_ + new_points) /
                         static_cast<double>(norm.pool_points);
  const double occupancy = static_cast<double>(voxels_ + new_voxels) /
                           static_cast<double>(norm.pool_voxels);
  const double angle = static_cast<double>(bins_ + new_bins) /
                       static_cast<double>(norm.pool_bins);
  const double after =
      w.density * density + w.occupancy * occupancy + w.angle * angle;
  return after - score().total;
}

RoiScore subset_score(const SelectionProblem& problem,
                      std::span<const std::size_t> candidate_indices) {
  CoverageState state(problem);
  for (const std::size_t idx : candidate_indices) state.add_candidate(idx);
  return state.score();
}

// --- greedy_select -----------------------------------------------------------------

SelectionResult greedy_select(const SfmModel& model, const RoiSpec& roi,
                              std::span<const std::int32_t> candidate_ids,
                              const SelectionOptions& options) {
  const SelectionProblem problem =
      build_selection_problem(model, roi, candidate_ids, options.threads);
  const std::size_t n = static_cast<std::size_t>(problem.count());
  const std::size_t want = static_cast<std::size_t>(roi.select_count);
  const std::size_t steps = std::min(want, n);

  SelectionResult result;
  result.pool_exhausted = want > n;
  result.ordered_ids.reserve(steps);
  result.trace.reserve(steps);

  std::vector<std::uint8_t> remaining(n, 1);
  std::unordered_map<std::int32_t, std::size_t> index_of_id;
  index_of_id.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    index_of_id.emplace(problem.candidates[i].image_id, i);
  }

  CoverageState state(problem);
  const int dims = problem.feature_dims();
  Eigen::MatrixXd train_x(static_cast<Eigen::Index>(steps), dims);
  Eigen::VectorXd train_y(static_cast<Eigen::Index>(steps));

  for (std::size_t step = 0; step < steps; ++step) {
    std::size_t pick = n;
    double predicted = 0.0;
    if (step == 0) {
      const auto ranked = static_rank(problem.candidates);
      pick = index_of_id.at(ranked.front());
    } else {
      std::vector<double> acquisition(n, 0.0);
      std::vector<double> mean(n, 0.0);
      if (options.exact_gain_acquisition) {
        parallel_for(n, options.threads, [&](std::size_t i) {
          if (!remaining[i]) return;
          mean[i] = state.peek_gain(i);
          acquisition[i] = mean[i];
        });
      } else {
        // The GP models the deviation of a view's gain from the running
        // average gain. With raw (all-positive) targets and a zero-mean
        // prior, spent neighborhoods keep a positive posterior mean while
        // unexplored views revert to zero, and no beta can make the
        // acquisition leave a cluster. Centering is shift-invariant for
        // the signal variance, so the kernel hyperparameters are unchanged.
        const double gain_mean =
            train_y.head(static_cast<Eigen::Index>(step)).mean();
        const Eigen::VectorXd centered =
            train_y.head(static_cast<Eigen::Index>(step)).array() - gain_mean;
        // Each gain was measured against the selected set of its own step;
        // coverage it described has since been absorbed. Age-squared noise
        // inflation keeps the posterior tracking the current landscape.
        Eigen::VectorXd staleness(static_cast<Eigen::Index>(step));
        for (std::size_t i = 0; i < step; ++i) {
          const double age = static_cast<double>(step - 1 - i);
          staleness(static_cast<Eigen::Index>(i)) =
              options.stale_noise_rate * age * age;
        }
        const GpPosterior gp = GpPosterior::fit(
            train_x.topRows(static_cast<Eigen::Index>(step)), centered,
            staleness);
        parallel_for(n, options.threads, [&](std::size_t i) {
          if (!remaining[i]) return;
          const auto [mu, var] =
              gp.predict(problem.feature(static_cast<Eigen::Index>(i)));
          mean[i] = mu + gain_mean;
          acquisition[i] = mean[i] + options.beta * std::sqrt(var);
        });
      }
      for (std::size_t i = 0; i < n; ++i) {
        if (!remaining[i]) continue;
        if (pick == n || acquisition[i] > acquisition[pick]) pick = i;
      }
      predicted = mean[pick];
    }

    remaining[pick] = 0;
    const double realized = state.add_candidate(pick);
    train_x.row(static_cast<Eigen::Index>(step)) =
        problem.feature(static_cast<Eigen::Index>(pick)).transpose();
    train_y(static_cast<Eigen::Index>(step)) = realized;

    result.ordered_ids.push_back(problem.candidates[pick].image_id);
    result.trace.push_back({static_cast<int>(step) + 1,
                            problem.candidates[pick].image_id, predicted,
                            realized, state.score()});
  }
  return result;
}

std::vector<std::int32_t> select_first_k(const SelectionResult& result,
                                         std::size_t k) {
  if (k > result.ordered_ids.size()) {
    throw DataError("select_first_k: k = " + std::to_string(k) +
                    " exceeds selection length " +
                    std::to_string(result.ordered_ids.size()));
  }
  return {result.ordered_ids.begin(),
          result.ordered_ids.begin() + static_cast<std::ptrdiff_t>(k)};
}

std::string selection_list_text(const SfmModel& model,
                                const SelectionResult& result) {
  std::string out;
  for (const std::int32_t id : result.ordered_ids) {
    const auto it = model.images.find(id);
    if (it == model.images.end()) {
      throw DataError("selection references unknown image " +
                      std::to_string(id));
    }
    out += it->second.name;
    out += '\n';
  }
  return out;
}

std::string selection_trace_csv(const SelectionResult& result) {
  std::string out =
      "step,image_id,predicted_gain,realized_gain,density,occupancy,"
      "angle_coverage,total\n";
  for (const auto& step : result.trace) {
    out += std::to_string(step.step);
    out += ',';
    out += std::to_string(step.image_id);
    out += ',';
    out += format_real(step.predicted_gain);
    out += ',';
    out += format_real(step.realized_gain);
    out += ',';
    out += format_real(step.cumulative.density);
    out += ',';
    out += format_real(step.cumulative.occupancy);
    out += ',';
    out += format_real(step.cumulative.angle_coverage);
    out += ',';
    out += format_real(step.cumulative.total);
    out += '\n';
  }
  return out;
}

}  // namespace roigs
