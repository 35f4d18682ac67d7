#pragma once

#include <Eigen/Core>
#include <atomic>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "roigs/colmap_model.hpp"
#include "roigs/geometry.hpp"

namespace roigs {

enum class FeatureMode { kSix, kNine };

/// One region of interest plus its selection parameters.
struct RoiSpec {
  std::string roi_id;
  Aabb box;
  int select_count = 150;
  FeatureMode feature_mode = FeatureMode::kNine;
  int voxel_grid = 16;  // G cells per axis
  double w_density = 0.4;
  double w_occupancy = 0.4;
  double w_angle = 0.2;
  std::uint64_t seed = 0;

  void check() const;  // throws DataError on invariant violations
};

/// Raw (unstandardized) static criteria of one view.
struct StaticFeatures {
  double distance = 0.0;        // camera center to box center, meters
  double proj_area = 0.0;       // projected-AABB area / image area, [0, 1]
  double keypoint_count = 0.0;  // distinct in-box points on the image track
};

StaticFeatures static_features(const SfmModel& model,
                               const CameraIntrinsics& intrinsics,
                               const PosedImage& image, const Aabb& box);

struct CandidateView {
  std::int32_t image_id = 0;
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  Eigen::Vector3d forward = Eigen::Vector3d::Zero();
  StaticFeatures statics;
};

/// Descending composite of the three per-pool min-max normalized criteria
/// (distance inverted: closer is better), ties by ascending image_id.
/// Criteria with zero spread over the pool contribute a constant 0.5.
std::vector<std::int32_t> static_rank(std::span<const CandidateView> candidates);

// --- coverage score ----------------------------------------------------------

inline constexpr int kAzimuthBins = 12;
inline constexpr int kElevationBins = 6;
inline constexpr int kDirectionBins = kAzimuthBins * kElevationBins;

/// Bin of a unit direction on the 12x6 azimuth/elevation grid.
int direction_bin(const Eigen::Vector3d& unit_dir);

/// Cell of an in-box point on the G^3 grid over the box (clamped to the
/// boundary cells, consistent with closed-box membership).
int voxel_index(const Eigen::Vector3d& p, const Aabb& box, int grid);

struct ScoreWeights {
  double density = 0.4;
  double occupancy = 0.4;
  double angle = 0.2;
};

/// Denominators measured over the full candidate pool.
struct PoolNormalizers {
  std::int64_t pool_points = 0;  // distinct in-box points visible from pool
  std::int64_t pool_voxels = 0;  // voxels occupied under the full pool
  std::int64_t pool_bins = 0;    // direction bins occupied under the pool
};

struct RoiScore {
  double density = 0.0;
  double occupancy = 0.0;
  double angle_coverage = 0.0;
  double total = 0.0;
};

/// Pool-normalized coverage of a selected set, from raw ids and directions.
/// selected_point_ids may repeat; only distinct in-box points count.
/// Throws DataError on a zero normalizer (degenerate ROI).
RoiScore roi_score(const SfmModel& model,
                   std::span<const std::int64_t> selected_point_ids,
                   std::span<const Eigen::Vector3d> selected_view_dirs,
                   const Aabb& box, int grid, const ScoreWeights& weights,
                   const PoolNormalizers& normalizers);

// --- Gaussian process surrogate -----------------------------------------------

/// Zero-mean GP with a squared-exponential kernel, unit length scales on
/// z-scored inputs, signal variance from the target spread (floored at 1e-6)
/// and noise variance 1e-4 of it. Cholesky factorization escalates jitter
/// from 1e-10 to 1e-4 before giving up.
class GpPosterior {
 public:
  GpPosterior() = default;
  GpPosterior(const GpPosterior& other);
  GpPosterior& operator=(const GpPosterior& other);

  static GpPosterior fit(Eigen::MatrixXd inputs, Eigen::VectorXd targets);

  /// As fit(), with per-sample extra noise variance expressed in units of
  /// the signal variance (diagonal gets sn2 + extra_noise[i] * sf2).
  static GpPosterior fit(Eigen::MatrixXd inputs, Eigen::VectorXd targets,
                         const Eigen::VectorXd& extra_relative_noise);

  /// (mean, variance); variance clamped at zero, clamps counted.
  std::pair<double, double> predict(
      const Eigen::Ref<const Eigen::VectorXd>& x) const;

  Eigen::Index dimension() const { return inputs_.cols(); }
  Eigen::Index training_size() const { return inputs_.rows(); }
  double signal_variance() const { return sf2_; }
  double noise_variance() const { return sn2_; }
  double jitter() const { return jitter_; }
  long variance_clamp_count() const { return clamp_count_.load(); }

 private:
  Eigen::MatrixXd inputs_;
  Eigen::VectorXd targets_;
  Eigen::VectorXd alpha_;
  Eigen::MatrixXd chol_lower_;
  double sf2_ = 0.0;
  double sn2_ = 0.0;
  double jitter_ = 0.0;
  mutable std::atomic<long> clamp_count_{0};
};

// --- greedy selection ----------------------------------------------------------

/// Immutable per-ROI pool context shared by ranking, scoring and selection.
/// Candidates are stored in ascending image_id order; points, voxels and
/// direction bins are remapped to dense pool-local indices.
struct SelectionProblem {
  Aabb box;
  int grid = 16;
  ScoreWeights weights;
  FeatureMode mode = FeatureMode::kNine;

  std::vector<CandidateView> candidates;
  std::vector<std::vector<std::int32_t>> candidate_points;  // dense indices
  std::vector<std::int64_t> pool_point_ids;  // dense index -> point id
  std::vector<std::int32_t> point_voxel;     // dense voxel index per point
  std::vector<std::int32_t> candidate_bin;   // dense bin index per candidate
  PoolNormalizers normalizers;

  Eigen::MatrixXd features;  // count x 9, standardized per pool
  Eigen::VectorXd feature_mean;
  Eigen::VectorXd feature_stddev;

  Eigen::Index count() const {
    return static_cast<Eigen::Index>(candidates.size());
  }
  int feature_dims() const { return mode == FeatureMode::kSix ? 6 : 9; }
  Eigen::VectorXd feature(Eigen::Index candidate) const {
    return features.row(candidate).head(feature_dims()).transpose();
  }
};

SelectionProblem build_selection_problem(const SfmModel& model,
                                         const RoiSpec& roi,
                                         std::span<const std::int32_t>
                                             candidate_ids,
                                         int threads = 1);

/// Incremental coverage counters of a growing selected set.
class CoverageState {
 public:
  explicit CoverageState(const SelectionProblem& problem);

  RoiScore score() const;
  /// Adds one candidate; returns the gain in total score.
  double add_candidate(std::size_t candidate_index);
  /// Gain add_candidate would return, without mutating.
  double peek_gain(std::size_t candidate_index) const;

 private:
  const SelectionProblem* problem_;
  std::vector<std::uint8_t> point_covered_;
  std::vector<std::uint8_t> voxel_occupied_;
  std::vector<std::uint8_t> bin_occupied_;
  std::int64_t points_ = 0;
  std::int64_t voxels_ = 0;
  std::int64_t bins_ = 0;
};

RoiScore subset_score(const SelectionProblem& problem,
                      std::span<const std::size_t> candidate_indices);

struct SelectionTraceStep {
  int step = 0;  // 1-based
  std::int32_t image_id = 0;
  double predicted_gain = 0.0;
  double realized_gain = 0.0;
  RoiScore cumulative;
};

struct SelectionResult {
  std::vector<std::int32_t> ordered_ids;
  std::vector<SelectionTraceStep> trace;
  bool pool_exhausted = false;  // pool smaller than the requested K
};

struct SelectionOptions {
  double beta = 1.0;  // UCB exploration weight; 0 = pure exploitation
  int threads = 1;
  /// Gains are measured against the selected set of their step, so older
  /// pairs describe a landscape that no longer exists; a pair of age a
  /// carries stale_noise_rate * a^2 extra noise (in signal-variance units).
  double stale_noise_rate = 1.0;
  /// Replace the GP surrogate with the exact current-step marginal gain
  /// (oracle-equivalence testing).
  bool exact_gain_acquisition = false;
};

/// Greedy K-view selection: step 1 takes the static_rank winner, later steps
/// maximize mean + beta*stddev of a GP fitted on the realized gains of the
/// chosen views, ties broken by ascending image_id. Deterministic for fixed
/// inputs regardless of thread count.
SelectionResult greedy_select(const SfmModel& model, const RoiSpec& roi,
                              std::span<const std::int32_t> candidate_ids,
                              const SelectionOptions& options = {});

/// Order-preserving prefix of length k; throws DataError when k exceeds the
/// selection length.
std::vector<std::int32_t> select_first_k(const SelectionResult& result,
                                         std::size_t k);

/// One image name per line, selection order.
std::string selection_list_text(const SfmModel& model,
                                const SelectionResult& result);

/// step,image_id,predicted_gain,realized_gain,density,occupancy,
/// angle_coverage,total
std::string selection_trace_csv(const SelectionResult& result);

}  // namespace roigs
