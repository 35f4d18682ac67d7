#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <vector>

#include "roigs/rng.hpp"
#include "roigs/selection.hpp"
#include "roigs/synthetic.hpp"
#include "selection_oracle.hpp"

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

SfmModel depth10_model() {
  SfmModel model;
  model.cameras.emplace(1, pinhole_100());
  PosedImage image;
  image.image_id = 1;
  image.camera_id = 1;
  image.name = "cam.png";
  model.images.emplace(1, image);
  return model;
}

void add_tracked_point(SfmModel& model, std::int64_t pid,
                       const Eigen::Vector3d& p, std::int32_t image_id) {
  ScenePoint point;
  point.point3d_id = pid;
  point.position = p;
  PosedImage& image = model.images.at(image_id);
  const auto idx = static_cast<std::int32_t>(image.observations.size());
  image.observations.push_back({0.0, 0.0, pid});
  point.track.push_back({image_id, idx});
  model.points.emplace(pid, std::move(point));
}

}  // namespace

TEST_CASE("static_features: distance, projected area, keypoint count") {
  SfmModel model = depth10_model();
  const Aabb box{Eigen::Vector3d(-0.5, -0.5, 9.5),
                 Eigen::Vector3d(0.5, 0.5, 10.5)};
  add_tracked_point(model, 1, {0.0, 0.0, 10.0}, 1);
  add_tracked_point(model, 2, {0.2, -0.1, 9.8}, 1);
  add_tracked_point(model, 3, {-0.3, 0.3, 10.2}, 1);
  add_tracked_point(model, 4, {3.0, 0.0, 10.0}, 1);  // outside the box
  ScenePoint unobserved;                             // inside, not tracked
  unobserved.point3d_id = 5;
  unobserved.position = {0.1, 0.1, 10.1};
  model.points.emplace(5, unobserved);

  const StaticFeatures f = static_features(
      model, model.cameras.at(1), model.images.at(1), box);
  CHECK(f.distance == doctest::Approx(10.0));
  const double half = 100.0 * 0.5 / 9.5;
  CHECK(f.proj_area ==
        doctest::Approx(4.0 * half * half / 10000.0).epsilon(1e-9));
  CHECK(f.keypoint_count == 3.0);
}

TEST_CASE("static_rank: dominance and single candidate") {
  CandidateView a;
  a.image_id = 1;
  a.statics = {5.0, 0.25, 7.0};
  CandidateView b = a;
  b.image_id = 2;
  b.statics.distance = 10.0;  // identical except farther away
  SUBCASE("single candidate") {
    const std::vector<CandidateView> one{a};
    CHECK(static_rank(one) == std::vector<std::int32_t>{1});
  }
  SUBCASE("closer image wins") {
    const std::vector<CandidateView> two{a, b};
    CHECK(static_rank(two) == std::vector<std::int32_t>{1, 2});
  }
  SUBCASE("empty pool is an error") {
    CHECK_THROWS_AS(static_rank({}), DataError);
  }
}

TEST_CASE("static_rank: 8-candidate pool equals spreadsheet recomputation") {
  SplitMix64 rng(17);
  std::vector<CandidateView> pool;
  for (int i = 0; i < 8; ++i) {
    CandidateView c;
    c.image_id = 100 + i;
    c.statics = {rng.next_in(2.0, 20.0), rng.next_in(0.0, 0.4),
                 std::floor(rng.next_in(1.0, 50.0))};
    pool.push_back(c);
  }
  // Independent composite computation.
  auto field = [&](int which, const CandidateView& c) {
    return which == 0 ? c.statics.distance
                      : which == 1 ? c.statics.proj_area
                                   : c.statics.keypoint_count;
  };
  std::vector<std::pair<double, std::int32_t>> scored;
  for (const auto& c : pool) {
    double composite = 0.0;
    for (int which = 0; which < 3; ++which) {
      double lo = field(which, pool[0]), hi = lo;
      for (const auto& other : pool) {
        lo = std::min(lo, field(which, other));
        hi = std::max(hi, field(which, other));
      }
      double normed = hi > lo ? (field(which, c) - lo) / (hi - lo) : 0.5;
      if (which == 0) normed = 1.0 - normed;
      composite += normed;
    }
    scored.emplace_back(composite / 3.0, c.image_id);
  }
  std::sort(scored.begin(), scored.end(), [](const auto& x, const auto& y) {
    return x.first != y.first ? x.first > y.first : x.second < y.second;
  });
  std::vector<std::int32_t> expected;
  for (const auto& [s, id] : scored) expected.push_back(id);
  CHECK(static_rank(pool) == expected);
}

TEST_CASE("roi_score: hand-counted fixture") {
  SfmModel model = depth10_model();
  const Aabb box{Eigen::Vector3d(0, 0, 0), Eigen::Vector3d(1, 1, 1)};
  // 7 points in exactly 4 distinct cells of a 2x2x2 grid.
  const Eigen::Vector3d positions[7] = {
      {0.1, 0.1, 0.1}, {0.3, 0.2, 0.2},  // cell (0,0,0)
      {0.7, 0.1, 0.1}, {0.8, 0.2, 0.15},  // cell (1,0,0)
      {0.1, 0.7, 0.1}, {0.2, 0.8, 0.2},  // cell (0,1,0)
      {0.7, 0.7, 0.1},                   // cell (1,1,0)
  };
  std::vector<std::int64_t> ids;
  for (int i = 0; i < 7; ++i) {
    add_tracked_point(model, i + 1, positions[i], 1);
    ids.push_back(i + 1);
  }
  // 3 view directions hitting exactly 2 distinct bins.
  const std::vector<Eigen::Vector3d> dirs = {
      Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(0, 1, 0),
      Eigen::Vector3d(1, 0.001, 0).normalized()};
  const PoolNormalizers norm{10, 6, 4};
  const ScoreWeights weights{0.4, 0.4, 0.2};
  const RoiScore score = roi_score(model, ids, dirs, box, 2, weights, norm);
  CHECK(score.density == doctest::Approx(0.7));
  CHECK(score.occupancy == doctest::Approx(4.0 / 6.0));
  CHECK(score.angle_coverage == doctest::Approx(0.5));
  CHECK(score.total ==
        doctest::Approx(0.4 * 0.7 + 0.4 * (4.0 / 6.0) + 0.2 * 0.5));
  CHECK(score.total == doctest::Approx(0.6467).epsilon(1e-4));

  SUBCASE("empty selection scores zero") {
    const RoiScore empty = roi_score(model, {}, {}, box, 2, weights, norm);
    CHECK(empty.density == 0.0);
    CHECK(empty.occupancy == 0.0);
    CHECK(empty.angle_coverage == 0.0);
    CHECK(empty.total == 0.0);
  }
  SUBCASE("selection equal to the pool scores one") {
    const PoolNormalizers exact{7, 4, 2};
    const RoiScore full = roi_score(model, ids, dirs, box, 2, weights, exact);
    CHECK(full.density == 1.0);
    CHECK(full.occupancy == 1.0);
    CHECK(full.angle_coverage == 1.0);
    CHECK(full.total == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("zero normalizer is a degenerate ROI") {
    CHECK_THROWS_AS(
        roi_score(model, ids, dirs, box, 2, weights, PoolNormalizers{0, 6, 4}),
        DataError);
  }
}

TEST_CASE("gp: single training pair is reproduced at gain scale") {
  Eigen::MatrixXd x(1, 2);
  x << 0.3, -0.7;
  Eigen::VectorXd y(1);
  y << 0.2;
  const GpPosterior gp = GpPosterior::fit(x, y);
  const auto [mean, variance] = gp.predict(x.row(0).transpose());
  CHECK(std::abs(mean - 0.2) <= 3.0 * std::sqrt(gp.noise_variance()));
  CHECK(variance >= 0.0);
  CHECK(variance <= gp.noise_variance() + 1e-9);
}

TEST_CASE("gp: beats the mean predictor on a smooth function") {
  auto f = [](double t) { return std::sin(2.0 * t) + 0.5 * t; };
  std::vector<double> train_t, test_t;
  for (int i = 0; i < 20; ++i) {
    train_t.push_back(-1.5 + 3.0 * i / 19.0);
    test_t.push_back(-1.42 + 3.0 * i / 19.0);
  }
  Eigen::MatrixXd x(20, 1);
  Eigen::VectorXd y(20);
  for (int i = 0; i < 20; ++i) {
    x(i, 0) = train_t[static_cast<std::size_t>(i)];
    y(i) = f(train_t[static_cast<std::size_t>(i)]);
  }
  const GpPosterior gp = GpPosterior::fit(x, y);
  const double mean_target = y.mean();
  double gp_sq = 0.0, base_sq = 0.0;
  for (const double t : test_t) {
    Eigen::VectorXd q(1);
    q << t;
    const auto [mean, variance] = gp.predict(q);
    gp_sq += (mean - f(t)) * (mean - f(t));
    base_sq += (mean_target - f(t)) * (mean_target - f(t));
  }
  CHECK(std::sqrt(gp_sq / 20.0) < std::sqrt(base_sq / 20.0));
}

TEST_CASE("gp: duplicate inputs with conflicting targets still factorize") {
  Eigen::MatrixXd x(2, 1);
  x << 0.5, 0.5;
  Eigen::VectorXd y(2);
  y << 0.2, 0.4;
  const GpPosterior gp = GpPosterior::fit(x, y);
  const auto [mean, variance] = gp.predict(x.row(0).transpose());
  CHECK(mean > 0.2);
  CHECK(mean < 0.4);
  CHECK(mean == doctest::Approx(0.3).epsilon(0.01));
}

TEST_CASE("gp: prior reversion far from the data") {
  Eigen::MatrixXd x(3, 2);
  x << 0.0, 0.0, 1.0, -1.0, -0.5, 0.5;
  Eigen::VectorXd y(3);
  y << 0.3, -0.1, 0.2;
  const GpPosterior gp = GpPosterior::fit(x, y);
  Eigen::VectorXd far(2);
  far << 15.0, -12.0;
  const auto [mean, variance] = gp.predict(far);
  CHECK(std::abs(mean) < 1e-6);
  CHECK(variance == doctest::Approx(gp.signal_variance()).epsilon(1e-6));
}

TEST_CASE("gp: symmetric pair predicts zero at the midpoint") {
  Eigen::MatrixXd x(2, 1);
  x << -0.8, 0.8;
  Eigen::VectorXd y(2);
  y << -0.25, 0.25;
  const GpPosterior gp = GpPosterior::fit(x, y);
  Eigen::VectorXd mid(1);
  mid << 0.0;
  const auto [mean, variance] = gp.predict(mid);
  CHECK(std::abs(mean) < 1e-9);
  CHECK(variance >= 0.0);
}

TEST_CASE("gp: training-input variance bound and clamp counter") {
  SplitMix64 rng(31);
  Eigen::MatrixXd x(12, 3);
  Eigen::VectorXd y(12);
  for (int i = 0; i < 12; ++i) {
    for (int d = 0; d < 3; ++d) x(i, d) = rng.next_in(-2, 2);
    y(i) = rng.next_in(-0.5, 0.5);
  }
  const GpPosterior gp = GpPosterior::fit(x, y);
  for (int i = 0; i < 12; ++i) {
    const auto [mean, variance] = gp.predict(x.row(i).transpose());
    CHECK(variance >= 0.0);
    CHECK(variance <= gp.noise_variance() + 1e-9);
    CHECK(std::abs(mean - y(i)) <= 3.0 * std::sqrt(gp.noise_variance()));
  }
  for (int i = 0; i < 50; ++i) {
    Eigen::VectorXd q(3);
    for (int d = 0; d < 3; ++d) q(d) = rng.next_in(-3, 3);
    CHECK(gp.predict(q).second >= 0.0);
  }
  CHECK(gp.variance_clamp_count() == 0);  // well-conditioned fixture
}

TEST_CASE("gp: dimension mismatch is rejected") {
  Eigen::MatrixXd x(2, 6);
  x.setRandom();
  Eigen::VectorXd y(2);
  y << 0.1, 0.2;
  const GpPosterior gp = GpPosterior::fit(x, y);
  Eigen::VectorXd wrong(9);
  wrong.setZero();
  CHECK_THROWS_AS(gp.predict(wrong), DataError);
}

TEST_CASE("greedy_select: exhausting the pool reaches total 1.0") {
  SceneRecipe recipe;
  recipe.seed = 41;
  recipe.points_in_roi = 50;
  recipe.points_background = 30;
  recipe.cameras = 9;
  recipe.dropout = 0.25;
  const SyntheticScene scene = generate(recipe);
  const auto vis = roi_visibility(scene.model, recipe.box);
  std::vector<std::int32_t> candidates;
  for (const auto& [id, ids] : vis) candidates.push_back(id);
  REQUIRE(candidates.size() == 9);

  RoiSpec roi;
  roi.roi_id = "obj";
  roi.box = recipe.box;
  roi.select_count = 9;
  const SelectionResult result = greedy_select(scene.model, roi, candidates);
  REQUIRE(result.ordered_ids.size() == candidates.size());
  CHECK_FALSE(result.pool_exhausted);

  std::vector<std::int32_t> sorted = result.ordered_ids;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == candidates);  // permutation of the pool
  CHECK(result.trace.back().cumulative.total ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(result.trace.back().cumulative.density == 1.0);
}

TEST_CASE("greedy_select: matches the brute-force greedy oracle") {
  for (std::uint64_t seed : {301u, 302u, 303u, 304u, 305u}) {
    SceneRecipe recipe;
    recipe.seed = seed;
    recipe.points_in_roi = 30;
    recipe.points_background = 20;
    recipe.cameras = 8;
    recipe.dropout = 0.3;
    recipe.max_view_angle_deg = 100.0;
    const SyntheticScene scene = generate(recipe);
    const auto vis = roi_visibility(scene.model, recipe.box);
    std::vector<std::int32_t> candidates;
    for (const auto& [id, ids] : vis) candidates.push_back(id);
    REQUIRE(candidates.size() >= 4);

    RoiSpec roi;
    roi.roi_id = "obj";
    roi.box = recipe.box;
    roi.select_count = 5;
    roi.voxel_grid = 4;
    SelectionOptions options;
    options.beta = 0.0;
    options.exact_gain_acquisition = true;
    const SelectionResult result =
        greedy_select(scene.model, roi, candidates, options);

    const testing::OracleContext oracle =
        testing::OracleContext::build(scene.model, roi, candidates);
    const auto expected = oracle.greedy(5);
    CHECK(result.ordered_ids == expected);
  }
}

TEST_CASE("greedy_select: trace scores are recomputable and monotone") {
  SceneRecipe recipe;
  recipe.seed = 77;
  recipe.points_in_roi = 60;
  recipe.points_background = 20;
  recipe.cameras = 14;
  recipe.dropout = 0.2;
  const SyntheticScene scene = generate(recipe);
  const auto vis = roi_visibility(scene.model, recipe.box);
  std::vector<std::int32_t> candidates;
  for (const auto& [id, ids] : vis) candidates.push_back(id);

  RoiSpec roi;
  roi.roi_id = "obj";
  roi.box = recipe.box;
  roi.select_count = 10;
  roi.voxel_grid = 8;
  const SelectionResult result = greedy_select(scene.model, roi, candidates);

  const SelectionProblem problem =
      build_selection_problem(scene.model, roi, candidates);
  RoiScore previous;
  std::vector<std::int64_t> selected_points;
  std::vector<Eigen::Vector3d> selected_dirs;
  for (const auto& step : result.trace) {
    // Monotone in every component.
    CHECK(step.cumulative.density >= previous.density);
    CHECK(step.cumulative.occupancy >= previous.occupancy);
    CHECK(step.cumulative.angle_coverage >= previous.angle_coverage);
    CHECK(step.cumulative.total >= previous.total);
    CHECK(step.realized_gain ==
          doctest::Approx(step.cumulative.total - previous.total)
              .epsilon(1e-12));
    previous = step.cumulative;

    // Recomputable from the selected-set state via the free function.
    const PosedImage& image = scene.model.images.at(step.image_id);
    for (const auto& obs : image.observations) {
      if (obs.point3d_id) selected_points.push_back(*obs.point3d_id);
    }
    selected_dirs.push_back(
        (image.camera_center() - roi.box.center()).normalized());
    const RoiScore recomputed = roi_score(
        scene.model, selected_points, selected_dirs, roi.box, roi.voxel_grid,
        {roi.w_density, roi.w_occupancy, roi.w_angle}, problem.normalizers);
    CHECK(recomputed.density == doctest::Approx(step.cumulative.density));
    CHECK(recomputed.occupancy == doctest::Approx(step.cumulative.occupancy));
    CHECK(recomputed.angle_coverage ==
          doctest::Approx(step.cumulative.angle_coverage));
    CHECK(recomputed.total == doctest::Approx(step.cumulative.total));
  }
}

TEST_CASE("greedy_select: deterministic across runs and thread counts") {
  SceneRecipe recipe;
  recipe.seed = 55;
  recipe.points_in_roi = 40;
  recipe.points_background = 30;
  recipe.cameras = 12;
  recipe.dropout = 0.3;
  const SyntheticScene scene = generate(recipe);
  const auto vis = roi_visibility(scene.model, recipe.box);
  std::vector<std::int32_t> candidates;
  for (const auto& [id, ids] : vis) candidates.push_back(id);

  RoiSpec roi;
  roi.roi_id = "obj";
  roi.box = recipe.box;
  roi.select_count = 8;
  SelectionOptions serial;
  serial.threads = 1;
  SelectionOptions parallel;
  parallel.threads = 4;
  const SelectionResult a = greedy_select(scene.model, roi, candidates, serial);
  const SelectionResult b = greedy_select(scene.model, roi, candidates, serial);
  const SelectionResult c =
      greedy_select(scene.model, roi, candidates, parallel);
  CHECK(a.ordered_ids == b.ordered_ids);
  CHECK(a.ordered_ids == c.ordered_ids);
  CHECK(selection_trace_csv(a) == selection_trace_csv(b));
  CHECK(selection_trace_csv(a) == selection_trace_csv(c));
}

TEST_CASE("greedy_select: error paths") {
  SceneRecipe recipe;
  recipe.seed = 3;
  recipe.points_in_roi = 10;
  recipe.cameras = 4;
  const SyntheticScene scene = generate(recipe);
  RoiSpec roi;
  roi.roi_id = "obj";
  roi.box = recipe.box;
  SUBCASE("empty candidate pool") {
    CHECK_THROWS_AS(greedy_select(scene.model, roi, {}), DataError);
  }
  SUBCASE("degenerate ROI with no observed in-box points") {
    RoiSpec empty_roi = roi;
    empty_roi.box = Aabb{Eigen::Vector3d(50, 50, 50),
                         Eigen::Vector3d(51, 51, 51)};
    const std::vector<std::int32_t> candidates{1, 2};
    CHECK_THROWS_AS(greedy_select(scene.model, empty_roi, candidates),
                    DataError);
  }
}

TEST_CASE("select_first_k: prefixes preserve order") {
  SelectionResult result;
  result.ordered_ids = {9, 4, 7, 1};
  CHECK(select_first_k(result, 0).empty());
  CHECK(select_first_k(result, 4) == result.ordered_ids);
  CHECK(select_first_k(result, 2) == std::vector<std::int32_t>{9, 4});
  CHECK_THROWS_AS(select_first_k(result, 5), DataError);
}

TEST_CASE("RoiSpec: invariant checks") {
  RoiSpec roi;
  roi.roi_id = "x";
  roi.box = Aabb{Eigen::Vector3d(0, 0, 0), Eigen::Vector3d(1, 1, 1)};
  roi.check();
  SUBCASE("bad weights") {
    roi.w_density = 0.5;
    roi.w_occupancy = 0.5;
    roi.w_angle = 0.5;
    CHECK_THROWS_AS(roi.check(), DataError);
  }
  SUBCASE("bad grid") {
    roi.voxel_grid = 1;
    CHECK_THROWS_AS(roi.check(), DataError);
  }
  SUBCASE("bad count") {
    roi.select_count = 0;
    CHECK_THROWS_AS(roi.check(), DataError);
  }
  SUBCASE("inverted box") {
    roi.box = Aabb{Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(0, 1, 1)};
    CHECK_THROWS_AS(roi.check(), DataError);
  }
}
