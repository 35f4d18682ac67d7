#include <doctest.h>

#include "roigs/pipeline_config.hpp"

using namespace roigs;

namespace {

const char* kGoodConfig =
    "model.path: data/sparse\n"
    "model.format: binary\n"
    "output.dir: out\n"
    "seed: 7\n"
    "partition.test_fraction: 0.0626865671641791\n"
    "partition.retain_ratio: 0.5\n"
    "selection.mode: gp9\n"
    "selection.beta: 1.0\n"
    "roi.coffret.min_x: -1\n"
    "roi.coffret.min_y: -1\n"
    "roi.coffret.min_z: -1\n"
    "roi.coffret.max_x: 1\n"
    "roi.coffret.max_y: 1\n"
    "roi.coffret.max_z: 1\n"
    "roi.coffret.select_count: 150\n"
    "roi.coffret.voxel_grid: 16\n"
    "roi.statue.min_x: 3\n"
    "roi.statue.min_y: 3\n"
    "roi.statue.min_z: 3\n"
    "roi.statue.max_x: 4\n"
    "roi.statue.max_y: 4\n"
    "roi.statue.max_z: 4\n"
    "roi.statue.select_count: 20\n"
    "roi.statue.w_density: 0.5\n"
    "roi.statue.w_occupancy: 0.3\n"
    "roi.statue.w_angle: 0.2\n"
    "roi.statue.seed: 13\n";

}  // namespace

TEST_CASE("config: full round of keys") {
  const PipelineConfig config = parse_pipeline_config(kGoodConfig);
  CHECK(config.model_path == "data/sparse");
  CHECK(config.model_format == SfmFormat::kBinary);
  CHECK(config.seed == 7);
  CHECK(config.test_fraction == doctest::Approx(21.0 / 335.0));
  CHECK(config.selection_mode == SelectionMode::kGp9);
  REQUIRE(config.rois.size() == 2);
  CHECK(config.rois[0].roi_id == "coffret");
  CHECK(config.rois[0].select_count == 150);
  CHECK(config.rois[0].seed == 7);  // inherits the global seed
  CHECK(config.rois[1].roi_id == "statue");
  CHECK(config.rois[1].w_density == 0.5);
  CHECK(config.rois[1].seed == 13);  // keeps its own
  CHECK(config.rois[1].box.min == Eigen::Vector3d(3, 3, 3));
}

TEST_CASE("config: defaults match the paper protocol") {
  const PipelineConfig config = parse_pipeline_config(
      "model.path: m\n"
      "output.dir: o\n"
      "roi.x.min_x: 0\nroi.x.min_y: 0\nroi.x.min_z: 0\n"
      "roi.x.max_x: 1\nroi.x.max_y: 1\nroi.x.max_z: 1\n");
  CHECK(config.test_fraction == doctest::Approx(21.0 / 335.0));
  CHECK(config.retain_ratio == 0.5);
  CHECK(config.selection_mode == SelectionMode::kGp9);
  CHECK(config.beta == 1.0);
  REQUIRE(config.rois.size() == 1);
  CHECK(config.rois[0].select_count == 150);
  CHECK(config.rois[0].voxel_grid == 16);
  CHECK(config.rois[0].w_density == 0.4);
  CHECK(config.rois[0].w_occupancy == 0.4);
  CHECK(config.rois[0].w_angle == 0.2);
}

TEST_CASE("config: rejects bad input") {
  SUBCASE("unknown key") {
    CHECK_THROWS_AS(parse_pipeline_config("model.path: m\nbogus.key: 1\n"),
                    ParseError);
  }
  SUBCASE("missing model path") {
    CHECK_THROWS_AS(parse_pipeline_config("output.dir: o\n"), DataError);
  }
  SUBCASE("identical model and output paths") {
    CHECK_THROWS_AS(
        parse_pipeline_config("model.path: same\noutput.dir: same\n"),
        DataError);
  }
  SUBCASE("invalid roi box") {
    CHECK_THROWS_AS(parse_pipeline_config(
                        "model.path: m\noutput.dir: o\n"
                        "roi.x.min_x: 2\nroi.x.min_y: 0\nroi.x.min_z: 0\n"
                        "roi.x.max_x: 1\nroi.x.max_y: 1\nroi.x.max_z: 1\n"),
                    DataError);
  }
  SUBCASE("weights not summing to one") {
    CHECK_THROWS_AS(parse_pipeline_config(
                        "model.path: m\noutput.dir: o\n"
                        "roi.x.min_x: 0\nroi.x.min_y: 0\nroi.x.min_z: 0\n"
                        "roi.x.max_x: 1\nroi.x.max_y: 1\nroi.x.max_z: 1\n"
                        "roi.x.w_density: 0.9\n"),
                    DataError);
  }
  SUBCASE("bad selection mode") {
    CHECK_THROWS_AS(
        parse_pipeline_config("model.path: m\nselection.mode: fancy\n"),
        UsageError);
  }
  SUBCASE("malformed kv line") {
    CHECK_THROWS_AS(parse_pipeline_config("model.path\n"), ParseError);
  }
}
