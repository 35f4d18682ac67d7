#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "roigs/colmap_io.hpp"
#include "roigs/selection.hpp"

namespace roigs {

enum class SelectionMode { kStatic, kGp6, kGp9 };

SelectionMode selection_mode_from_name(std::string_view name);
std::string_view selection_mode_name(SelectionMode mode);

/// Declarative pipeline configuration, parsed from flat `section.key: value`
/// lines (see README for the key set).
struct PipelineConfig {
  std::filesystem::path model_path;
  SfmFormat model_format = SfmFormat::kBinary;
  std::filesystem::path output_dir = "out";
  double test_fraction = 21.0 / 335.0;
  double retain_ratio = 0.5;
  SelectionMode selection_mode = SelectionMode::kGp9;
  double beta = 1.0;
  std::uint64_t seed = 0;
  std::vector<RoiSpec> rois;  // declaration order preserved

  void check() const;  // throws DataError on invariant violations
};

PipelineConfig parse_pipeline_config(std::string_view text);
PipelineConfig load_pipeline_config(const std::filesystem::path& path);

}  // namespace roigs
