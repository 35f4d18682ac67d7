#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "roigs/pipeline_config.hpp"

namespace roigs {

struct RunOptions {
  int threads = 1;
  std::optional<std::uint64_t> seed_override;
  std::optional<std::filesystem::path> out_override;
  std::optional<SelectionMode> mode_override;
};

/// Per-ROI candidate pools. Each ROI holds out its own test share; the
/// global test set is the union, and every pool excludes the whole union so
/// selections can never touch a test image of another ROI.
struct RoiPool {
  RoiSpec spec;                        // seed/mode already resolved
  std::vector<std::int32_t> visible;   // ascending
  std::vector<std::int32_t> test;      // this ROI's hold-out
  std::vector<std::int32_t> candidates;
  std::int64_t in_box_points = 0;
};

struct PipelinePools {
  std::vector<RoiPool> rois;
  std::vector<std::int32_t> global_test;  // ascending union
};

PipelinePools compute_pools(const SfmModel& model, const PipelineConfig& config,
                            const RunOptions& options);

/// Subcommand entry points; each writes its outputs atomically under the
/// output directory and logs progress lines to `log`.
void cmd_inspect(const PipelineConfig& config, const RunOptions& options,
                 std::ostream& log);
void cmd_select(const PipelineConfig& config, const RunOptions& options,
                std::ostream& log);
void cmd_partition(const PipelineConfig& config, const RunOptions& options,
                   std::ostream& log);

struct ComposeInput {
  std::filesystem::path scene_ply;
  std::vector<std::pair<std::string, std::filesystem::path>> object_plys;
  bool allow_overlap = false;
};
void cmd_compose(const PipelineConfig& config, const ComposeInput& input,
                 const RunOptions& options, std::ostream& log);

void cmd_evaluate(const PipelineConfig& config,
                  const std::filesystem::path& rendered_dir,
                  const std::filesystem::path& truth_dir,
                  const RunOptions& options, std::ostream& log);

void cmd_synth(const std::filesystem::path& recipe_path,
               const std::filesystem::path& out_dir,
               std::optional<std::uint64_t> seed_override, std::ostream& log);

/// File naming shared by select/partition/evaluate outputs.
std::string selection_list_name(const std::string& roi_id);
std::string selection_trace_name(const std::string& roi_id);
std::string object_list_name(const std::string& roi_id);
std::string retained_list_name(const std::string& roi_id);
std::string evaluation_csv_name(const std::string& roi_id);
std::string object_manifest_name(const std::string& roi_id);

}  // namespace roigs
