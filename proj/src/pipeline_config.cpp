#include "roigs/pipeline_config.hpp"

#include <set>

#include "roigs/kv_file.hpp"

namespace roigs {

SelectionMode selection_mode_from_name(std::string_view name) {
  if (name == "static") return SelectionMode::kStatic;
  if (name == "gp6") return SelectionMode::kGp6;
  if (name == "gp9") return SelectionMode::kGp9;
  throw UsageError("unknown selection mode \"" + std::string(name) +
                   "\" (expected static, gp6 or gp9)");
}

std::string_view selection_mode_name(SelectionMode mode) {
  switch (mode) {
    case SelectionMode::kStatic:
      return "static";
    case SelectionMode::kGp6:
      return "gp6";
    case SelectionMode::kGp9:
      return "gp9";
  }
  return "?";
}

void PipelineConfig::check() const {
  if (model_path.empty()) throw DataError("config: model.path is required");
  if (output_dir.empty()) throw DataError("config: output.dir is required");
  if (model_path == output_dir) {
    throw DataError("config: model.path and output.dir must be distinct");
  }
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw DataError("config: partition.test_fraction must lie in (0, 1)");
  }
  if (retain_ratio < 0.0 || retain_ratio > 1.0) {
    throw DataError("config: partition.retain_ratio must lie in [0, 1]");
  }
  std::set<std::string> ids;
  for (const auto& roi : rois) {
    roi.check();
    if (!ids.insert(roi.roi_id).second) {
      throw DataError("config: duplicate roi id \"" + roi.roi_id + "\"");
    }
  }
}

PipelineConfig parse_pipeline_config(std::string_view text) {
  const KvFile kv = KvFile::parse(text);
  PipelineConfig config;

  // ROI sections keep declaration order of first appearance.
  std::vector<std::string> roi_order;
  auto roi_of = [&](const std::string& id) -> RoiSpec& {
    for (std::size_t i = 0; i < roi_order.size(); ++i) {
      if (roi_order[i] == id) return config.rois[i];
    }
    roi_order.push_back(id);
    RoiSpec spec;
    spec.roi_id = id;
    spec.seed = config.seed;
    config.rois.push_back(std::move(spec));
    return config.rois.back();
  };

  bool seed_set = false;
  for (const auto& [key, value] : kv.entries()) {
    if (key == "model.path") {
      config.model_path = value;
    } else if (key == "model.format") {
      if (value == "binary") {
        config.model_format = SfmFormat::kBinary;
      } else if (value == "text") {
        config.model_format = SfmFormat::kText;
      } else {
        throw ParseError("config: model.format must be binary or text");
      }
    } else if (key == "output.dir") {
      config.output_dir = value;
    } else if (key == "partition.test_fraction") {
      config.test_fraction = *kv.get_real(key);
    } else if (key == "partition.retain_ratio") {
      config.retain_ratio = *kv.get_real(key);
    } else if (key == "selection.mode") {
      config.selection_mode = selection_mode_from_name(value);
    } else if (key == "selection.beta") {
      config.beta = *kv.get_real(key);
    } else if (key == "seed") {
      config.seed = static_cast<std::uint64_t>(*kv.get_int(key));
      seed_set = true;
    } else if (key.rfind("roi.", 0) == 0) {
      const std::size_t id_end = key.find('.', 4);
      if (id_end == std::string::npos || id_end == 4) {
        throw ParseError("config: malformed roi key \"" + key + "\"");
      }
      RoiSpec& roi = roi_of(key.substr(4, id_end - 4));
      const std::string field = key.substr(id_end + 1);
      if (field == "min_x") {
        roi.box.min.x() = *kv.get_real(key);
      } else if (field == "min_y") {
        roi.box.min.y() = *kv.get_real(key);
      } else if (field == "min_z") {
        roi.box.min.z() = *kv.get_real(key);
      } else if (field == "max_x") {
        roi.box.max.x() = *kv.get_real(key);
      } else if (field == "max_y") {
        roi.box.max.y() = *kv.get_real(key);
      } else if (field == "max_z") {
        roi.box.max.z() = *kv.get_real(key);
      } else if (field == "select_count") {
        roi.select_count = static_cast<int>(*kv.get_int(key));
      } else if (field == "feature_mode") {
        if (value == "six") {
          roi.feature_mode = FeatureMode::kSix;
        } else if (value == "nine") {
          roi.feature_mode = FeatureMode::kNine;
        } else {
          throw ParseError("config: feature_mode must be six or nine");
        }
      } else if (field == "voxel_grid") {
        roi.voxel_grid = static_cast<int>(*kv.get_int(key));
      } else if (field == "w_density") {
        roi.w_density = *kv.get_real(key);
      } else if (field == "w_occupancy") {
        roi.w_occupancy = *kv.get_real(key);
      } else if (field == "w_angle") {
        roi.w_angle = *kv.get_real(key);
      } else if (field == "seed") {
        roi.seed = static_cast<std::uint64_t>(*kv.get_int(key));
      } else {
        throw ParseError("config: unknown roi field \"" + field + "\"");
      }
    } else {
      throw ParseError("config: unknown key \"" + key + "\"");
    }
  }
  // A global seed declared after roi sections still applies to ROIs that did
  // not set their own.
  if (seed_set) {
    const KvFile kv2 = KvFile::parse(text);
    for (auto& roi : config.rois) {
      if (!kv2.has("roi." + roi.roi_id + ".seed")) roi.seed = config.seed;
    }
  }
  config.check();
  return config;
}

PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
  try {
    return parse_pipeline_config(read_file(path));
  } catch (const Error& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

}  // namespace roigs
