#include "roigs/pipeline.hpp"

#include <algorithm>
#include <ostream>
#include <set>

#include "roigs/composition.hpp"
#include "roigs/evaluation.hpp"
#include "roigs/kv_file.hpp"
#include "roigs/partition.hpp"
#include "roigs/png_io.hpp"
#include "roigs/synthetic.hpp"

namespace roigs {

namespace {

PipelineConfig effective_config(PipelineConfig config,
                                const RunOptions& options) {
  if (options.out_override) config.output_dir = *options.out_override;
  if (options.seed_override) {
    config.seed = *options.seed_override;
    for (auto& roi : config.rois) roi.seed = *options.seed_override;
  }
  if (options.mode_override) config.selection_mode = *options.mode_override;
  // The selection mode forces the GP feature width; `static` leaves the
  // per-ROI setting untouched (it does not consult the GP at all).
  for (auto& roi : config.rois) {
    if (config.selection_mode == SelectionMode::kGp6) {
      roi.feature_mode = FeatureMode::kSix;
    } else if (config.selection_mode == SelectionMode::kGp9) {
      roi.feature_mode = FeatureMode::kNine;
    }
  }
  config.check();
  return config;
}

SfmModel load_configured_model(const PipelineConfig& config) {
  return load_model(config.model_path, config.model_format);
}

std::filesystem::path ensure_output_dir(const PipelineConfig& config) {
  std::filesystem::create_directories(config.output_dir);
  return config.output_dir;
}

/// Deterministic greedy selection for the requested mode. Static mode ranks
/// once and realizes the ranked prefix so its trace stays comparable.
SelectionResult run_selection(const SfmModel& model, const RoiSpec& roi,
                              const std::vector<std::int32_t>& candidates,
                              SelectionMode mode, double beta, int threads) {
  if (mode == SelectionMode::kStatic) {
    const SelectionProblem problem =
        build_selection_problem(model, roi, candidates, threads);
    const auto ranked = static_rank(problem.candidates);
    std::map<std::int32_t, std::size_t> index_of_id;
    for (std::size_t i = 0; i < problem.candidates.size(); ++i) {
      index_of_id.emplace(problem.candidates[i].image_id, i);
    }
    SelectionResult result;
    const std::size_t steps =
        std::min(static_cast<std::size_t>(roi.select_count), ranked.size());
    result.pool_exhausted =
        static_cast<std::size_t>(roi.select_count) > ranked.size();
    CoverageState state(problem);
    for (std::size_t step = 0; step < steps; ++step) {
      const std::int32_t id = ranked[step];
      const double realized = state.add_candidate(index_of_id.at(id));
      result.ordered_ids.push_back(id);
      result.trace.push_back(
          {static_cast<int>(step) + 1, id, 0.0, realized, state.score()});
    }
    return result;
  }
  SelectionOptions options;
  options.beta = beta;
  options.threads = threads;
  return greedy_select(model, roi, candidates, options);
}

}  // namespace

std::string selection_list_name(const std::string& roi_id) {
  return "selection_" + sanitize_file_token(roi_id) + ".txt";
}
std::string selection_trace_name(const std::string& roi_id) {
  return "selection_" + sanitize_file_token(roi_id) + "_trace.csv";
}
std::string object_list_name(const std::string& roi_id) {
  return "object_train_" + sanitize_file_token(roi_id) + ".txt";
}
std::string retained_list_name(const std::string& roi_id) {
  return "retained_" + sanitize_file_token(roi_id) + ".txt";
}
std::string evaluation_csv_name(const std::string& roi_id) {
  return "evaluation_" + sanitize_file_token(roi_id) + ".csv";
}
std::string object_manifest_name(const std::string& roi_id) {
  return "manifest_object_" + sanitize_file_token(roi_id) + ".txt";
}

PipelinePools compute_pools(const SfmModel& model, const PipelineConfig& config,
                            const RunOptions& options) {
  PipelinePools pools;
  std::set<std::int32_t> test_union;
  for (const auto& spec : config.rois) {
    RoiPool pool;
    pool.spec = spec;
    const auto vis = roi_visibility(model, spec.box, options.threads);
    pool.visible.reserve(vis.size());
    for (const auto& [id, ids] : vis) pool.visible.push_back(id);
    for (const auto& [id, point] : model.points) {
      if (point_in_aabb(point.position, spec.box)) ++pool.in_box_points;
    }
    if (!pool.visible.empty()) {
      auto [test, remaining] = hold_out_test(pool.visible,
                                             config.test_fraction);
      pool.test = std::move(test);
      test_union.insert(pool.test.begin(), pool.test.end());
    }
    pools.rois.push_back(std::move(pool));
  }
  pools.global_test.assign(test_union.begin(), test_union.end());
  for (auto& pool : pools.rois) {
    for (const std::int32_t id : pool.visible) {
      if (test_union.find(id) == test_union.end()) {
        pool.candidates.push_back(id);
      }
    }
  }
  return pools;
}

void cmd_inspect(const PipelineConfig& raw_config, const RunOptions& options,
                 std::ostream& log) {
  const PipelineConfig config = effective_config(raw_config, options);
  const SfmModel model = load_configured_model(config);
  const PipelinePools pools = compute_pools(model, config, options);

  KvFile report;
  report.add_int("cameras", static_cast<std::int64_t>(model.cameras.size()));
  report.add_int("images", static_cast<std::int64_t>(model.images.size()));
  report.add_int("points", static_cast<std::int64_t>(model.points.size()));
  std::vector<std::string> warnings;
  for (const auto& pool : pools.rois) {
    const std::string prefix = "roi." + pool.spec.roi_id + ".";
    report.add_int(prefix + "visible_images",
                   static_cast<std::int64_t>(pool.visible.size()));
    report.add_int(prefix + "in_box_points", pool.in_box_points);
    report.add_int(prefix + "test_images",
                   static_cast<std::int64_t>(pool.test.size()));
    report.add_int(prefix + "candidates",
                   static_cast<std::int64_t>(pool.candidates.size()));
    if (pool.visible.empty()) {
      warnings.push_back("warning: roi " + pool.spec.roi_id +
                         " has no visible images");
    }
  }
  std::string text = report.text();
  for (const auto& w : warnings) text += w + "\n";

  const auto out = ensure_output_dir(config);
  write_file_atomic(out / "inspect_report.txt", text);
  log << text;
}

void cmd_select(const PipelineConfig& raw_config, const RunOptions& options,
                std::ostream& log) {
  const PipelineConfig config = effective_config(raw_config, options);
  if (config.rois.empty()) throw DataError("config declares no ROIs");
  const SfmModel model = load_configured_model(config);
  const PipelinePools pools = compute_pools(model, config, options);
  const auto out = ensure_output_dir(config);

  for (const auto& pool : pools.rois) {
    if (pool.candidates.empty()) {
      throw DataError("roi " + pool.spec.roi_id +
                      ": no candidates after the test hold-out");
    }
    const SelectionResult result =
        run_selection(model, pool.spec, pool.candidates, config.selection_mode,
                      config.beta, options.threads);
    write_file_atomic(out / selection_list_name(pool.spec.roi_id),
                      selection_list_text(model, result));
    write_file_atomic(out / selection_trace_name(pool.spec.roi_id),
                      selection_trace_csv(result));
    log << "roi " << pool.spec.roi_id << ": selected "
        << result.ordered_ids.size() << " of " << pool.candidates.size()
        << " candidates (" << selection_mode_name(config.selection_mode)
        << ")\n";
  }
}

void cmd_partition(const PipelineConfig& raw_config, const RunOptions& options,
                   std::ostream& log) {
  const PipelineConfig config = effective_config(raw_config, options);
  const SfmModel model = load_configured_model(config);
  const PipelinePools pools = compute_pools(model, config, options);
  const auto out = ensure_output_dir(config);

  std::map<std::string, std::int32_t> id_of_name;
  std::vector<std::int32_t> all_ids;
  for (const auto& [id, image] : model.images) {
    all_ids.push_back(id);
    if (!id_of_name.emplace(image.name, id).second) {
      throw DataError("duplicate image name \"" + image.name +
                      "\"; name-based selection lists are ambiguous");
    }
  }

  // Selections come from the files cmd_select wrote.
  std::vector<RoiSelection> selections;
  for (const auto& pool : pools.rois) {
    const auto path = out / selection_list_name(pool.spec.roi_id);
    if (!std::filesystem::exists(path)) {
      throw DataError("missing selection list " + path.string() +
                      " (run `select` first)");
    }
    RoiSelection selection;
    selection.roi_id = pool.spec.roi_id;
    const std::string text = read_file(path);
    std::size_t pos = 0;
    while (pos < text.size()) {
      const std::size_t nl = text.find('\n', pos);
      const std::string name =
          text.substr(pos, nl == std::string::npos ? text.size() - pos
                                                   : nl - pos);
      pos = nl == std::string::npos ? text.size() : nl + 1;
      if (name.empty()) continue;
      const auto it = id_of_name.find(name);
      if (it == id_of_name.end()) {
        throw DataError("selection list " + path.string() +
                        " names unknown image \"" + name + "\"");
      }
      selection.ordered_ids.push_back(it->second);
    }
    selections.push_back(std::move(selection));
  }

  const PartitionPlan plan = build_partition(all_ids, pools.global_test,
                                             selections, config.retain_ratio);

  write_file_atomic(out / "test_images.txt",
                    image_list_text(model, plan.test_ids));
  write_file_atomic(out / "scene_train_images.txt",
                    image_list_text(model, plan.scene_train_ids));
  std::map<std::string, std::string> object_files;
  std::vector<RoiSpecLite> boxes;
  for (const auto& part : plan.rois) {
    const auto spec_it =
        std::find_if(config.rois.begin(), config.rois.end(),
                     [&](const RoiSpec& r) { return r.roi_id == part.roi_id; });
    boxes.push_back({part.roi_id, spec_it->box});
    const std::string file = object_list_name(part.roi_id);
    object_files.emplace(part.roi_id, file);
    write_file_atomic(out / file,
                      image_list_text(model, part.object_train_ids));
    write_file_atomic(out / retained_list_name(part.roi_id),
                      image_list_text(model, part.retained_ids));
  }
  const auto manifests = emit_manifests(plan, boxes, "scene_train_images.txt",
                                        object_files);
  for (const auto& manifest : manifests) {
    const std::string name = manifest.model_role == ModelRole::kScene
                                 ? std::string("manifest_scene.txt")
                                 : object_manifest_name(manifest.roi_id);
    write_file_atomic(out / name, manifest_text(manifest));
  }
  log << "partition: " << plan.test_ids.size() << " test, "
      << plan.scene_train_ids.size() << " scene-train images, "
      << plan.rois.size() << " object set(s), " << manifests.size()
      << " manifest(s)\n";
}

void cmd_compose(const PipelineConfig& raw_config, const ComposeInput& input,
                 const RunOptions& options, std::ostream& log) {
  const PipelineConfig config = effective_config(raw_config, options);
  const SplatSet scene = load_splats(input.scene_ply);

  std::vector<SplatSet> object_sets;
  object_sets.reserve(input.object_plys.size());
  std::vector<ObjectSplats> objects;
  for (const auto& [roi_id, path] : input.object_plys) {
    const auto spec_it =
        std::find_if(config.rois.begin(), config.rois.end(),
                     [&](const RoiSpec& r) { return r.roi_id == roi_id; });
    if (spec_it == config.rois.end()) {
      throw UsageError("--object names unknown roi \"" + roi_id + "\"");
    }
    object_sets.push_back(load_splats(path));
    objects.push_back({roi_id, nullptr, spec_it->box});
  }
  for (std::size_t i = 0; i < objects.size(); ++i) {
    objects[i].splats = &object_sets[i];
  }

  const auto [merged, report] =
      compose(scene, objects,
              input.allow_overlap ? OverlapPolicy::kFirstWins
                                  : OverlapPolicy::kReject);
  const auto out = ensure_output_dir(config);
  save_splats(merged, out / "merged.ply");
  write_file_atomic(out / "composition_report.txt",
                    composition_report_text(report));
  log << composition_report_text(report);
}

void cmd_evaluate(const PipelineConfig& raw_config,
                  const std::filesystem::path& rendered_dir,
                  const std::filesystem::path& truth_dir,
                  const RunOptions& options, std::ostream& log) {
  const PipelineConfig config = effective_config(raw_config, options);
  const SfmModel model = load_configured_model(config);
  const PipelinePools pools = compute_pools(model, config, options);
  const auto out = ensure_output_dir(config);

  KvFile summary;
  for (const auto& pool : pools.rois) {
    std::string csv = "image,psnr_db,ssim,masked_pixel_count\n";
    double psnr_sum = 0.0;
    double ssim_sum = 0.0;
    std::int64_t rows = 0;
    std::int64_t skipped = 0;
    for (const std::int32_t id : pool.test) {
      const PosedImage& image = model.images.at(id);
      const CameraIntrinsics& intrinsics = model.cameras.at(image.camera_id);
      const auto rendered_path = rendered_dir / image.name;
      const auto truth_path = truth_dir / image.name;
      if (!std::filesystem::exists(rendered_path) ||
          !std::filesystem::exists(truth_path)) {
        throw DataError("missing image pair for \"" + image.name + "\"");
      }
      const RasterImage rendered = read_png(rendered_path);
      const RasterImage truth = read_png(truth_path);
      if (rendered.width != static_cast<int>(intrinsics.width) ||
          rendered.height != static_cast<int>(intrinsics.height)) {
        throw DataError("rendered \"" + image.name +
                        "\" does not match the camera resolution");
      }
      const RoiMask mask =
          mask_from_aabb(intrinsics, image, pool.spec.box, rendered.width,
                         rendered.height);
      bool ssim_window = false;
      for (int y = 5; y < mask.height - 5 && !ssim_window; ++y) {
        for (int x = 5; x < mask.width - 5 && !ssim_window; ++x) {
          ssim_window = mask.test(x, y);
        }
      }
      if (mask.set_count() == 0 || !ssim_window) {
        ++skipped;
        continue;
      }
      const double psnr = masked_psnr(rendered, truth, mask);
      const double ssim = masked_ssim(rendered, truth, mask);
      csv += image.name + "," + format_real(psnr) + "," + format_real(ssim) +
             "," + std::to_string(mask.set_count()) + "\n";
      psnr_sum += psnr;
      ssim_sum += ssim;
      ++rows;
    }
    if (rows > 0) {
      csv += "mean," + format_real(psnr_sum / static_cast<double>(rows)) +
             "," + format_real(ssim_sum / static_cast<double>(rows)) + ",\n";
    }
    write_file_atomic(out / evaluation_csv_name(pool.spec.roi_id), csv);
    const std::string prefix = "roi." + pool.spec.roi_id + ".";
    summary.add_int(prefix + "images", rows);
    summary.add_int(prefix + "skipped_empty_mask", skipped);
    if (rows > 0) {
      summary.add_real(prefix + "mean_psnr_db",
                       psnr_sum / static_cast<double>(rows));
      summary.add_real(prefix + "mean_ssim",
                       ssim_sum / static_cast<double>(rows));
    }
  }
  write_file_atomic(out / "evaluation_summary.txt", summary.text());
  log << summary.text();
}

void cmd_synth(const std::filesystem::path& recipe_path,
               const std::filesystem::path& out_dir,
               std::optional<std::uint64_t> seed_override, std::ostream& log) {
  const std::string text = read_file(recipe_path);
  SceneRecipe recipe = recipe_from_text(text);
  if (seed_override) recipe.seed = *seed_override;
  const KvFile kv = KvFile::parse(text);
  const std::int64_t splats_inside = kv.get_int("splats_inside").value_or(0);
  const std::int64_t splats_outside = kv.get_int("splats_outside").value_or(0);
  const int splats_degree =
      static_cast<int>(kv.get_int("splats_sh_degree").value_or(3));

  const SyntheticScene scene = generate(recipe);
  std::filesystem::create_directories(out_dir);
  save_model(scene.model, out_dir / "sparse", SfmFormat::kBinary);
  write_file_atomic(out_dir / "ground_truth.txt", ground_truth_text(scene));
  log << "synth: " << scene.model.images.size() << " images, "
      << scene.model.points.size() << " points\n";
  if (splats_inside > 0 || splats_outside > 0) {
    const SplatSet splats =
        generate_splats(recipe, splats_inside, splats_outside, splats_degree);
    save_splats(splats, out_dir / "splats.ply");
    log << "synth: " << splats.size() << " splats (sh_degree "
        << splats_degree << ")\n";
  }
}

}  // namespace roigs
