#include "roigs/colmap_model.hpp"

#include <cmath>
#include <cstddef>
#include <unordered_map>
#include <unordered_set>

namespace roigs {

int camera_model_param_count(CameraModel model) {
  switch (model) {
    case CameraModel::kSimplePinhole:
      return 3;
    case CameraModel::kPinhole:
      return 4;
    case CameraModel::kSimpleRadial:
      return 4;
    case CameraModel::kOpencv:
      return 8;
  }
  return 0;
}

std::string_view camera_model_name(CameraModel model) {
  switch (model) {
    case CameraModel::kSimplePinhole:
      return "SIMPLE_PINHOLE";
    case CameraModel::kPinhole:
      return "PINHOLE";
    case CameraModel::kSimpleRadial:
      return "SIMPLE_RADIAL";
    case CameraModel::kOpencv:
      return "OPENCV";
  }
  return "UNKNOWN";
}

std::optional<CameraModel> camera_model_from_id(std::int32_t id) {
  switch (id) {
    case 0:
      return CameraModel::kSimplePinhole;
    case 1:
      return CameraModel::kPinhole;
    case 2:
      return CameraModel::kSimpleRadial;
    case 4:
      return CameraModel::kOpencv;
    default:
      return std::nullopt;
  }
}

std::optional<CameraModel> camera_model_from_name(std::string_view name) {
  for (CameraModel m :
       {CameraModel::kSimplePinhole, CameraModel::kPinhole,
        CameraModel::kSimpleRadial, CameraModel::kOpencv}) {
    if (camera_model_name(m) == name) return m;
  }
  return std::nullopt;
}

namespace {

void add_error(std::vector<Violation>& out, std::string message) {
  out.push_back({Violation::Severity::kError, std::move(message)});
}

void add_warning(std::vector<Violation>& out, std::string message) {
  out.push_back({Violation::Severity::kWarning, std::move(message)});
}

}  // namespace

std::vector<Violation> validate(const SfmModel& model) {
  std::vector<Violation> out;

  for (const auto& [id, cam] : model.cameras) {
    if (cam.camera_id != id) {
      add_error(out, "camera " + std::to_string(id) + ": key/id mismatch");
    }
    if (cam.width == 0 || cam.height == 0) {
      add_error(out, "camera " + std::to_string(id) + ": zero image size");
    }
    const std::size_t want =
        static_cast<std::size_t>(camera_model_param_count(cam.model));
    if (cam.params.size() != want) {
      add_error(out, "camera " + std::to_string(id) + ": model " +
                         std::string(camera_model_name(cam.model)) +
                         " expects " + std::to_string(want) + " params, has " +
                         std::to_string(cam.params.size()));
    }
    // Focal lengths are the leading one or two params for all four models.
    const int focals = (cam.model == CameraModel::kPinhole ||
                        cam.model == CameraModel::kOpencv)
                           ? 2
                           : 1;
    for (int i = 0; i < focals && i < static_cast<int>(cam.params.size());
         ++i) {
      if (!(cam.params[static_cast<std::size_t>(i)] > 0.0)) {
        add_error(out, "camera " + std::to_string(id) +
                           ": non-positive focal length");
        break;
      }
    }
  }

  // Count, per point, how many observations reference it; used below to
  // catch observations the point's track does not list.
  std::unordered_map<std::int64_t, std::size_t> obs_refs;

  for (const auto& [id, image] : model.images) {
    if (image.image_id != id) {
      add_error(out, "image " + std::to_string(id) + ": key/id mismatch");
    }
    if (model.cameras.find(image.camera_id) == model.cameras.end()) {
      add_error(out, "image " + std::to_string(id) +
                         ": dangling camera reference " +
                         std::to_string(image.camera_id));
    }
    const double norm_dev = std::abs(image.rotation.norm() - 1.0);
    if (norm_dev > 1e-6) {
      add_error(out, "image " + std::to_string(id) +
                         ": non-unit quaternion (|norm-1| = " +
                         std::to_string(norm_dev) + ")");
    } else if (image.quaternion_renorm_deviation > 0.0) {
      add_warning(out, "image " + std::to_string(id) +
                           ": quaternion renormalized on parse (|norm-1| was " +
                           std::to_string(image.quaternion_renorm_deviation) +
                           ")");
    }
    for (std::size_t i = 0; i < image.observations.size(); ++i) {
      const auto& obs = image.observations[i];
      if (!obs.point3d_id) continue;
      if (model.points.find(*obs.point3d_id) == model.points.end()) {
        add_error(out, "image " + std::to_string(id) + " observation " +
                           std::to_string(i) + ": dangling point reference " +
                           std::to_string(*obs.point3d_id));
      } else {
        ++obs_refs[*obs.point3d_id];
      }
    }
  }

  for (const auto& [id, point] : model.points) {
    if (point.point3d_id != id) {
      add_error(out, "point " + std::to_string(id) + ": key/id mismatch");
    }
    std::size_t resolved = 0;
    std::unordered_set<std::uint64_t> tracked;
    tracked.reserve(point.track.size());
    for (const auto& entry : point.track) {
      const std::uint64_t key =
          (static_cast<std::uint64_t>(
               static_cast<std::uint32_t>(entry.image_id))
           << 32) |
          static_cast<std::uint32_t>(entry.observation_index);
      if (!tracked.insert(key).second) {
        add_error(out, "point " + std::to_string(id) +
                           ": duplicate track entry (image " +
                           std::to_string(entry.image_id) + ", index " +
                           std::to_string(entry.observation_index) + ")");
        continue;
      }
      const auto image_it = model.images.find(entry.image_id);
      if (image_it == model.images.end()) {
        add_error(out, "point " + std::to_string(id) +
                           ": track names missing image " +
                           std::to_string(entry.image_id));
        continue;
      }
      const auto& obs_list = image_it->second.observations;
      if (entry.observation_index < 0 ||
          static_cast<std::size_t>(entry.observation_index) >=
              obs_list.size()) {
        add_error(out, "point " + std::to_string(id) + ": track entry (image " +
                           std::to_string(entry.image_id) + ", index " +
                           std::to_string(entry.observation_index) +
                           ") is out of range");
        continue;
      }
      const auto& obs =
          obs_list[static_cast<std::size_t>(entry.observation_index)];
      if (!obs.point3d_id || *obs.point3d_id != id) {
        add_error(out,
                  "point " + std::to_string(id) + ": track entry (image " +
                      std::to_string(entry.image_id) + ", index " +
                      std::to_string(entry.observation_index) +
                      ") stores point3d_id " +
                      (obs.point3d_id ? std::to_string(*obs.point3d_id)
                                      : std::string("NONE")));
      } else {
        ++resolved;
      }
    }
    // Every observation referencing this point must be matched by exactly
    // one resolved track entry; a count mismatch means some observation is
    // not tracked back. Identify the culprits with a targeted pass.
    const auto ref_it = obs_refs.find(id);
    const std::size_t refs = ref_it == obs_refs.end() ? 0 : ref_it->second;
    if (refs != resolved) {
      for (const auto& [image_id, image] : model.images) {
        for (std::size_t i = 0; i < image.observations.size(); ++i) {
          const auto& obs = image.observations[i];
          if (!obs.point3d_id || *obs.point3d_id != id) continue;
          const std::uint64_t key =
              (static_cast<std::uint64_t>(static_cast<std::uint32_t>(image_id))
               << 32) |
              static_cast<std::uint32_t>(i);
          if (tracked.find(key) == tracked.end()) {
            add_error(out, "point " + std::to_string(id) +
                               ": observation (image " +
                               std::to_string(image_id) + ", index " +
                               std::to_string(i) +
                               ") references the point but is not in its "
                               "track");
          }
        }
      }
    }
  }

  return out;
}

bool has_errors(const std::vector<Violation>& violations) {
  for (const auto& v : violations) {
    if (v.severity == Violation::Severity::kError) return true;
  }
  return false;
}

std::string violations_text(const std::vector<Violation>& violations) {
  std::string out;
  for (const auto& v : violations) {
    out += v.severity == Violation::Severity::kError ? "error: " : "warning: ";
    out += v.message;
    out += '\n';
  }
  return out;
}

}  // namespace roigs
