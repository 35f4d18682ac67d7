#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace roigs {

/// Camera models supported by the toolkit; values are COLMAP model ids.
enum class CameraModel : std::int32_t {
  kSimplePinhole = 0,  // f, cx, cy
  kPinhole = 1,        // fx, fy, cx, cy
  kSimpleRadial = 2,   // f, cx, cy, k
  kOpencv = 4,         // fx, fy, cx, cy, k1, k2, p1, p2
};

int camera_model_param_count(CameraModel model);
std::string_view camera_model_name(CameraModel model);
std::optional<CameraModel> camera_model_from_id(std::int32_t id);
std::optional<CameraModel> camera_model_from_name(std::string_view name);

struct CameraIntrinsics {
  std::int32_t camera_id = 0;
  CameraModel model = CameraModel::kPinhole;
  std::uint64_t width = 0;
  std::uint64_t height = 0;
  std::vector<double> params;  // length camera_model_param_count(model)
};

struct Observation {
  double u = 0.0;  // pixels
  double v = 0.0;
  std::optional<std::int64_t> point3d_id;  // nullopt when the keypoint is
                                           // not triangulated
};

struct PosedImage {
  std::int32_t image_id = 0;
  Eigen::Quaterniond rotation{1.0, 0.0, 0.0, 0.0};  // world -> camera
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();
  std::int32_t camera_id = 0;
  std::string name;
  std::vector<Observation> observations;
  // |norm - 1| of the quaternion as it appeared in the input, non-zero only
  // when the parser renormalized it. Reported by validate as a warning.
  double quaternion_renorm_deviation = 0.0;

  Eigen::Matrix3d rotation_matrix() const {
    return rotation.toRotationMatrix();
  }
  /// Camera center in world coordinates: -R^T t.
  Eigen::Vector3d camera_center() const {
    return -(rotation_matrix().transpose() * translation);
  }
  /// Camera forward (+z) axis expressed in world coordinates.
  Eigen::Vector3d view_direction() const {
    return rotation_matrix().row(2).transpose();
  }
};

struct TrackEntry {
  std::int32_t image_id = 0;
  std::int32_t observation_index = 0;
};

struct ScenePoint {
  std::int64_t point3d_id = 0;
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  std::array<std::uint8_t, 3> color{};
  double reprojection_error = 0.0;  // pixels
  std::vector<TrackEntry> track;
};

/// Parsed sparse reconstruction. Ordered maps keep serialization and
/// iteration in ascending-id order.
struct SfmModel {
  std::map<std::int32_t, CameraIntrinsics> cameras;
  std::map<std::int32_t, PosedImage> images;
  std::map<std::int64_t, ScenePoint> points;
};

struct Violation {
  enum class Severity { kError, kWarning };
  Severity severity = Severity::kError;
  std::string message;
};

/// Lists every referential-integrity defect: dangling camera/point
/// references, out-of-range or mismatched track entries, observations whose
/// point does not track them back, and non-unit quaternions. Renormalized
/// quaternions appear as warnings. Empty result (no errors, no warnings)
/// means every type invariant holds.
std::vector<Violation> validate(const SfmModel& model);

bool has_errors(const std::vector<Violation>& violations);

/// Concatenated one-per-line violation messages, for error reporting.
std::string violations_text(const std::vector<Violation>& violations);

}  // namespace roigs
