#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "roigs/colmap_model.hpp"

namespace roigs {

enum class SfmFormat { kBinary, kText };

/// Byte streams of one sparse reconstruction (cameras / images / points3D).
struct SfmFileSet {
  std::string cameras;
  std::string images;
  std::string points;
};

/// Parses the three COLMAP streams into a validated model. Quaternions with
/// |norm - 1| in (1e-6, 1e-3] are renormalized and flagged; larger
/// deviations, truncated streams, unknown camera models, trailing bytes and
/// dangling references are ParseError/DataError.
SfmModel parse_model(std::string_view camera_bytes,
                     std::string_view image_bytes,
                     std::string_view point_bytes, SfmFormat format);

/// Inverse of parse_model. Entries are emitted in ascending-id order; binary
/// output round-trips bit-exactly, text keeps 12 significant digits. Throws
/// DataError when the model fails validate.
SfmFileSet serialize_model(const SfmModel& model, SfmFormat format);

/// Conventional file names inside a sparse-model directory.
std::string_view sfm_file_name(SfmFormat format, int which);  // 0/1/2

SfmModel load_model(const std::filesystem::path& dir, SfmFormat format);
void save_model(const SfmModel& model, const std::filesystem::path& dir,
                SfmFormat format);

}  // namespace roigs
