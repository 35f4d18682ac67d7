#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace roigs {

/// One explicit 3D Gaussian as stored in 3DGS checkpoint PLY files.
/// Components are float32 to round-trip checkpoints bit-exactly; math on
/// them elsewhere is done in double.
struct SplatRecord {
  Eigen::Vector3f position = Eigen::Vector3f::Zero();
  Eigen::Vector3f normal = Eigen::Vector3f::Zero();  // carried verbatim
  Eigen::Vector3f sh_dc = Eigen::Vector3f::Zero();
  Eigen::VectorXf sh_rest;                       // 0 / 9 / 24 / 45 entries
  float opacity = 0.0f;                          // pre-sigmoid logit
  Eigen::Vector3f log_scale = Eigen::Vector3f::Zero();
  Eigen::Vector4f rotation{1.0f, 0.0f, 0.0f, 0.0f};  // as stored, not
                                                     // necessarily unit
};

/// Dense splat container: one row per record, canonical column order
/// x y z nx ny nz f_dc_0..2 f_rest_* opacity scale_0..2 rot_0..3.
class SplatSet {
 public:
  using ComponentMatrix =
      Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  SplatSet() : SplatSet(3, 0) {}
  explicit SplatSet(int sh_degree, Eigen::Index count = 0);

  static int rest_count_for_degree(int sh_degree);  // 0, 9, 24, 45
  static std::optional<int> degree_for_rest_count(int rest_count);

  int sh_degree() const { return sh_degree_; }
  int rest_count() const { return rest_count_for_degree(sh_degree_); }
  int components_per_record() const { return 17 + rest_count(); }
  Eigen::Index size() const { return components_.rows(); }
  bool empty() const { return size() == 0; }

  ComponentMatrix& components() { return components_; }
  const ComponentMatrix& components() const { return components_; }

  Eigen::Vector3f position(Eigen::Index i) const {
    return components_.row(i).head<3>();
  }

  SplatRecord record(Eigen::Index i) const;
  void set_record(Eigen::Index i, const SplatRecord& record);

  static SplatSet from_records(std::span<const SplatRecord> records,
                               int sh_degree);

  /// Index of the first non-finite component, if any: (record, component).
  std::optional<std::pair<Eigen::Index, int>> first_non_finite() const;

 private:
  int sh_degree_;
  ComponentMatrix components_;
};

/// Canonical 3DGS property names for one SH degree, in column order.
std::vector<std::string> splat_property_names(int sh_degree);

/// Parses a binary-little-endian 3DGS PLY. Permuted property orders are
/// accepted and canonicalized; ascii files, missing properties, unknown
/// properties and truncated/trailing payload bytes are errors.
SplatSet read_splats(std::string_view bytes);

/// Canonical binary PLY bytes; inverse of read_splats for conforming files.
/// Throws DataError naming the record index on non-finite components.
std::string write_splats(const SplatSet& set);

SplatSet load_splats(const std::filesystem::path& path);
void save_splats(const SplatSet& set, const std::filesystem::path& path);

}  // namespace roigs
