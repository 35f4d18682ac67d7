#include "roigs/splat_io.hpp"

#include <bit>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <unordered_map>

#include "roigs/errors.hpp"
#include "roigs/kv_file.hpp"

static_assert(std::endian::native == std::endian::little,
              "splat PLY I/O assumes a little-endian host");

namespace roigs {

namespace {

constexpr std::string_view kMagic = "ply\n";
constexpr std::string_view kFormatBinaryLe = "binary_little_endian";

std::string_view next_token(std::string_view& s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  std::size_t end = 0;
  while (end < s.size() && s[end] != ' ' && s[end] != '\t') ++end;
  const std::string_view tok = s.substr(0, end);
  s.remove_prefix(end);
  return tok;
}

}  // namespace

SplatSet::SplatSet(int sh_degree, Eigen::Index count) : sh_degree_(sh_degree) {
  if (sh_degree < 0 || sh_degree > 3) {
    throw DataError("sh_degree must be in [0, 3], got " +
                    std::to_string(sh_degree));
  }
  components_.resize(count, components_per_record());
  components_.setZero();
}

int SplatSet::rest_count_for_degree(int sh_degree) {
  return 3 * ((sh_degree + 1) * (sh_degree + 1) - 1);
}

std::optional<int> SplatSet::degree_for_rest_count(int rest_count) {
  for (int d = 0; d <= 3; ++d) {
    if (rest_count_for_degree(d) == rest_count) return d;
  }
  return std::nullopt;
}

SplatRecord SplatSet::record(Eigen::Index i) const {
  const auto row = components_.row(i);
  const int rest = rest_count();
  SplatRecord out;
  out.position = row.head<3>();
  out.normal = row.segment<3>(3);
  out.sh_dc = row.segment<3>(6);
  out.sh_rest = row.segment(9, rest);
  out.opacity = row(9 + rest);
  out.log_scale = row.segment<3>(10 + rest);
  out.rotation = row.segment<4>(13 + rest);
  return out;
}

void SplatSet::set_record(Eigen::Index i, const SplatRecord& record) {
  const int rest = rest_count();
  if (record.sh_rest.size() != rest) {
    throw DataError("record has " + std::to_string(record.sh_rest.size()) +
                    " rest coefficients, set expects " + std::to_string(rest));
  }
  auto row = components_.row(i);
  row.head<3>() = record.position;
  row.segment<3>(3) = record.normal;
  row.segment<3>(6) = record.sh_dc;
  row.segment(9, rest) = record.sh_rest;
  row(9 + rest) = record.opacity;
  row.segment<3>(10 + rest) = record.log_scale;
  row.segment<4>(13 + rest) = record.rotation;
}

SplatSet SplatSet::from_records(std::span<const SplatRecord> records,
                                int sh_degree) {
  SplatSet set(sh_degree, static_cast<Eigen::Index>(records.size()));
  for (std::size_t i = 0; i < records.size(); ++i) {
    set.set_record(static_cast<Eigen::Index>(i), records[i]);
  }
  return set;
}

std::optional<std::pair<Eigen::Index, int>> SplatSet::first_non_finite()
    const {
  for (Eigen::Index r = 0; r < components_.rows(); ++r) {
    for (Eigen::Index c = 0; c < components_.cols(); ++c) {
      if (!std::isfinite(components_(r, c))) {
        return std::make_pair(r, static_cast<int>(c));
      }
    }
  }
  return std::nullopt;
}

std::vector<std::string> splat_property_names(int sh_degree) {
  std::vector<std::string> names = {"x", "y", "z", "nx", "ny", "nz",
                                    "f_dc_0", "f_dc_1", "f_dc_2"};
  const int rest = SplatSet::rest_count_for_degree(sh_degree);
  for (int i = 0; i < rest; ++i) {
    names.push_back("f_rest_" + std::to_string(i));
  }
  names.emplace_back("opacity");
  for (int i = 0; i < 3; ++i) names.push_back("scale_" + std::to_string(i));
  for (int i = 0; i < 4; ++i) names.push_back("rot_" + std::to_string(i));
  return names;
}

SplatSet read_splats(std::string_view bytes) {
  if (bytes.substr(0, kMagic.size()) != kMagic) {
    throw ParseError("not a PLY file (missing `ply` magic)");
  }
  std::size_t pos = kMagic.size();

  bool format_seen = false;
  std::uint64_t vertex_count = 0;
  bool vertex_seen = false;
  std::vector<std::string> file_properties;

  for (;;) {
    const std::size_t nl = bytes.find('\n', pos);
    if (nl == std::string_view::npos) {
      throw ParseError("PLY header not terminated by end_header");
    }
    std::string_view line = bytes.substr(pos, nl - pos);
    pos = nl + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    std::string_view rest = line;
    const std::string_view word = next_token(rest);
    if (word == "end_header") break;
    if (word == "comment" || word == "obj_info") continue;
    if (word == "format") {
      const std::string_view fmt = next_token(rest);
      if (fmt == "ascii") {
        throw ParseError("ascii PLY is not supported (binary_little_endian "
                         "required)");
      }
      if (fmt != kFormatBinaryLe) {
        throw ParseError("unsupported PLY format: " + std::string(fmt));
      }
      format_seen = true;
      continue;
    }
    if (word == "element") {
      const std::string_view elem = next_token(rest);
      if (elem != "vertex") {
        throw ParseError("unsupported PLY element: " + std::string(elem));
      }
      if (vertex_seen) throw ParseError("duplicate vertex element");
      const std::string count_tok{next_token(rest)};
      char* end = nullptr;
      vertex_count = std::strtoull(count_tok.c_str(), &end, 10);
      if (count_tok.empty() || end != count_tok.c_str() + count_tok.size()) {
        throw ParseError("malformed vertex count: " + count_tok);
      }
      vertex_seen = true;
      continue;
    }
    if (word == "property") {
      const std::string_view type = next_token(rest);
      if (type != "float" && type != "float32") {
        throw ParseError("unsupported property type: " + std::string(type));
      }
      const std::string_view name = next_token(rest);
      if (name.empty()) throw ParseError("property without a name");
      file_properties.emplace_back(name);
      continue;
    }
    throw ParseError("unrecognized PLY header line: " + std::string(line));
  }
  if (!format_seen) throw ParseError("PLY header missing format line");
  if (!vertex_seen) throw ParseError("PLY header missing vertex element");

  // Infer the SH degree from the number of f_rest_* properties, then match
  // the file's property set against the canonical schema.
  int rest_props = 0;
  for (const auto& name : file_properties) {
    if (name.rfind("f_rest_", 0) == 0) ++rest_props;
  }
  const auto degree = SplatSet::degree_for_rest_count(rest_props);
  if (!degree) {
    throw ParseError("file has " + std::to_string(rest_props) +
                     " f_rest_* properties; expected 0, 9, 24 or 45");
  }
  const std::vector<std::string> canonical = splat_property_names(*degree);
  std::unordered_map<std::string_view, int> canonical_index;
  for (std::size_t i = 0; i < canonical.size(); ++i) {
    canonical_index.emplace(canonical[i], static_cast<int>(i));
  }
  std::vector<int> column_of_property(file_properties.size());
  std::vector<bool> present(canonical.size(), false);
  for (std::size_t i = 0; i < file_properties.size(); ++i) {
    const auto it = canonical_index.find(file_properties[i]);
    if (it == canonical_index.end()) {
      throw ParseError("unknown property: " + file_properties[i]);
    }
    if (present[static_cast<std::size_t>(it->second)]) {
      throw ParseError("duplicate property: " + file_properties[i]);
    }
    present[static_cast<std::size_t>(it->second)] = true;
    column_of_property[i] = it->second;
  }
  for (std::size_t i = 0; i < canonical.size(); ++i) {
    if (!present[i]) {
      throw ParseError("missing required property: " + canonical[i]);
    }
  }

  const std::size_t comps = canonical.size();
  const std::size_t payload = bytes.size() - pos;
  const std::size_t expected = vertex_count * comps * sizeof(float);
  if (payload < expected) {
    throw ParseError("truncated PLY payload: have " + std::to_string(payload) +
                     " bytes, header declares " + std::to_string(expected));
  }
  if (payload > expected) {
    throw ParseError("trailing bytes after the last PLY record: " +
                     std::to_string(payload - expected));
  }

  SplatSet set(*degree, static_cast<Eigen::Index>(vertex_count));
  bool canonical_order = true;
  for (std::size_t i = 0; i < comps; ++i) {
    if (column_of_property[i] != static_cast<int>(i)) {
      canonical_order = false;
      break;
    }
  }
  float* dst = set.components().data();
  const char* src = bytes.data() + pos;
  if (canonical_order) {
    std::memcpy(dst, src, expected);
  } else {
    for (std::uint64_t r = 0; r < vertex_count; ++r) {
      for (std::size_t p = 0; p < comps; ++p) {
        std::memcpy(dst + r * comps +
                        static_cast<std::size_t>(column_of_property[p]),
                    src + (r * comps + p) * sizeof(float), sizeof(float));
      }
    }
  }
  return set;
}

std::string write_splats(const SplatSet& set) {
  if (const auto bad = set.first_non_finite()) {
    throw DataError("record " + std::to_string(bad->first) +
                    ": non-finite component at index " +
                    std::to_string(bad->second));
  }
  std::string out;
  out += kMagic;
  out += "format binary_little_endian 1.0\n";
  out += "element vertex " + std::to_string(set.size()) + "\n";
  for (const auto& name : splat_property_names(set.sh_degree())) {
    out += "property float " + name + "\n";
  }
  out += "end_header\n";
  const std::size_t payload = static_cast<std::size_t>(set.size()) *
                              static_cast<std::size_t>(
                                  set.components_per_record()) *
                              sizeof(float);
  const std::size_t header_size = out.size();
  out.resize(header_size + payload);
  std::memcpy(out.data() + header_size, set.components().data(), payload);
  return out;
}

SplatSet load_splats(const std::filesystem::path& path) {
  return read_splats(read_file(path));
}

void save_splats(const SplatSet& set, const std::filesystem::path& path) {
  write_file_atomic(path, write_splats(set));
}

}  // namespace roigs
