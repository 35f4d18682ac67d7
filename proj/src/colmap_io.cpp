#include "roigs/colmap_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <sstream>

#include "roigs/errors.hpp"
#include "roigs/kv_file.hpp"

static_assert(std::endian::native == std::endian::little,
              "COLMAP binary I/O assumes a little-endian host");

namespace roigs {

namespace {

constexpr std::int64_t kNoPoint3d = -1;

// --- binary cursor ---------------------------------------------------------

class ByteReader {
 public:
  ByteReader(std::string_view bytes, const char* stream_name)
      : bytes_(bytes), name_(stream_name) {}

  template <typename T>
  T read() {
    static_assert(std::is_trivially_copyable_v<T>);
    if (bytes_.size() - pos_ < sizeof(T)) {
      throw ParseError(std::string(name_) + ": truncated stream at byte " +
                       std::to_string(pos_));
    }
    T value;
    std::memcpy(&value, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }

  std::string read_zero_terminated() {
    const std::size_t end = bytes_.find('\0', pos_);
    if (end == std::string_view::npos) {
      throw ParseError(std::string(name_) +
                       ": truncated stream (unterminated name)");
    }
    std::string out(bytes_.substr(pos_, end - pos_));
    pos_ = end + 1;
    return out;
  }

  void expect_end() const {
    if (pos_ != bytes_.size()) {
      throw ParseError(std::string(name_) + ": " +
                       std::to_string(bytes_.size() - pos_) +
                       " trailing bytes after the last record");
    }
  }

 private:
  std::string_view bytes_;
  const char* name_;
  std::size_t pos_ = 0;
};

class ByteWriter {
 public:
  template <typename T>
  void write(const T& value) {
    static_assert(std::is_trivially_copyable_v<T>);
    const std::size_t pos = bytes_.size();
    bytes_.resize(pos + sizeof(T));
    std::memcpy(bytes_.data() + pos, &value, sizeof(T));
  }

  void write_zero_terminated(std::string_view s) {
    bytes_.append(s);
    bytes_.push_back('\0');
  }

  std::string take() { return std::move(bytes_); }

 private:
  std::string bytes_;
};

// --- quaternion acceptance ---------------------------------------------------

void apply_quaternion_policy(PosedImage& image, double w, double x, double y,
                             double z) {
  image.rotation = Eigen::Quaterniond(w, x, y, z);
  const double dev = std::abs(image.rotation.norm() - 1.0);
  if (dev > 1e-3) {
    throw DataError("image " + std::to_string(image.image_id) +
                    ": quaternion norm deviates by " + std::to_string(dev) +
                    " (> 1e-3), refusing to renormalize");
  }
  if (dev > 1e-6) {
    image.rotation.normalize();
    image.quaternion_renorm_deviation = dev;
  }
}

// --- binary parsers ----------------------------------------------------------

std::map<std::int32_t, CameraIntrinsics> parse_cameras_binary(
    std::string_view bytes) {
  ByteReader in(bytes, "cameras.bin");
  const std::uint64_t count = in.read<std::uint64_t>();
  std::map<std::int32_t, CameraIntrinsics> cameras;
  for (std::uint64_t i = 0; i < count; ++i) {
    CameraIntrinsics cam;
    cam.camera_id = in.read<std::int32_t>();
    const std::int32_t model_id = in.read<std::int32_t>();
    const auto model = camera_model_from_id(model_id);
    if (!model) {
      throw ParseError("cameras.bin: unknown camera model id " +
                       std::to_string(model_id) + " (camera " +
                       std::to_string(cam.camera_id) + ")");
    }
    cam.model = *model;
    cam.width = in.read<std::uint64_t>();
    cam.height = in.read<std::uint64_t>();
    const int arity = camera_model_param_count(cam.model);
    cam.params.resize(static_cast<std::size_t>(arity));
    for (int p = 0; p < arity; ++p) {
      cam.params[static_cast<std::size_t>(p)] = in.read<double>();
    }
    cameras.emplace(cam.camera_id, std::move(cam));
  }
  in.expect_end();
  return cameras;
}

std::map<std::int32_t, PosedImage> parse_images_binary(std::string_view bytes) {
  ByteReader in(bytes, "images.bin");
  const std::uint64_t count = in.read<std::uint64_t>();
  std::map<std::int32_t, PosedImage> images;
  for (std::uint64_t i = 0; i < count; ++i) {
    PosedImage image;
    image.image_id = in.read<std::int32_t>();
    const double qw = in.read<double>();
    const double qx = in.read<double>();
    const double qy = in.read<double>();
    const double qz = in.read<double>();
    const double tx = in.read<double>();
    const double ty = in.read<double>();
    const double tz = in.read<double>();
    image.translation = Eigen::Vector3d(tx, ty, tz);
    image.camera_id = in.read<std::int32_t>();
    apply_quaternion_policy(image, qw, qx, qy, qz);
    image.name = in.read_zero_terminated();
    const std::uint64_t num_obs = in.read<std::uint64_t>();
    image.observations.resize(num_obs);
    for (std::uint64_t o = 0; o < num_obs; ++o) {
      Observation& obs = image.observations[o];
      obs.u = in.read<double>();
      obs.v = in.read<double>();
      const std::int64_t pid = in.read<std::int64_t>();
      if (pid != kNoPoint3d) obs.point3d_id = pid;
    }
    images.emplace(image.image_id, std::move(image));
  }
  in.expect_end();
  return images;
}

std::map<std::int64_t, ScenePoint> parse_points_binary(std::string_view bytes) {
  ByteReader in(bytes, "points3D.bin");
  const std::uint64_t count = in.read<std::uint64_t>();
  std::map<std::int64_t, ScenePoint> points;
  for (std::uint64_t i = 0; i < count; ++i) {
    ScenePoint point;
    point.point3d_id = in.read<std::int64_t>();
    const double x = in.read<double>();
    const double y = in.read<double>();
    const double z = in.read<double>();
    point.position = Eigen::Vector3d(x, y, z);
    point.color[0] = in.read<std::uint8_t>();
    point.color[1] = in.read<std::uint8_t>();
    point.color[2] = in.read<std::uint8_t>();
    point.reprojection_error = in.read<double>();
    const std::uint64_t track_len = in.read<std::uint64_t>();
    point.track.resize(track_len);
    for (std::uint64_t t = 0; t < track_len; ++t) {
      point.track[t].image_id = in.read<std::int32_t>();
      point.track[t].observation_index = in.read<std::int32_t>();
    }
    points.emplace(point.point3d_id, std::move(point));
  }
  in.expect_end();
  return points;
}

// --- text parsers ------------------------------------------------------------
//
// COLMAP text export: whitespace-separated records, `#` comment lines.
// images.txt uses two lines per image; the second (possibly empty) line holds
// the observation triplets, so blank lines are only skipped while looking for
// a record's first line.

class LineReader {
 public:
  LineReader(std::string_view text, const char* stream_name)
      : text_(text), name_(stream_name) {}

  // Next non-comment, non-blank line; nullopt at end of stream.
  std::optional<std::string_view> next_record_line() {
    while (pos_ <= text_.size()) {
      auto line = raw_line();
      if (!line) return std::nullopt;
      const std::size_t first = line->find_first_not_of(" \t\r");
      if (first == std::string_view::npos) continue;
      if ((*line)[first] == '#') continue;
      return line;
    }
    return std::nullopt;
  }

  // Next physical line, blank or not (used for observation lines).
  std::optional<std::string_view> raw_line() {
    if (pos_ > text_.size()) return std::nullopt;
    if (pos_ == text_.size()) {
      pos_ = text_.size() + 1;
      return std::nullopt;
    }
    const std::size_t nl = text_.find('\n', pos_);
    std::string_view line = text_.substr(
        pos_, nl == std::string_view::npos ? text_.size() - pos_ : nl - pos_);
    pos_ = nl == std::string_view::npos ? text_.size() + 1 : nl + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return line;
  }

  const char* name() const { return name_; }

 private:
  std::string_view text_;
  const char* name_;
  std::size_t pos_ = 0;
};

[[noreturn]] void bad_line(const char* stream, std::string_view line,
                           const char* what) {
  throw ParseError(std::string(stream) + ": " + what + ": \"" +
                   std::string(line.substr(0, 120)) + "\"");
}

std::map<std::int32_t, CameraIntrinsics> parse_cameras_text(
    std::string_view text) {
  LineReader in(text, "cameras.txt");
  std::map<std::int32_t, CameraIntrinsics> cameras;
  while (auto line = in.next_record_line()) {
    std::istringstream ss{std::string(*line)};
    CameraIntrinsics cam;
    std::string model_name;
    if (!(ss >> cam.camera_id >> model_name >> cam.width >> cam.height)) {
      bad_line(in.name(), *line, "malformed camera record");
    }
    const auto model = camera_model_from_name(model_name);
    if (!model) {
      throw ParseError("cameras.txt: unknown camera model \"" + model_name +
                       "\" (camera " + std::to_string(cam.camera_id) + ")");
    }
    cam.model = *model;
    const int arity = camera_model_param_count(cam.model);
    cam.params.resize(static_cast<std::size_t>(arity));
    for (int p = 0; p < arity; ++p) {
      if (!(ss >> cam.params[static_cast<std::size_t>(p)])) {
        bad_line(in.name(), *line, "missing camera params");
      }
    }
    double extra;
    if (ss >> extra) bad_line(in.name(), *line, "trailing values");
    cameras.emplace(cam.camera_id, std::move(cam));
  }
  return cameras;
}

std::map<std::int32_t, PosedImage> parse_images_text(std::string_view text) {
  LineReader in(text, "images.txt");
  std::map<std::int32_t, PosedImage> images;
  while (auto line = in.next_record_line()) {
    std::istringstream ss{std::string(*line)};
    PosedImage image;
    double qw, qx, qy, qz, tx, ty, tz;
    if (!(ss >> image.image_id >> qw >> qx >> qy >> qz >> tx >> ty >> tz >>
          image.camera_id)) {
      bad_line(in.name(), *line, "malformed image record");
    }
    image.translation = Eigen::Vector3d(tx, ty, tz);
    apply_quaternion_policy(image, qw, qx, qy, qz);
    // The name is the tail of the line; COLMAP writes it last.
    std::string name;
    std::getline(ss, name);
    const std::size_t first = name.find_first_not_of(" \t");
    if (first == std::string::npos) {
      bad_line(in.name(), *line, "missing image name");
    }
    image.name = name.substr(first);
    const auto obs_line = in.raw_line();
    if (!obs_line) {
      throw ParseError("images.txt: image " + std::to_string(image.image_id) +
                       ": missing observation line");
    }
    std::istringstream obs_ss{std::string(*obs_line)};
    double u, v;
    std::int64_t pid;
    while (obs_ss >> u) {
      if (!(obs_ss >> v >> pid)) {
        bad_line(in.name(), *obs_line, "incomplete observation triplet");
      }
      Observation obs;
      obs.u = u;
      obs.v = v;
      if (pid != kNoPoint3d) obs.point3d_id = pid;
      image.observations.push_back(obs);
    }
    images.emplace(image.image_id, std::move(image));
  }
  return images;
}

std::map<std::int64_t, ScenePoint> parse_points_text(std::string_view text) {
  LineReader in(text, "points3D.txt");
  std::map<std::int64_t, ScenePoint> points;
  while (auto line = in.next_record_line()) {
    std::istringstream ss{std::string(*line)};
    ScenePoint point;
    double x, y, z;
    int r, g, b;
    if (!(ss >> point.point3d_id >> x >> y >> z >> r >> g >> b >>
          point.reprojection_error)) {
      bad_line(in.name(), *line, "malformed point record");
    }
    if (r < 0 || r > 255 || g < 0 || g > 255 || b < 0 || b > 255) {
      bad_line(in.name(), *line, "color component out of range");
    }
    point.position = Eigen::Vector3d(x, y, z);
    point.color = {static_cast<std::uint8_t>(r), static_cast<std::uint8_t>(g),
                   static_cast<std::uint8_t>(b)};
    std::int32_t image_id, obs_index;
    while (ss >> image_id) {
      if (!(ss >> obs_index)) {
        bad_line(in.name(), *line, "incomplete track pair");
      }
      point.track.push_back({image_id, obs_index});
    }
    points.emplace(point.point3d_id, std::move(point));
  }
  return points;
}

// --- serializers -------------------------------------------------------------

std::string serialize_cameras_binary(const SfmModel& model) {
  ByteWriter out;
  out.write<std::uint64_t>(model.cameras.size());
  for (const auto& [id, cam] : model.cameras) {
    out.write<std::int32_t>(id);
    out.write<std::int32_t>(static_cast<std::int32_t>(cam.model));
    out.write<std::uint64_t>(cam.width);
    out.write<std::uint64_t>(cam.height);
    for (double p : cam.params) out.write<double>(p);
  }
  return out.take();
}

std::string serialize_images_binary(const SfmModel& model) {
  ByteWriter out;
  out.write<std::uint64_t>(model.images.size());
  for (const auto& [id, image] : model.images) {
    out.write<std::int32_t>(id);
    out.write<double>(image.rotation.w());
    out.write<double>(image.rotation.x());
    out.write<double>(image.rotation.y());
    out.write<double>(image.rotation.z());
    out.write<double>(image.translation.x());
    out.write<double>(image.translation.y());
    out.write<double>(image.translation.z());
    out.write<std::int32_t>(image.camera_id);
    out.write_zero_terminated(image.name);
    out.write<std::uint64_t>(image.observations.size());
    for (const auto& obs : image.observations) {
      out.write<double>(obs.u);
      out.write<double>(obs.v);
      out.write<std::int64_t>(obs.point3d_id ? *obs.point3d_id : kNoPoint3d);
    }
  }
  return out.take();
}

std::string serialize_points_binary(const SfmModel& model) {
  ByteWriter out;
  out.write<std::uint64_t>(model.points.size());
  for (const auto& [id, point] : model.points) {
    out.write<std::int64_t>(id);
    out.write<double>(point.position.x());
    out.write<double>(point.position.y());
    out.write<double>(point.position.z());
    out.write<std::uint8_t>(point.color[0]);
    out.write<std::uint8_t>(point.color[1]);
    out.write<std::uint8_t>(point.color[2]);
    out.write<double>(point.reprojection_error);
    out.write<std::uint64_t>(point.track.size());
    for (const auto& entry : point.track) {
      out.write<std::int32_t>(entry.image_id);
      out.write<std::int32_t>(entry.observation_index);
    }
  }
  return out.take();
}

void append_real(std::string& out, double v) {
  out += ' ';
  out += format_real(v, 12);
}

std::string serialize_cameras_text(const SfmModel& model) {
  std::string out =
      "# Camera list: CAMERA_ID MODEL WIDTH HEIGHT PARAMS[]\n";
  for (const auto& [id, cam] : model.cameras) {
    out += std::to_string(id);
    out += ' ';
    out += camera_model_name(cam.model);
    out += ' ';
    out += std::to_string(cam.width);
    out += ' ';
    out += std::to_string(cam.height);
    for (double p : cam.params) append_real(out, p);
    out += '\n';
  }
  return out;
}

std::string serialize_images_text(const SfmModel& model) {
  std::string out =
      "# Image list: IMAGE_ID QW QX QY QZ TX TY TZ CAMERA_ID NAME\n"
      "#   then one line of observations: X Y POINT3D_ID\n";
  for (const auto& [id, image] : model.images) {
    out += std::to_string(id);
    append_real(out, image.rotation.w());
    append_real(out, image.rotation.x());
    append_real(out, image.rotation.y());
    append_real(out, image.rotation.z());
    append_real(out, image.translation.x());
    append_real(out, image.translation.y());
    append_real(out, image.translation.z());
    out += ' ';
    out += std::to_string(image.camera_id);
    out += ' ';
    out += image.name;
    out += '\n';
    bool first = true;
    for (const auto& obs : image.observations) {
      if (!first) out += ' ';
      first = false;
      out += format_real(obs.u, 12);
      out += ' ';
      out += format_real(obs.v, 12);
      out += ' ';
      out += std::to_string(obs.point3d_id ? *obs.point3d_id : kNoPoint3d);
    }
    out += '\n';
  }
  return out;
}

std::string serialize_points_text(const SfmModel& model) {
  std::string out =
      "# 3D point list: POINT3D_ID X Y Z R G B ERROR TRACK[] as "
      "(IMAGE_ID OBS_INDEX)\n";
  for (const auto& [id, point] : model.points) {
    out += std::to_string(id);
    append_real(out, point.position.x());
    append_real(out, point.position.y());
    append_real(out, point.position.z());
    for (int c = 0; c < 3; ++c) {
      out += ' ';
      out += std::to_string(static_cast<int>(point.color[c]));
    }
    append_real(out, point.reprojection_error);
    for (const auto& entry : point.track) {
      out += ' ';
      out += std::to_string(entry.image_id);
      out += ' ';
      out += std::to_string(entry.observation_index);
    }
    out += '\n';
  }
  return out;
}

}  // namespace

SfmModel parse_model(std::string_view camera_bytes,
                     std::string_view image_bytes,
                     std::string_view point_bytes, SfmFormat format) {
  SfmModel model;
  if (format == SfmFormat::kBinary) {
    model.cameras = parse_cameras_binary(camera_bytes);
    model.images = parse_images_binary(image_bytes);
    model.points = parse_points_binary(point_bytes);
  } else {
    model.cameras = parse_cameras_text(camera_bytes);
    model.images = parse_images_text(image_bytes);
    model.points = parse_points_text(point_bytes);
  }
  const auto violations = validate(model);
  if (has_errors(violations)) {
    throw DataError("parsed model fails validation:\n" +
                    violations_text(violations));
  }
  return model;
}

SfmFileSet serialize_model(const SfmModel& model, SfmFormat format) {
  const auto violations = validate(model);
  if (has_errors(violations)) {
    throw DataError("model fails validation, refusing to serialize:\n" +
                    violations_text(violations));
  }
  SfmFileSet out;
  if (format == SfmFormat::kBinary) {
    out.cameras = serialize_cameras_binary(model);
    out.images = serialize_images_binary(model);
    out.points = serialize_points_binary(model);
  } else {
    out.cameras = serialize_cameras_text(model);
    out.images = serialize_images_text(model);
    out.points = serialize_points_text(model);
  }
  return out;
}

std::string_view sfm_file_name(SfmFormat format, int which) {
  static constexpr std::string_view kBin[] = {"cameras.bin", "images.bin",
                                              "points3D.bin"};
  static constexpr std::string_view kTxt[] = {"cameras.txt", "images.txt",
                                              "points3D.txt"};
  return format == SfmFormat::kBinary ? kBin[which] : kTxt[which];
}

SfmModel load_model(const std::filesystem::path& dir, SfmFormat format) {
  return parse_model(read_file(dir / sfm_file_name(format, 0)),
                     read_file(dir / sfm_file_name(format, 1)),
                     read_file(dir / sfm_file_name(format, 2)), format);
}

void save_model(const SfmModel& model, const std::filesystem::path& dir,
                SfmFormat format) {
  const SfmFileSet files = serialize_model(model, format);
  std::filesystem::create_directories(dir);
  write_file_atomic(dir / sfm_file_name(format, 0), files.cameras);
  write_file_atomic(dir / sfm_file_name(format, 1), files.images);
  write_file_atomic(dir / sfm_file_name(format, 2), files.points);
}

}  // namespace roigs
