#include "roigs/kv_file.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "roigs/errors.hpp"

namespace roigs {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' ||
                        s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' ||
                        s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

}  // namespace

KvFile KvFile::parse(std::string_view text) {
  KvFile out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(
        pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const std::size_t colon = line.find(':');
    if (colon == std::string_view::npos) {
      throw ParseError("kv line " + std::to_string(line_no) +
                       ": expected `key: value`, got \"" + std::string(line) +
                       "\"");
    }
    const std::string_view key = trim(line.substr(0, colon));
    const std::string_view value = trim(line.substr(colon + 1));
    if (key.empty()) {
      throw ParseError("kv line " + std::to_string(line_no) + ": empty key");
    }
    out.entries_.emplace_back(std::string(key), std::string(value));
  }
  return out;
}

void KvFile::add(std::string key, std::string value) {
  entries_.emplace_back(std::move(key), std::move(value));
}

void KvFile::add_real(std::string key, double value) {
  add(std::move(key), format_real(value));
}

void KvFile::add_int(std::string key, std::int64_t value) {
  add(std::move(key), std::to_string(value));
}

const std::string* KvFile::find(std::string_view key) const {
  for (const auto& [k, v] : entries_) {
    if (k == key) return &v;
  }
  return nullptr;
}

std::optional<double> KvFile::get_real(std::string_view key) const {
  const std::string* raw = find(key);
  if (raw == nullptr) return std::nullopt;
  char* end = nullptr;
  errno = 0;
  const double value = std::strtod(raw->c_str(), &end);
  if (end != raw->c_str() + raw->size() || raw->empty() || errno == ERANGE) {
    throw ParseError("key `" + std::string(key) + "`: not a real number: \"" +
                     *raw + "\"");
  }
  return value;
}

std::optional<std::int64_t> KvFile::get_int(std::string_view key) const {
  const std::string* raw = find(key);
  if (raw == nullptr) return std::nullopt;
  char* end = nullptr;
  errno = 0;
  const long long value = std::strtoll(raw->c_str(), &end, 10);
  if (end != raw->c_str() + raw->size() || raw->empty() || errno == ERANGE) {
    throw ParseError("key `" + std::string(key) + "`: not an integer: \"" +
                     *raw + "\"");
  }
  return value;
}

std::optional<bool> KvFile::get_bool(std::string_view key) const {
  const std::string* raw = find(key);
  if (raw == nullptr) return std::nullopt;
  if (*raw == "true" || *raw == "1") return true;
  if (*raw == "false" || *raw == "0") return false;
  throw ParseError("key `" + std::string(key) + "`: not a boolean: \"" + *raw +
                   "\"");
}

std::string KvFile::text() const {
  std::string out;
  for (const auto& [k, v] : entries_) {
    out += k;
    out += ": ";
    out += v;
    out += '\n';
  }
  return out;
}

std::string format_real(double value, int significant_digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", significant_digits, value);
  return buf;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (!in.good() && !in.eof()) {
    throw Error("read failed: " + path.string());
  }
  return std::move(buf).str();
}

void write_file_atomic(const std::filesystem::path& path,
                       std::string_view bytes) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open file for writing: " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out.good()) throw Error("write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    throw Error("rename failed: " + tmp.string() + " -> " + path.string() +
                ": " + ec.message());
  }
}

std::string sanitize_file_token(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  for (char c : raw) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '-' || c == '.';
    out += ok ? c : '_';
  }
  return out.empty() ? std::string("_") : out;
}

}  // namespace roigs
