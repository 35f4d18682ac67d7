#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace roigs {

/// Ordered `key: value` text document. Lines starting with '#' and blank
/// lines are skipped on parse; duplicate keys are preserved in order.
class KvFile {
 public:
  static KvFile parse(std::string_view text);

  void add(std::string key, std::string value);
  void add_real(std::string key, double value);  // 9 significant digits
  void add_int(std::string key, std::int64_t value);

  const std::string* find(std::string_view key) const;
  bool has(std::string_view key) const { return find(key) != nullptr; }

  /// Typed lookups; throw ParseError when the key is present but malformed.
  std::optional<double> get_real(std::string_view key) const;
  std::optional<std::int64_t> get_int(std::string_view key) const;
  std::optional<bool> get_bool(std::string_view key) const;

  const std::vector<std::pair<std::string, std::string>>& entries() const {
    return entries_;
  }

  /// LF-terminated `key: value` lines in insertion order.
  std::string text() const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

std::string format_real(double value, int significant_digits = 9);

std::string read_file(const std::filesystem::path& path);

/// Write-temp-then-rename so partially written outputs are never observed.
void write_file_atomic(const std::filesystem::path& path,
                       std::string_view bytes);

std::string sanitize_file_token(std::string_view raw);

}  // namespace roigs
