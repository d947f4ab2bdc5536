// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace rissim {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Minimal INI-style configuration: `[section]` headers, `key = value` lines,
/// `#` comments. Used for CSI-RS configs, scenario files and experiment plans.
class TextConfig {
 public:
  static TextConfig parse(const std::string& text);
  static TextConfig load(const std::string& path);

  bool has(const std::string& section, const std::string& key) const;

  std::string get(const std::string& section, const std::string& key) const;
  std::string get_or(const std::string& section, const std::string& key,
                     const std::string& fallback) const;

  int64_t get_int(const std::string& section, const std::string& key) const;
  int64_t get_int_or(const std::string& section, const std::string& key, int64_t fallback) const;
  uint64_t get_uint(const std::string& section, const std::string& key) const;
  uint64_t get_uint_or(const std::string& section, const std::string& key,
                       uint64_t fallback) const;
  double get_double(const std::string& section, const std::string& key) const;
  double get_double_or(const std::string& section, const std::string& key,
                       double fallback) const;
  bool get_bool_or(const std::string& section, const std::string& key, bool fallback) const;

  /// Comma-separated list value.
  std::vector<std::string> get_list(const std::string& section, const std::string& key) const;
  std::vector<int> get_int_list(const std::string& section, const std::string& key) const;

  std::vector<std::string> sections() const;

  void set(const std::string& section, const std::string& key, const std::string& value);
  std::string serialize() const;
  void save(const std::string& path) const;

 private:
  std::map<std::string, std::map<std::string, std::string>> data_;
};

}  // namespace rissim
