// SPDX-License-Identifier: Apache-2.0

#include "rissim/textconfig.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace rissim {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

}  // namespace

TextConfig TextConfig::parse(const std::string& text) {
  TextConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3)
        throw ConfigError("config line " + std::to_string(lineno) + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      cfg.data_[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    cfg.data_[section][key] = value;
  }
  return cfg;
}

TextConfig TextConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

bool TextConfig::has(const std::string& section, const std::string& key) const {
  const auto s = data_.find(section);
  return s != data_.end() && s->second.count(key) > 0;
}

std::string TextConfig::get(const std::string& section, const std::string& key) const {
  const auto s = data_.find(section);
  if (s != data_.end()) {
    const auto k = s->second.find(key);
    if (k != s->second.end()) return k->second;
  }
  throw ConfigError("missing config key [" + section + "] " + key);
}

std::string TextConfig::get_or(const std::string& section, const std::string& key,
                               const std::string& fallback) const {
  return has(section, key) ? get(section, key) : fallback;
}

namespace {

int64_t parse_int(const std::string& raw, const std::string& what) {
  char* end = nullptr;
  const long long v = std::strtoll(raw.c_str(), &end, 0);
  if (end == raw.c_str() || *end != '\0')
    throw ConfigError("config value for " + what + " is not an integer: " + raw);
  return v;
}

uint64_t parse_uint(const std::string& raw, const std::string& what) {
  char* end = nullptr;
  const unsigned long long v = std::strtoull(raw.c_str(), &end, 0);
  if (end == raw.c_str() || *end != '\0')
    throw ConfigError("config value for " + what + " is not an unsigned integer: " + raw);
  return v;
}

double parse_double(const std::string& raw, const std::string& what) {
  char* end = nullptr;
  const double v = std::strtod(raw.c_str(), &end);
  if (end == raw.c_str() || *end != '\0')
    throw ConfigError("config value for " + what + " is not a number: " + raw);
  return v;
}

}  // namespace

int64_t TextConfig::get_int(const std::string& section, const std::string& key) const {
  return parse_int(get(section, key), "[" + section + "] " + key);
}

int64_t TextConfig::get_int_or(const std::string& section, const std::string& key,
                               int64_t fallback) const {
  return has(section, key) ? get_int(section, key) : fallback;
}

uint64_t TextConfig::get_uint(const std::string& section, const std::string& key) const {
  return parse_uint(get(section, key), "[" + section + "] " + key);
}

uint64_t TextConfig::get_uint_or(const std::string& section, const std::string& key,
                                 uint64_t fallback) const {
  return has(section, key) ? get_uint(section, key) : fallback;
}

double TextConfig::get_double(const std::string& section, const std::string& key) const {
  return parse_double(get(section, key), "[" + section + "] " + key);
}

double TextConfig::get_double_or(const std::string& section, const std::string& key,
                                 double fallback) const {
  return has(section, key) ? get_double(section, key) : fallback;
}

bool TextConfig::get_bool_or(const std::string& section, const std::string& key,
                             bool fallback) const {
  if (!has(section, key)) return fallback;
  const std::string v = get(section, key);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("config value for [" + section + "] " + key + " is not a boolean: " + v);
}

std::vector<std::string> TextConfig::get_list(const std::string& section,
                                              const std::string& key) const {
  const std::string raw = get(section, key);
  std::vector<std::string> out;
  std::string item;
  int depth = 0;  // commas inside parentheses, e.g. omp(16,8), do not split
  for (char c : raw) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ',' && depth == 0) {
      const std::string t = trim(item);
      if (!t.empty()) out.push_back(t);
      item.clear();
    } else {
      item.push_back(c);
    }
  }
  const std::string t = trim(item);
  if (!t.empty()) out.push_back(t);
  return out;
}

std::vector<int> TextConfig::get_int_list(const std::string& section,
                                          const std::string& key) const {
  std::vector<int> out;
  for (const auto& item : get_list(section, key))
    out.push_back(static_cast<int>(parse_int(item, "[" + section + "] " + key)));
  return out;
}

std::vector<std::string> TextConfig::sections() const {
  std::vector<std::string> out;
  out.reserve(data_.size());
  for (const auto& [name, _] : data_) out.push_back(name);
  return out;
}

void TextConfig::set(const std::string& section, const std::string& key,
                     const std::string& value) {
  data_[section][key] = value;
}

std::string TextConfig::serialize() const {
  std::ostringstream out;
  bool first = true;
  for (const auto& [section, kv] : data_) {
    if (!first) out << "\n";
    first = false;
    out << "[" << section << "]\n";
    for (const auto& [key, value] : kv) out << key << " = " << value << "\n";
  }
  return out.str();
}

void TextConfig::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write config file: " + path);
  out << serialize();
}

}  // namespace rissim
