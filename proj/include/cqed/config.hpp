#pragma once

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cqed/errors.hpp"
#include "cqed/rng.hpp"

// Flat human-readable key-value configuration. Keys carry explicit unit
// suffixes (frequency_ghz, linewidth_khz, ...); '#' starts a comment.
// Entry order is preserved so mode blocks keep their file order.

namespace cqed {

class Config {
 public:
  static Config parse(const std::string& text, const std::string& origin = "<string>") {
    Config cfg;
    cfg.text_ = text;
    cfg.origin_ = origin;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const std::size_t hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      const std::string trimmed = trim(line);
      if (trimmed.empty()) continue;
      const std::size_t eq = trimmed.find('=');
      if (eq == std::string::npos)
        throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected 'key = value'");
      const std::string key = trim(trimmed.substr(0, eq));
      const std::string value = trim(trimmed.substr(eq + 1));
      if (key.empty() || value.empty())
        throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty key or value");
      for (const auto& [k, v] : cfg.entries_)
        if (k == key)
          throw ConfigError(origin + ":" + std::to_string(line_no) + ": duplicate key '" + key + "'");
      cfg.entries_.emplace_back(key, value);
    }
    return cfg;
  }

  static Config load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str(), path);
  }

  bool has(const std::string& key) const { return find(key) != nullptr; }

  std::string get_string(const std::string& key) const {
    const std::string* v = find(key);
    if (!v) throw ConfigError(origin_ + ": missing key '" + key + "'");
    return *v;
  }

  std::string get_string(const std::string& key, const std::string& fallback) const {
    const std::string* v = find(key);
    return v ? *v : fallback;
  }

  double get_double(const std::string& key) const {
    const std::string* v = find(key);
    if (!v) throw ConfigError(origin_ + ": missing key '" + key + "'");
    return to_double(key, *v);
  }

  double get_double(const std::string& key, double fallback) const {
    const std::string* v = find(key);
    return v ? to_double(key, *v) : fallback;
  }

  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }
  const std::string& text() const { return text_; }
  const std::string& origin() const { return origin_; }

  // FNV-1a hash of the raw file text, quoted in every emitted CSV header.
  std::string hash_hex() const {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(CounterRng::fnv1a(text_)));
    return buf;
  }

 private:
  static std::string trim(const std::string& s) {
    const std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
  }

  double to_double(const std::string& key, const std::string& value) const {
    char* end = nullptr;
    const double parsed = std::strtod(value.c_str(), &end);
    if (end == value.c_str() || *end != '\0')
      throw ConfigError(origin_ + ": key '" + key + "': not a number: '" + value + "'");
    return parsed;
  }

  const std::string* find(const std::string& key) const {
    for (const auto& [k, v] : entries_)
      if (k == key) return &v;
    return nullptr;
  }

  std::vector<std::pair<std::string, std::string>> entries_;
  std::string text_;
  std::string origin_;
};

}  // namespace cqed
