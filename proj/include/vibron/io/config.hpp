#pragma once

// Flat key = value files with [section] headers and '#' comments. Entries keep
// their line numbers so callers can report where a bad key came from.

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace vibron::io {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ConfigEntry {
  std::string section;  // empty for keys above the first header
  std::string key;
  std::string value;
  int line = 0;

  friend bool operator==(const ConfigEntry& a, const ConfigEntry& b) {
    return a.section == b.section && a.key == b.key && a.value == b.value;
  }
};

struct ConfigFile {
  std::string source;
  std::vector<ConfigEntry> entries;

  std::string where(const ConfigEntry& e) const { return source + ":" + std::to_string(e.line); }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline bool valid_name(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_')) return false;
  return true;
}

}  // namespace detail

inline ConfigFile parse_config(const std::string& text, const std::string& source = "<config>") {
  ConfigFile cfg{source, {}};
  std::istringstream in(text);
  std::string raw, section;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string s = detail::trim(raw);
    if (s.empty() || s[0] == '#' || s[0] == ';') continue;
    const std::string at = source + ":" + std::to_string(line) + ": ";
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError(at + "unterminated section header");
      section = detail::trim(s.substr(1, s.size() - 2));
      if (!detail::valid_name(section)) throw ConfigError(at + "invalid section name '" + section + "'");
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError(at + "expected 'key = value'");
    const std::string key = detail::trim(s.substr(0, eq));
    const std::string value = detail::trim(s.substr(eq + 1));
    if (!detail::valid_name(key)) throw ConfigError(at + "invalid key '" + key + "'");
    for (const auto& e : cfg.entries)
      if (e.section == section && e.key == key)
        throw ConfigError(at + "duplicate key '" + key + "' (first set on line " + std::to_string(e.line) + ")");
    cfg.entries.push_back({section, key, value, line});
  }
  return cfg;
}

inline ConfigFile load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError(path + ": cannot open config file");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str(), path);
}

/// Entries in their original order; a header is written whenever the section changes.
inline std::string serialize_config(const ConfigFile& cfg) {
  std::ostringstream out;
  std::string current;
  for (const auto& e : cfg.entries) {
    if (e.section != current) {
      out << (out.tellp() > 0 ? "\n" : "") << "[" << e.section << "]\n";
      current = e.section;
    }
    out << e.key << " = " << e.value << "\n";
  }
  return out.str();
}

}  // namespace vibron::io
