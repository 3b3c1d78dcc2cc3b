#pragma once

// Locale-independent CSV output: 17 significant digits via std::to_chars,
// header row, written to a temporary file and renamed into place.

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <variant>
#include <vector>

namespace vibron::io {

using Cell = std::variant<std::string, long long, double>;

inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  if (r.ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf, r.ptr);
}

inline std::string format_cell(const Cell& c) {
  if (const auto* s = std::get_if<std::string>(&c)) {
    if (s->find_first_of(",\"\n") == std::string::npos) return *s;
    std::string q = "\"";
    for (char ch : *s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return q + "\"";
  }
  if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
  return format_double(std::get<double>(c));
}

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header) : columns_(header.size()) {
    write_row_strings(header);
  }

  template <typename... Ts>
  void row(const Ts&... cells) {
    std::vector<Cell> v{to_cell(cells)...};
    add(v);
  }

  void add(const std::vector<Cell>& cells) {
    if (cells.size() != columns_)
      throw std::invalid_argument("CsvWriter: row has " + std::to_string(cells.size()) + " cells, header has " +
                                  std::to_string(columns_));
    std::vector<std::string> s;
    for (const auto& c : cells) s.push_back(format_cell(c));
    write_row_strings(s);
  }

  std::string str() const { return out_.str(); }

  /// Atomic replace: write `path.tmp`, then rename over `path`.
  void commit(const std::filesystem::path& path) const {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
      std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
      if (!f) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
      f << out_.str();
      if (!f) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
  }

 private:
  template <typename T>
  static Cell to_cell(const T& v) {
    if constexpr (std::is_floating_point_v<T>) return Cell(double(v));
    else if constexpr (std::is_integral_v<T>) return Cell(static_cast<long long>(v));
    else return Cell(std::string(v));
  }

  void write_row_strings(const std::vector<std::string>& s) {
    for (std::size_t i = 0; i < s.size(); ++i) out_ << (i ? "," : "") << s[i];
    out_ << '\n';
  }

  std::size_t columns_;
  std::ostringstream out_;
};

}  // namespace vibron::io
