#pragma once

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace polinflux {

using Cell = std::variant<std::monostate, std::string, double>;

/// Rectangular result table. Metadata lines precede the CSV header as
/// "# key=value" comments.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<std::string> metadata;

  void add(std::vector<Cell> row) { rows.push_back(std::move(row)); }
};

namespace detail {

inline std::string format_double(double v, int significant) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", significant, v);
  return buf;
}

inline std::string format_fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  std::string s = buf;
  if (s.find_first_not_of("-0.") == std::string::npos && s.front() == '-') s.erase(0, 1);  // "-0.0000"
  return s;
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace detail

/// Round-trip CSV: doubles carry 17 significant digits.
inline void write_csv(const Table& t, std::ostream& out) {
  for (const auto& m : t.metadata) out << "# " << m << '\n';
  for (std::size_t c = 0; c < t.columns.size(); ++c) out << (c ? "," : "") << detail::csv_escape(t.columns[c]);
  out << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out << ',';
      if (const auto* d = std::get_if<double>(&row[c]))
        out << detail::format_double(*d, 17);
      else if (const auto* s = std::get_if<std::string>(&row[c]))
        out << detail::csv_escape(*s);
    }
    out << '\n';
  }
}

/// Aligned, human-readable table with 4 decimals.
inline void write_text(const Table& t, std::ostream& out) {
  std::vector<std::vector<std::string>> cells;
  cells.push_back(t.columns);
  for (const auto& row : t.rows) {
    std::vector<std::string> line;
    for (const auto& c : row) {
      if (const auto* d = std::get_if<double>(&c))
        line.push_back(detail::format_fixed(*d, 4));
      else if (const auto* s = std::get_if<std::string>(&c))
        line.push_back(*s);
      else
        line.emplace_back();
    }
    cells.push_back(std::move(line));
  }
  std::vector<std::size_t> width(t.columns.size(), 0);
  for (const auto& line : cells)
    for (std::size_t c = 0; c < line.size() && c < width.size(); ++c) width[c] = std::max(width[c], line[c].size());

  for (const auto& m : t.metadata) out << m << '\n';
  for (const auto& line : cells) {
    for (std::size_t c = 0; c < line.size() && c < width.size(); ++c) {
      if (c) out << "  ";
      out << std::string(width[c] - line[c].size(), ' ') << line[c];
    }
    out << '\n';
  }
}

}  // namespace polinflux
