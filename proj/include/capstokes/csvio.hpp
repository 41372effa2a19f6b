/// @file csvio.hpp
/// @brief Deterministic CSV formatting: fixed column order, 17 significant
///        digits for floating point, LF line endings regardless of platform.

#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "capstokes/errors.hpp"

namespace capstokes {

/// Shortest representation that round-trips a double (up to 17 significant
/// digits). Deterministic across runs; no locale dependence.
inline std::string format_double(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

class CsvWriter {
public:
  CsvWriter(const std::string& path, const std::vector<std::string>& columns,
            const std::vector<std::string>& header_comments = {})
      : out_(path, std::ios::binary) {
    if (!out_) throw ValidationError("cannot open CSV output file: " + path);
    for (const auto& c : header_comments) out_ << "# " << c << "\n";
    for (std::size_t i = 0; i < columns.size(); ++i)
      out_ << (i ? "," : "") << columns[i];
    out_ << "\n";
    ncol_ = columns.size();
  }

  void row(const std::vector<double>& values) {
    if (values.size() != ncol_)
      throw ValidationError("CSV row width does not match header");
    for (std::size_t i = 0; i < values.size(); ++i)
      out_ << (i ? "," : "") << format_double(values[i]);
    out_ << "\n";
  }

  void flush() { out_.flush(); }

private:
  std::ofstream out_;
  std::size_t ncol_ = 0;
};

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  int column_index(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
      if (columns[i] == name) return static_cast<int>(i);
    return -1;
  }
  std::vector<double> column(const std::string& name) const {
    int j = column_index(name);
    if (j < 0) throw ValidationError("CSV column not found: " + name);
    std::vector<double> v;
    v.reserve(rows.size());
    for (const auto& r : rows) v.push_back(r[static_cast<std::size_t>(j)]);
    return v;
  }
};

/// Reads a numeric CSV with optional '#' comment lines and a header row.
inline CsvTable read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open CSV input file: " + path);
  CsvTable t;
  std::string line;
  bool have_header = false;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!have_header) {
      // A header row is any row whose first cell does not parse as a number.
      double dummy;
      auto first = cells.empty() ? std::string() : cells[0];
      auto res = std::from_chars(first.data(), first.data() + first.size(), dummy);
      if (res.ec != std::errc() || res.ptr != first.data() + first.size()) {
        t.columns = cells;
        have_header = true;
        continue;
      }
      have_header = true; // headerless numeric file
    }
    std::vector<double> vals;
    vals.reserve(cells.size());
    for (const auto& c : cells) {
      double v = 0;
      auto res = std::from_chars(c.data(), c.data() + c.size(), v);
      if (res.ec != std::errc())
        throw ValidationError(path + ":" + std::to_string(lineno) +
                              ": cannot parse numeric cell '" + c + "'");
      vals.push_back(v);
    }
    t.rows.push_back(std::move(vals));
  }
  return t;
}

} // namespace capstokes
