#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cqed/errors.hpp"

// CSV emission and ingestion. Every file starts with '#' comment lines
// naming the tool version, the generating config hash and one
// "# col: name [unit]" line per column; the data is comma-separated with
// '.' decimal point regardless of locale. Values print through %.12g so a
// fixed seed reproduces files byte for byte.

namespace cqed {

struct CsvColumn {
  std::string name;
  std::string unit;
  std::vector<double> values;
};

struct CsvTable {
  std::vector<std::string> comments;  // extra header lines (no leading '#')
  std::vector<CsvColumn> columns;

  std::size_t rows() const { return columns.empty() ? 0 : columns.front().values.size(); }

  const CsvColumn& column(const std::string& name) const {
    for (const auto& c : columns)
      if (c.name == name) return c;
    throw ConfigError("csv: no column named '" + name + "'");
  }
};

inline std::string format_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string to_csv_text(const CsvTable& table) {
  for (const auto& c : table.columns)
    if (c.values.size() != table.rows())
      throw ConfigError("csv: column '" + c.name + "' has mismatched length");

  std::ostringstream out;
  for (const auto& line : table.comments) out << "# " << line << "\n";
  for (const auto& c : table.columns)
    out << "# col: " << c.name << " [" << (c.unit.empty() ? "1" : c.unit) << "]\n";
  for (std::size_t r = 0; r < table.rows(); ++r) {
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      if (c) out << ",";
      out << format_value(table.columns[c].values[r]);
    }
    out << "\n";
  }
  return out.str();
}

inline void write_csv(const std::string& path, const CsvTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << to_csv_text(table);
}

// Reads the schema this writer emits. Malformed rows are rejected with the
// offending line number.
inline CsvTable read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "'");

  CsvTable table;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      const std::string body = line.substr(1);
      const std::size_t col = body.find("col:");
      if (col != std::string::npos) {
        std::string decl = body.substr(col + 4);
        const std::size_t bracket = decl.find('[');
        std::string name = decl.substr(0, bracket == std::string::npos ? decl.size() : bracket);
        std::string unit;
        if (bracket != std::string::npos) {
          const std::size_t close = decl.find(']', bracket);
          if (close == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(line_no) + ": unterminated unit");
          unit = decl.substr(bracket + 1, close - bracket - 1);
        }
        const std::size_t a = name.find_first_not_of(" \t");
        const std::size_t b = name.find_last_not_of(" \t");
        if (a == std::string::npos)
          throw ConfigError(path + ":" + std::to_string(line_no) + ": empty column name");
        table.columns.push_back({name.substr(a, b - a + 1), unit, {}});
      } else {
        const std::size_t a = body.find_first_not_of(" \t");
        if (a != std::string::npos) table.comments.push_back(body.substr(a));
      }
      continue;
    }

    std::vector<double> row;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      const std::string cell = line.substr(start, comma == std::string::npos ? std::string::npos
                                                                             : comma - start);
      char* end = nullptr;
      const double value = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str() || *end != '\0')
        throw ConfigError(path + ":" + std::to_string(line_no) + ": bad number '" + cell + "'");
      row.push_back(value);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (table.columns.empty())
      for (std::size_t i = 0; i < row.size(); ++i)
        table.columns.push_back({"col" + std::to_string(i), "", {}});
    if (row.size() != table.columns.size())
      throw ConfigError(path + ":" + std::to_string(line_no) + ": expected " +
                        std::to_string(table.columns.size()) + " cells, got " +
                        std::to_string(row.size()));
    for (std::size_t i = 0; i < row.size(); ++i) table.columns[i].values.push_back(row[i]);
  }
  return table;
}

}  // namespace cqed
