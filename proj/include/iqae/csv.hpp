// CSV helpers: shortest round-trip formatting of doubles and a small reader
// with line-number diagnostics for the render pipeline.
#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace iqae {

// Shortest decimal form that parses back to exactly the same double.
inline std::string format_double(double value) {
  if (std::isnan(value)) return "NaN";
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

struct CsvParseError : std::runtime_error {
  CsvParseError(std::size_t line_number, const std::string& message)
      : std::runtime_error("line " + std::to_string(line_number) + ": " +
                          message),
        line(line_number) {}
  std::size_t line;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;  // same arity as header

  std::size_t column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    throw CsvParseError(1, "missing column '" + name + "'");
  }
};

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

// Reads a simple unquoted CSV; every row must match the header arity.
inline CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields = split_csv_line(line);
    if (table.header.empty()) {
      table.header = std::move(fields);
      continue;
    }
    if (fields.size() != table.header.size()) {
      throw CsvParseError(line_number,
                          "expected " + std::to_string(table.header.size()) +
                              " fields, got " + std::to_string(fields.size()));
    }
    table.rows.push_back(std::move(fields));
  }
  if (table.header.empty()) throw CsvParseError(1, "empty file");
  return table;
}

// Numeric field parser; accepts "NaN" for missing heatmap values.
inline double parse_csv_double(const std::string& field, std::size_t line_number) {
  if (field == "NaN" || field == "nan") {
    return std::numeric_limits<double>::quiet_NaN();
  }
  double value = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  const auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc() || res.ptr != last) {
    throw CsvParseError(line_number, "not a number: '" + field + "'");
  }
  return value;
}

inline std::int64_t parse_csv_int(const std::string& field,
                                  std::size_t line_number) {
  std::int64_t value = 0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  const auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc() || res.ptr != last) {
    throw CsvParseError(line_number, "not an integer: '" + field + "'");
  }
  return value;
}

}  // namespace iqae
