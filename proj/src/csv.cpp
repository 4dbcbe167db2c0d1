#include "christoffel/csv.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "christoffel/errors.hpp"

namespace christoffel {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::optional<double> to_number(std::string_view field) {
  if (field.empty()) return std::nullopt;
  if (field.front() == '+') field.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size()) return std::nullopt;
  return v;
}

}  // namespace

CsvTable parse_csv(std::istream& in, const std::string& source) {
  CsvTable table;
  std::vector<double> values;
  std::size_t width = 0;
  std::size_t rows = 0;
  std::string line;
  std::size_t line_no = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    const auto content = trim(line);
    if (content.empty()) continue;
    const auto fields = split(content);
    if (first) {
      first = false;
      width = fields.size();
      bool numeric = true;
      for (auto f : fields) numeric = numeric && to_number(f).has_value();
      if (!numeric) {
        for (auto f : fields) table.header.emplace_back(f);
        continue;
      }
    }
    if (fields.size() != width) {
      throw IoError(source + ":" + std::to_string(line_no) + ": expected " + std::to_string(width) +
                    " fields, found " + std::to_string(fields.size()));
    }
    for (std::size_t j = 0; j < fields.size(); ++j) {
      const auto v = to_number(fields[j]);
      if (!v) {
        throw IoError(source + ":" + std::to_string(line_no) + ": field " + std::to_string(j + 1) +
                      " is not a number: '" + std::string(fields[j]) + "'");
      }
      values.push_back(*v);
    }
    ++rows;
  }
  if (in.bad()) throw IoError(source + ": read error");
  if (rows == 0) throw IoError(source + ": no data rows");
  table.data = Eigen::Map<PointMatrix>(values.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(width));
  return table;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return parse_csv(in, path);
}

std::string format_double(double value) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::general, 17);
  if (ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf.data(), ptr);
}

void write_csv(std::ostream& out, const std::vector<std::string>& header, const PointMatrix& rows) {
  if (!header.empty()) {
    for (std::size_t j = 0; j < header.size(); ++j) out << (j ? "," : "") << header[j];
    out << '\n';
  }
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    for (Eigen::Index j = 0; j < rows.cols(); ++j) out << (j ? "," : "") << format_double(rows(i, j));
    out << '\n';
  }
}

void write_csv_file(const std::string& path, const std::vector<std::string>& header, const PointMatrix& rows) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write_csv(out, header, rows);
  if (!out) throw IoError("write to '" + path + "' failed");
}

std::vector<double> parse_number_list(std::string_view text) {
  std::vector<double> out;
  if (trim(text).empty()) return out;
  for (auto f : split(text)) {
    const auto v = to_number(f);
    if (!v) throw std::invalid_argument("not a number: '" + std::string(f) + "'");
    out.push_back(*v);
  }
  return out;
}

}  // namespace christoffel
