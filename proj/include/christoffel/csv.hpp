#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "christoffel/moments.hpp"

namespace christoffel {

struct CsvTable {
  std::vector<std::string> header;  // empty when the file has no header row
  PointMatrix data;
};

/// Comma-separated numeric table. A first row containing any non-numeric
/// field is taken as the header. Numbers are parsed without locale. Ragged
/// rows and unparsable fields raise IoError naming the line.
CsvTable parse_csv(std::istream& in, const std::string& source = "<input>");
CsvTable read_csv(const std::string& path);

/// 17 significant digits, locale-independent.
std::string format_double(double value);

void write_csv(std::ostream& out, const std::vector<std::string>& header, const PointMatrix& rows);
void write_csv_file(const std::string& path, const std::vector<std::string>& header, const PointMatrix& rows);

/// Parses "a,b,c" into doubles; throws std::invalid_argument on bad fields.
std::vector<double> parse_number_list(std::string_view text);

}  // namespace christoffel
