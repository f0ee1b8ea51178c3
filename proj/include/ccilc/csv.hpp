#pragma once

#include <string>
#include <vector>

namespace ccilc {

// Shortest decimal representation that parses back to the exact double.
std::string format_double(double value);

double parse_double(const std::string& text);

struct CsvTable {
  std::vector<std::string> header;  // empty when the first row was numeric
  std::vector<std::vector<std::string>> rows;

  int column_index(const std::string& name) const;
};

CsvTable read_csv(const std::string& path);

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

}  // namespace ccilc
