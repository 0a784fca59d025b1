#pragma once

#include <cstdio>
#include <string>
#include <variant>
#include <vector>

namespace qls {

/// RFC-4180 writer; numbers use 17 significant digits and '.' as separator.
class CsvWriter {
 public:
  using Cell = std::variant<double, long long, std::string>;

  CsvWriter(const std::string& path, const std::vector<std::string>& header);
  ~CsvWriter();
  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;

  void row(const std::vector<double>& values);
  void mixed_row(const std::vector<Cell>& cells);

 private:
  void write_cell(const Cell& c, bool first);
  std::FILE* file_;
  std::size_t columns_;
};

std::string format_double(double x);
std::string csv_quote(const std::string& s);

}  // namespace qls
