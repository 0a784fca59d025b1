#include "qls/csv.hpp"

#include <cmath>
#include <cstdio>

#include "qls/errors.hpp"

namespace qls {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : file_(std::fopen(path.c_str(), "wb")), columns_(header.size()) {
  if (!file_) throw UsageError("cannot open " + path + " for writing");
  for (std::size_t i = 0; i < header.size(); ++i) write_cell(header[i], i == 0);
  std::fputs("\r\n", file_);
}

CsvWriter::~CsvWriter() {
  if (file_) std::fclose(file_);
}

void CsvWriter::write_cell(const Cell& c, bool first) {
  if (!first) std::fputc(',', file_);
  if (const double* d = std::get_if<double>(&c))
    std::fputs(format_double(*d).c_str(), file_);
  else if (const long long* i = std::get_if<long long>(&c))
    std::fprintf(file_, "%lld", *i);
  else
    std::fputs(csv_quote(std::get<std::string>(c)).c_str(), file_);
}

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != columns_) throw UsageError("CSV row width does not match header");
  for (std::size_t i = 0; i < values.size(); ++i) write_cell(values[i], i == 0);
  std::fputs("\r\n", file_);
}

void CsvWriter::mixed_row(const std::vector<Cell>& cells) {
  if (cells.size() != columns_) throw UsageError("CSV row width does not match header");
  for (std::size_t i = 0; i < cells.size(); ++i) write_cell(cells[i], i == 0);
  std::fputs("\r\n", file_);
}

}  // namespace qls
