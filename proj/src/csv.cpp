#include "cmlm/csv.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "cmlm/errors.hpp"

namespace cmlm::csv {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

double parse_decimal(const std::string& field, std::size_t line_no) {
  if (field.empty()) {
    fail(errc::bad_row, "line " + std::to_string(line_no) + ": empty numeric field");
  }
  errno = 0;
  char* end = nullptr;
  double v = std::strtod(field.c_str(), &end);
  if (errno != 0 || end != field.c_str() + field.size() || !std::isfinite(v)) {
    fail(errc::bad_row,
         "line " + std::to_string(line_no) + ": bad decimal '" + field + "'");
  }
  return v;
}

long parse_integer(const std::string& field, std::size_t line_no) {
  if (field.empty()) {
    fail(errc::bad_row, "line " + std::to_string(line_no) + ": empty integer field");
  }
  errno = 0;
  char* end = nullptr;
  long v = std::strtol(field.c_str(), &end, 10);
  if (errno != 0 || end != field.c_str() + field.size()) {
    fail(errc::bad_row,
         "line " + std::to_string(line_no) + ": bad integer '" + field + "'");
  }
  return v;
}

std::string format_decimal(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

Reader::Reader(const std::string& path, const std::string& header) : path_(path) {
  in_.open(path);
  if (!in_.is_open()) {
    fail(errc::io_error, "cannot open '" + path + "'");
  }
  std::string first;
  if (!std::getline(in_, first)) {
    fail(errc::missing_header, "'" + path + "': empty file, expected header '" + header + "'");
  }
  if (!first.empty() && first.back() == '\r') first.pop_back();
  if (first != header) {
    fail(errc::missing_header,
         "'" + path + "': expected header '" + header + "', got '" + first + "'");
  }
  n_fields_ = split(header).size();
}

bool Reader::next(std::vector<std::string>& fields, std::size_t& line_no) {
  std::string line;
  if (!std::getline(in_, line)) return false;
  ++line_no_;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line.empty()) {
    // Allow a single trailing newline; anything else is a malformed row.
    if (in_.peek() == EOF) return false;
    fail(errc::bad_row, "'" + path_ + "' line " + std::to_string(line_no_) + ": blank line");
  }
  fields = split(line);
  if (fields.size() != n_fields_) {
    fail(errc::bad_row, "'" + path_ + "' line " + std::to_string(line_no_) + ": expected " +
                            std::to_string(n_fields_) + " fields, got " +
                            std::to_string(fields.size()));
  }
  line_no = line_no_;
  return true;
}

}  // namespace cmlm::csv
