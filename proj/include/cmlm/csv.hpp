#pragma once

#include <cstddef>
#include <fstream>
#include <string>
#include <vector>

namespace cmlm::csv {

/// Split one line on commas. The schemas forbid quoting and embedded commas,
/// so this is a plain field split (empty fields preserved).
std::vector<std::string> split(const std::string& line);

/// Strict numeric field parsers. The whole field must be consumed and the
/// value finite; anything else raises bad_row with the offending line number.
double parse_decimal(const std::string& field, std::size_t line_no);
long parse_integer(const std::string& field, std::size_t line_no);

/// Shortest round-trip decimal formatting (17 significant digits).
std::string format_decimal(double v);

/// Line-oriented CSV reader that validates a fixed header up front and
/// hands out field vectors with 1-based line numbers.
class Reader {
 public:
  /// Opens `path` and checks the header line equals `header` exactly.
  /// Raises io_error when unreadable, missing_header on any mismatch.
  Reader(const std::string& path, const std::string& header);

  /// Reads the next data row into `fields`. Returns false at EOF.
  /// Rows with the wrong field count raise bad_row. Blank lines are
  /// rejected, except a single trailing newline at EOF.
  bool next(std::vector<std::string>& fields, std::size_t& line_no);

  bool next(std::vector<std::string>& fields) {
    std::size_t ignored = 0;
    return next(fields, ignored);
  }

  /// 1-based line number of the row most recently returned by next().
  std::size_t line() const { return line_no_; }

  const std::string& path() const { return path_; }

 private:
  std::ifstream in_;
  std::string path_;
  std::size_t n_fields_ = 0;
  std::size_t line_no_ = 1;  // header consumed in constructor
};

}  // namespace cmlm::csv
