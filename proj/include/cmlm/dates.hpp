#pragma once

#include <string>

namespace cmlm::dates {

/// True for a well-formed ISO-8601 calendar date `YYYY-MM-DD` (leap years honored).
bool is_iso_date(const std::string& s);

/// True for a well-formed month key `YYYY-MM`.
bool is_month(const std::string& s);

/// Month key of an ISO date ("1992-03-31" -> "1992-03"). Input must be valid.
std::string month_of_date(const std::string& iso_date);

/// Linear month index (year*12 + month-1) of a `YYYY-MM` key.
int month_index(const std::string& month);

/// Inverse of month_index.
std::string month_from_index(int index);

/// Last calendar day of a month, as an ISO date ("1992-02" -> "1992-02-29").
std::string end_of_month(const std::string& month);

}  // namespace cmlm::dates
