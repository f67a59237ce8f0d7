#include "cmlm/dates.hpp"

#include <cstdio>
#include <cstdlib>

namespace cmlm::dates {

namespace {

bool all_digits(const std::string& s, size_t from, size_t to) {
  for (size_t i = from; i < to; ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
  }
  return true;
}

bool is_leap(int year) {
  return (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
}

int days_in_month(int year, int month) {
  static const int days[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (month == 2 && is_leap(year)) return 29;
  return days[month - 1];
}

}  // namespace

bool is_month(const std::string& s) {
  if (s.size() != 7 || s[4] != '-') return false;
  if (!all_digits(s, 0, 4) || !all_digits(s, 5, 7)) return false;
  int m = std::atoi(s.c_str() + 5);
  return m >= 1 && m <= 12;
}

bool is_iso_date(const std::string& s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
  if (!all_digits(s, 0, 4) || !all_digits(s, 5, 7) || !all_digits(s, 8, 10)) return false;
  int y = std::atoi(s.substr(0, 4).c_str());
  int m = std::atoi(s.c_str() + 5);
  int d = std::atoi(s.c_str() + 8);
  if (m < 1 || m > 12) return false;
  return d >= 1 && d <= days_in_month(y, m);
}

std::string month_of_date(const std::string& iso_date) {
  return iso_date.substr(0, 7);
}

int month_index(const std::string& month) {
  int y = std::atoi(month.substr(0, 4).c_str());
  int m = std::atoi(month.c_str() + 5);
  return y * 12 + (m - 1);
}

std::string month_from_index(int index) {
  int y = index / 12;
  int m = index % 12 + 1;
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d", y, m);
  return std::string(buf);
}

std::string end_of_month(const std::string& month) {
  int y = std::atoi(month.substr(0, 4).c_str());
  int m = std::atoi(month.c_str() + 5);
  char buf[11];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", y, m, days_in_month(y, m));
  return std::string(buf);
}

}  // namespace cmlm::dates
