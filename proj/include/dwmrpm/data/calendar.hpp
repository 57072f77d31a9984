#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace dwmrpm::data {

struct YearMonth {
  int year = 0;
  int month = 1;  // 1..12

  /// Months since year 0, so consecutive months differ by one.
  int index() const { return year * 12 + (month - 1); }
  static YearMonth from_index(int index) { return {index / 12, index % 12 + 1}; }
  YearMonth plus(int months) const { return from_index(index() + months); }

  auto operator<=>(const YearMonth&) const = default;
};

struct Date {
  int year = 0;
  int month = 1;
  int day = 1;

  YearMonth year_month() const { return {year, month}; }
  auto operator<=>(const Date&) const = default;
};

inline bool is_leap_year(int year) { return (year % 4 == 0 && year % 100 != 0) || year % 400 == 0; }

inline int days_in_month(int year, int month) {
  static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  return month == 2 && is_leap_year(year) ? 29 : kDays[month - 1];
}

inline bool is_monsoon_month(int month) { return month >= 6 && month <= 9; }

/// Strict YYYY-MM-DD; rejects impossible calendar dates.
std::optional<Date> parse_date(std::string_view text);
std::string format_date(const Date& d);

const char* month_abbrev(int month);  // "Jan".."Dec"
const char* month_name(int month);    // "January".."December"

}  // namespace dwmrpm::data
