#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "dwmrpm/data/monthly.hpp"

namespace dwmrpm::eval {

struct SummaryRow {
  std::string label;
  double mean = 0;
  double max = 0;
  double min = 0;
  std::size_t count = 0;  // station-years contributing
};

/// Twelve calendar-month rows plus a season row of June-September totals.
struct StatisticalSummary {
  std::vector<SummaryRow> months;  // January..December, months with no data omitted
  SummaryRow season;               // only years with all four monsoon months
};

/// Mean, maximum and minimum of each calendar month over every year of every
/// given series. Needs at least one complete calendar year overall.
StatisticalSummary statistical_summary(std::span<const data::MonthlySeries> series);
StatisticalSummary statistical_summary(const data::MonthlySeries& series);

// Month,Mean,Max,Min then the "Annual/Season total" row.
void write_summary_csv(std::ostream& out, const StatisticalSummary& summary);

}  // namespace dwmrpm::eval
