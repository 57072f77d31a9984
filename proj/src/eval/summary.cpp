#include "dwmrpm/eval/summary.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <ostream>

#include "dwmrpm/core/errors.hpp"
#include "dwmrpm/data/csv.hpp"

namespace dwmrpm::eval {

namespace {

SummaryRow summarize(std::string label, const std::vector<double>& values) {
  SummaryRow row{std::move(label), 0, 0, 0, values.size()};
  if (values.empty()) return row;
  double sum = 0;
  for (double v : values) sum += v;
  row.mean = sum / static_cast<double>(values.size());
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  row.min = *lo;
  row.max = *hi;
  return row;
}

}  // namespace

StatisticalSummary statistical_summary(std::span<const data::MonthlySeries> series) {
  std::array<std::vector<double>, 12> by_month;
  std::vector<double> season;
  bool complete_year = false;
  for (const auto& s : series) {
    // Per year: Jun-Sep values seen so far.
    std::map<int, std::pair<int, double>> monsoon;
    std::map<int, int> months_in_year;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const auto ym = s.month_at(i);
      by_month[static_cast<std::size_t>(ym.month - 1)].push_back(s.values[i]);
      if (++months_in_year[ym.year] == 12) complete_year = true;
      if (data::is_monsoon_month(ym.month)) {
        auto& [n, total] = monsoon[ym.year];
        ++n;
        total += s.values[i];
      }
    }
    for (const auto& [year, entry] : monsoon)
      if (entry.first == 4) season.push_back(entry.second);
  }
  if (!complete_year) throw ContractError("statistical summary needs at least one complete calendar year");

  StatisticalSummary out;
  for (int m = 1; m <= 12; ++m) {
    const auto& values = by_month[static_cast<std::size_t>(m - 1)];
    if (!values.empty()) out.months.push_back(summarize(data::month_name(m), values));
  }
  out.season = summarize("Annual/Season total", season);
  return out;
}

StatisticalSummary statistical_summary(const data::MonthlySeries& series) {
  return statistical_summary(std::span<const data::MonthlySeries>(&series, 1));
}

void write_summary_csv(std::ostream& out, const StatisticalSummary& summary) {
  out << "Month,Mean,Max,Min\n";
  auto line = [&](const SummaryRow& r) {
    out << r.label << ',' << data::format_double(r.mean) << ',' << data::format_double(r.max) << ','
        << data::format_double(r.min) << '\n';
  };
  for (const auto& r : summary.months) line(r);
  line(summary.season);
}

}  // namespace dwmrpm::eval
