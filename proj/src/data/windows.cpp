#include "dwmrpm/data/windows.hpp"

#include "dwmrpm/core/errors.hpp"
#include "dwmrpm/data/csv.hpp"

namespace dwmrpm::data {

std::vector<WindowSample> build_windows(const MonthlySeries& series, const NormalizationParams& p,
                                        std::size_t window_months) {
  validate(p);
  if (window_months == 0) throw InvalidParameter("window length must be positive");
  std::vector<WindowSample> out;
  if (series.size() <= window_months) return out;

  std::vector<double> normalized(series.size());
  for (std::size_t i = 0; i < series.size(); ++i) normalized[i] = normalize(series.values[i], p);

  for (std::size_t t = window_months; t < series.size(); ++t) {
    const auto ym = series.month_at(t);
    if (!is_monsoon_month(ym.month)) continue;
    WindowSample s;
    s.inputs.reserve(window_months + 2);
    s.inputs.assign(normalized.begin() + static_cast<std::ptrdiff_t>(t - window_months),
                    normalized.begin() + static_cast<std::ptrdiff_t>(t));
    s.inputs.push_back(series.latitude);
    s.inputs.push_back(series.longitude);
    s.target = normalized[t];
    s.target_mm = series.values[t];
    s.station_id = series.station_id;
    s.latitude = series.latitude;
    s.longitude = series.longitude;
    s.target_month = ym;
    out.push_back(std::move(s));
  }
  return out;
}

YearRange parse_year_range(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw InvalidParameter("year range must look like A:B, got '" + text + "'");
  const auto a = parse_int(std::string_view(text).substr(0, colon));
  const auto b = parse_int(std::string_view(text).substr(colon + 1));
  if (!a || !b || *a > *b) throw InvalidParameter("invalid year range '" + text + "'");
  return {*a, *b};
}

std::string to_string(const YearRange& r) { return std::to_string(r.first) + ":" + std::to_string(r.last); }

DatasetSplit split_by_years(std::vector<WindowSample> samples, const SplitYears& years) {
  if (years.train.overlaps(years.validation) || years.train.overlaps(years.test) ||
      years.validation.overlaps(years.test))
    throw ContractError("split year ranges overlap: train " + to_string(years.train) + ", validation " +
                        to_string(years.validation) + ", test " + to_string(years.test));
  DatasetSplit split;
  split.years = years;
  for (auto& s : samples) {
    const int y = s.target_month.year;
    if (years.train.contains(y))
      split.train.push_back(std::move(s));
    else if (years.validation.contains(y))
      split.validation.push_back(std::move(s));
    else if (years.test.contains(y))
      split.test.push_back(std::move(s));
    else
      ++split.discarded;
  }
  return split;
}

}  // namespace dwmrpm::data
