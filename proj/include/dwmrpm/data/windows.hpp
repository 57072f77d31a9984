#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "dwmrpm/data/normalize.hpp"

namespace dwmrpm::data {

inline constexpr std::size_t kDefaultWindowMonths = 108;

/// One example: the normalized months preceding the target (oldest first),
/// then raw latitude and longitude.
struct WindowSample {
  std::vector<double> inputs;
  double target = 0;     // normalized
  double target_mm = 0;  // raw monthly total
  std::string station_id;
  double latitude = 0;
  double longitude = 0;
  YearMonth target_month;
};

/// Emits one sample per June..September month that has window_months
/// predecessors. Short series yield no samples.
std::vector<WindowSample> build_windows(const MonthlySeries& series, const NormalizationParams& p,
                                        std::size_t window_months = kDefaultWindowMonths);

struct YearRange {
  int first = 0;
  int last = 0;

  bool contains(int year) const { return year >= first && year <= last; }
  bool overlaps(const YearRange& o) const { return first <= o.last && o.first <= last; }
  friend bool operator==(const YearRange&, const YearRange&) = default;
};

YearRange parse_year_range(const std::string& text);  // "A:B"
std::string to_string(const YearRange& r);

struct SplitYears {
  YearRange train;
  YearRange validation;
  YearRange test;
};

/// Station-data protocol: train 1957-1986, validate 1987-1997, test 1998-2017.
inline constexpr SplitYears kWrdSplit{{1957, 1986}, {1987, 1997}, {1998, 2017}};
/// Gridded-data protocol: train 1901-1980, validate 1981-1995, test 1996-2018.
inline constexpr SplitYears kImdSplit{{1901, 1980}, {1981, 1995}, {1996, 2018}};

struct DatasetSplit {
  std::vector<WindowSample> train;
  std::vector<WindowSample> validation;
  std::vector<WindowSample> test;
  SplitYears years;
  std::size_t discarded = 0;  // samples whose target year is in no range
};

/// Assigns each sample by its target year. Overlapping ranges are a contract error.
DatasetSplit split_by_years(std::vector<WindowSample> samples, const SplitYears& years);

}  // namespace dwmrpm::data
