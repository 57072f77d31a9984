#pragma once

#include <span>
#include <string>
#include <vector>

#include "dwmrpm/data/monthly.hpp"

namespace dwmrpm::data {

/// Min-max scaling onto [0, 100]: I* = (I - I_min) / (I_max - I_min) * 100.
struct NormalizationParams {
  double i_min = 0;
  double i_max = 1;

  /// Stable hex digest of the exact bit patterns of i_min and i_max.
  std::string fingerprint() const;

  friend bool operator==(const NormalizationParams&, const NormalizationParams&) = default;
};

void validate(const NormalizationParams& p);

/// Global min and max over every value of the given (training) series.
NormalizationParams fit_normalizer(std::span<const MonthlySeries> train_series);

/// Values are not clamped; out-of-range inputs map outside [0, 100].
double normalize(double mm, const NormalizationParams& p);
double denormalize(double normalized, const NormalizationParams& p);

/// Copies of the series cut after December of last_year; stations that start
/// later are dropped. This is the portion a normalizer may be fitted on.
std::vector<MonthlySeries> truncate_after_year(std::span<const MonthlySeries> series, int last_year);

}  // namespace dwmrpm::data
