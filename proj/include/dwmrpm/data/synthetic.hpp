#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "dwmrpm/data/ingest.hpp"
#include "dwmrpm/data/monthly.hpp"

namespace dwmrpm::data {

struct ZoneProfile {
  std::string name;
  double scale = 1.0;  // multiplies the monthly profile
  double lat_min = 0, lat_max = 0, lon_min = 0, lon_max = 0;
};

/// Monsoon-peaked climatology shaped after long-run Rajasthan station means (mm).
inline constexpr std::array<double, 12> kDefaultMonthlyMeans{2.20,   2.40,   2.11,  3.78, 5.72, 41.92,
                                                             150.54, 166.05, 63.83, 7.31, 4.02, 1.04};

std::vector<ZoneProfile> default_zones();

struct SynthConfig {
  std::size_t stations = 30;
  int start_year = 1968;
  int years = 40;
  std::array<double, 12> monthly_means = kDefaultMonthlyMeans;
  std::vector<ZoneProfile> zones = default_zones();
  double noise = 0.5;           // coefficient of variation of the gamma multiplier
  double zero_inflation = 0.3;  // chance a dry-season month (Oct-May) is exactly zero
};

/// Monthly totals: profile * zone scale * Gamma(mean 1, cv noise); dry months
/// are zeroed with probability zero_inflation and survivors rescaled so every
/// calendar month keeps its configured expectation. Deterministic per seed.
std::vector<MonthlySeries> generate_synthetic(const SynthConfig& cfg, std::uint64_t seed);

struct DailySynthOptions {
  double missing_day_probability = 0.0;
  double negative_day_probability = 0.0;  // injected sensor glitches
};

/// Daily records (0.1 mm resolution) whose months follow generate_synthetic.
std::vector<RainfallRecord> generate_synthetic_daily(const SynthConfig& cfg, std::uint64_t seed,
                                                     const DailySynthOptions& options = {});

}  // namespace dwmrpm::data
