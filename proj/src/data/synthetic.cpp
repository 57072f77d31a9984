#include "dwmrpm/data/synthetic.hpp"

#include <cmath>
#include <cstdio>
#include <random>

#include "dwmrpm/core/errors.hpp"
#include "dwmrpm/core/random.hpp"

namespace dwmrpm::data {

std::vector<ZoneProfile> default_zones() {
  return {{"North-West Desert", 0.6, 26.5, 30.0, 70.0, 74.5},
          {"Central Aravalli Hill", 1.0, 23.5, 26.5, 72.5, 75.0},
          {"Eastern Plains", 1.1, 25.5, 28.0, 75.5, 77.8},
          {"South-Eastern Plateau", 1.4, 23.5, 25.5, 75.0, 77.5}};
}

namespace {

void check(const SynthConfig& cfg) {
  if (cfg.stations == 0 || cfg.years <= 0) throw ContractError("synthetic span must have stations > 0 and years > 0");
  if (cfg.zones.empty()) throw ContractError("synthetic config needs at least one zone");
  if (cfg.noise < 0 || cfg.zero_inflation < 0 || cfg.zero_inflation >= 1)
    throw InvalidParameter("synthetic noise must be >= 0 and zero_inflation in [0, 1)");
}

double round_to(double v, double step) { return std::round(v / step) * step; }

}  // namespace

std::vector<MonthlySeries> generate_synthetic(const SynthConfig& cfg, std::uint64_t seed) {
  check(cfg);
  std::vector<MonthlySeries> out;
  out.reserve(cfg.stations);
  for (std::size_t s = 0; s < cfg.stations; ++s) {
    Rng rng(derive_seed(seed, s));
    const auto& zone = cfg.zones[s % cfg.zones.size()];
    std::uniform_real_distribution<double> lat(zone.lat_min, zone.lat_max), lon(zone.lon_min, zone.lon_max);

    MonthlySeries series;
    char id[32];
    std::snprintf(id, sizeof id, "SYN%03zu", s + 1);
    series.station_id = id;
    series.latitude = round_to(lat(rng), 0.001);
    series.longitude = round_to(lon(rng), 0.001);
    series.zone = zone.name;
    series.start = {cfg.start_year, 1};

    const double shape = cfg.noise > 0 ? 1.0 / (cfg.noise * cfg.noise) : 0.0;
    std::gamma_distribution<double> gamma(cfg.noise > 0 ? shape : 1.0, cfg.noise > 0 ? 1.0 / shape : 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::size_t n = static_cast<std::size_t>(cfg.years) * 12;
    series.values.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      const int month = static_cast<int>(i % 12) + 1;
      double value = cfg.monthly_means[static_cast<std::size_t>(month - 1)] * zone.scale;
      if (cfg.noise > 0) value *= gamma(rng);
      if (!is_monsoon_month(month) && cfg.zero_inflation > 0)
        value = unit(rng) < cfg.zero_inflation ? 0.0 : value / (1.0 - cfg.zero_inflation);
      series.values.push_back(value);
    }
    series.flags.assign(n, MonthFlag::Observed);
    out.push_back(std::move(series));
  }
  return out;
}

std::vector<RainfallRecord> generate_synthetic_daily(const SynthConfig& cfg, std::uint64_t seed,
                                                     const DailySynthOptions& options) {
  const auto monthly = generate_synthetic(cfg, seed);
  std::vector<RainfallRecord> out;
  for (std::size_t s = 0; s < monthly.size(); ++s) {
    const auto& series = monthly[s];
    Rng rng(derive_seed(seed, 1'000'003 + s));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::exponential_distribution<double> weight(1.0);
    for (std::size_t i = 0; i < series.size(); ++i) {
      const auto ym = series.month_at(i);
      const int days = days_in_month(ym.year, ym.month);
      const double wet_p = is_monsoon_month(ym.month) ? 0.45 : 0.1;
      std::vector<double> w(static_cast<std::size_t>(days), 0.0);
      double total_w = 0;
      for (auto& x : w)
        if (unit(rng) < wet_p) total_w += (x = weight(rng));
      if (total_w == 0) total_w += (w[static_cast<std::size_t>(days / 2)] = 1.0);
      for (int d = 1; d <= days; ++d) {
        RainfallRecord r{series.station_id, series.latitude, series.longitude, {ym.year, ym.month, d}, {}, series.zone};
        const double amount = round_to(series.values[i] * w[static_cast<std::size_t>(d - 1)] / total_w, 0.1);
        const double u = unit(rng);
        if (u < options.missing_day_probability) {
          // left missing
        } else if (u < options.missing_day_probability + options.negative_day_probability) {
          r.rainfall_mm = -1.0 - round_to(amount, 1.0);
        } else {
          r.rainfall_mm = amount;
        }
        out.push_back(std::move(r));
      }
    }
  }
  return out;
}

}  // namespace dwmrpm::data
