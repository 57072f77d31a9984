#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dwmrpm/data/calendar.hpp"
#include "dwmrpm/data/ingest.hpp"

namespace dwmrpm::data {

enum class MonthFlag { Observed, Imputed };

/// Gap-free chronological monthly totals for one station.
struct MonthlySeries {
  std::string station_id;
  double latitude = 0;
  double longitude = 0;
  YearMonth start;
  std::vector<double> values;
  std::vector<MonthFlag> flags;
  std::optional<std::string> zone;

  std::size_t size() const { return values.size(); }
  YearMonth month_at(std::size_t i) const { return start.plus(static_cast<int>(i)); }

  friend bool operator==(const MonthlySeries&, const MonthlySeries&) = default;
};

struct CleanPolicy {
  int max_missing_days = 5;            // a month with more missing days is imputed
  double max_imputed_fraction = 0.10;  // stations above this are excluded
  std::size_t min_months = 120;        // ten years
};

struct StationCleaning {
  std::string station_id;
  std::size_t months = 0;
  std::size_t imputed_months = 0;
  std::size_t missing_days = 0;
  double observed_total_mm = 0;   // sum of monthly totals built from daily values
  double imputed_total_mm = 0;    // sum of climatology fills
  double discarded_daily_mm = 0;  // partial daily values inside imputed months
};

struct Exclusion {
  std::string station_id;
  std::string reason;
};

struct CleaningReport {
  std::vector<StationCleaning> stations;  // kept stations, station-id order
  std::vector<Exclusion> excluded;
  std::vector<std::string> duplicate_days;  // "<station> <date>", later copies ignored
  IngestReport ingest;                    // carried through from ingestion when known
};

struct AggregateResult {
  std::vector<MonthlySeries> series;
  CleaningReport report;
};

/// Sums daily records into calendar-month totals per station, imputes months
/// with too many missing days from the station's climatological mean for that
/// calendar month, and drops stations that are too short or too gappy.
/// Output is ordered by station id.
AggregateResult clean_and_aggregate(std::span<const RainfallRecord> records, const CleanPolicy& policy = {});

nlohmann::json to_json(const CleaningReport& report);

// Monthly cache: `station_id,latitude,longitude,year,month,rainfall_mm,flag`.
// Values are written in shortest round-trip form, so read(write(x)) == x.
void write_monthly_cache(std::ostream& out, std::span<const MonthlySeries> series);
std::vector<MonthlySeries> read_monthly_cache(std::istream& in);
void save_monthly_cache(const std::filesystem::path& path, std::span<const MonthlySeries> series);
std::vector<MonthlySeries> load_monthly_cache(const std::filesystem::path& path);

}  // namespace dwmrpm::data
