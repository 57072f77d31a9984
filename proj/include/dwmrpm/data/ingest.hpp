#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dwmrpm/core/errors.hpp"
#include "dwmrpm/data/calendar.hpp"

namespace dwmrpm::data {

enum class DailyFormat { ImdGrid, WrdStation };

DailyFormat parse_daily_format(const std::string& name);  // "imd_grid" | "wrd_station"
std::string to_string(DailyFormat format);

/// One daily observation. A missing or rejected reading has no rainfall_mm.
struct RainfallRecord {
  std::string station_id;
  double latitude = 0;
  double longitude = 0;
  Date date;
  std::optional<double> rainfall_mm;
  std::optional<std::string> zone;
};

/// Accepted coordinate box, decimal degrees. Defaults cover Rajasthan.
struct GeoBounds {
  double lat_min = 23.058;
  double lat_max = 30.233;
  double lon_min = 69.45;
  double lon_max = 78.317;

  bool contains(double lat, double lon) const {
    return lat >= lat_min && lat <= lat_max && lon >= lon_min && lon <= lon_max;
  }
};

struct IngestOptions {
  std::optional<GeoBounds> bounds = GeoBounds{};
  double max_malformed_fraction = 0.10;
};

struct RowIssue {
  std::size_t line = 0;  // 1-based, header is line 1
  std::string reason;
};

struct IngestReport {
  std::size_t data_rows = 0;
  std::vector<RowIssue> malformed;        // rows that produced no record
  std::vector<RowIssue> negative_values;  // rows kept with the missing marker
};

struct IngestResult {
  std::vector<RainfallRecord> records;
  IngestReport report;
};

class IngestionFailed : public Error {
 public:
  IngestionFailed(const std::string& what, IngestReport report) : Error(what), report_(std::move(report)) {}
  const IngestReport& report() const { return report_; }

 private:
  IngestReport report_;
};

/// Parses daily rainfall CSV in the declared format.
///
/// wrd_station: `station_id,latitude,longitude,date,rainfall_mm[,zone]`
/// imd_grid:    `lat,lon,date,rainfall_mm` (station id synthesised as grid_<lat>_<lon>)
///
/// Empty or `NA` rainfall is missing; negative rainfall becomes missing and is
/// reported. Malformed rows are reported, and more than
/// max_malformed_fraction of them aborts with IngestionFailed.
IngestResult parse_daily(std::istream& in, DailyFormat format, const IngestOptions& options = {});
IngestResult ingest_daily(const std::filesystem::path& path, DailyFormat format, const IngestOptions& options = {});

void write_daily_csv(std::ostream& out, std::span<const RainfallRecord> records, DailyFormat format);

nlohmann::json to_json(const IngestReport& report);

}  // namespace dwmrpm::data
