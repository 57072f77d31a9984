#include "dwmrpm/data/ingest.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "dwmrpm/data/csv.hpp"

namespace dwmrpm::data {

namespace {

constexpr std::string_view kWrdHeader = "station_id,latitude,longitude,date,rainfall_mm";
constexpr std::string_view kWrdHeaderZone = "station_id,latitude,longitude,date,rainfall_mm,zone";
constexpr std::string_view kImdHeader = "lat,lon,date,rainfall_mm";

std::string strip_header(std::string line) {
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);  // UTF-8 BOM
  std::string compact;
  for (char c : line)
    if (c != ' ' && c != '\t' && c != '\r') compact.push_back(c);
  return compact;
}

bool is_missing(std::string_view field) { return field.empty() || field == "NA"; }

}  // namespace

DailyFormat parse_daily_format(const std::string& name) {
  if (name == "imd_grid") return DailyFormat::ImdGrid;
  if (name == "wrd_station") return DailyFormat::WrdStation;
  throw InvalidParameter("unknown daily format '" + name + "' (expected imd_grid or wrd_station)");
}

std::string to_string(DailyFormat format) { return format == DailyFormat::ImdGrid ? "imd_grid" : "wrd_station"; }

IngestResult parse_daily(std::istream& in, DailyFormat format, const IngestOptions& options) {
  IngestResult result;
  auto& report = result.report;

  std::string line;
  if (!std::getline(in, line)) return result;
  const std::string header = strip_header(line);
  bool has_zone = false;
  if (format == DailyFormat::WrdStation) {
    has_zone = header == kWrdHeaderZone;
    if (!has_zone && header != kWrdHeader)
      throw IngestionFailed("unexpected wrd_station header '" + header + "'", report);
  } else if (header != kImdHeader) {
    throw IngestionFailed("unexpected imd_grid header '" + header + "'", report);
  }
  const std::size_t expected_fields = format == DailyFormat::ImdGrid ? 4 : (has_zone ? 6 : 5);

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    ++report.data_rows;
    const auto fields = split_fields(line);
    auto reject = [&](std::string reason) { report.malformed.push_back({line_no, std::move(reason)}); };
    if (fields.size() != expected_fields) {
      reject("expected " + std::to_string(expected_fields) + " fields, got " + std::to_string(fields.size()));
      continue;
    }

    RainfallRecord rec;
    std::size_t f = 0;
    std::string_view lat_text, lon_text;
    if (format == DailyFormat::WrdStation) {
      rec.station_id = std::string(fields[f++]);
      if (rec.station_id.empty()) {
        reject("empty station_id");
        continue;
      }
    }
    lat_text = fields[f++];
    lon_text = fields[f++];
    const auto lat = parse_double(lat_text);
    const auto lon = parse_double(lon_text);
    if (!lat || !lon) {
      reject("unparsable coordinates");
      continue;
    }
    if (options.bounds && !options.bounds->contains(*lat, *lon)) {
      reject("coordinates outside accepted bounds");
      continue;
    }
    rec.latitude = *lat;
    rec.longitude = *lon;
    if (format == DailyFormat::ImdGrid)
      rec.station_id = "grid_" + std::string(lat_text) + "_" + std::string(lon_text);

    const auto date = parse_date(fields[f++]);
    if (!date) {
      reject("invalid date '" + std::string(fields[f - 1]) + "'");
      continue;
    }
    rec.date = *date;

    const auto rain_text = fields[f++];
    if (!is_missing(rain_text)) {
      const auto rain = parse_double(rain_text);
      if (!rain) {
        reject("unparsable rainfall '" + std::string(rain_text) + "'");
        continue;
      }
      if (*rain < 0)
        report.negative_values.push_back({line_no, "negative value"});
      else
        rec.rainfall_mm = *rain;
    }
    if (has_zone && !fields[f].empty()) rec.zone = std::string(fields[f]);
    result.records.push_back(std::move(rec));
  }

  if (report.data_rows > 0 &&
      static_cast<double>(report.malformed.size()) > options.max_malformed_fraction * static_cast<double>(report.data_rows))
    throw IngestionFailed("ingestion failed: " + std::to_string(report.malformed.size()) + " of " +
                              std::to_string(report.data_rows) + " rows malformed",
                          report);
  return result;
}

IngestResult ingest_daily(const std::filesystem::path& path, DailyFormat format, const IngestOptions& options) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read daily rainfall file '" + path.string() + "'");
  return parse_daily(in, format, options);
}

void write_daily_csv(std::ostream& out, std::span<const RainfallRecord> records, DailyFormat format) {
  out << (format == DailyFormat::ImdGrid ? kImdHeader : kWrdHeaderZone) << '\n';
  for (const auto& r : records) {
    if (format == DailyFormat::WrdStation) out << r.station_id << ',';
    out << format_double(r.latitude) << ',' << format_double(r.longitude) << ',' << format_date(r.date) << ','
        << (r.rainfall_mm ? format_double(*r.rainfall_mm) : "NA");
    if (format == DailyFormat::WrdStation) out << ',' << r.zone.value_or("");
    out << '\n';
  }
}

nlohmann::json to_json(const IngestReport& report) {
  auto issues = [](const std::vector<RowIssue>& list) {
    auto arr = nlohmann::json::array();
    for (const auto& i : list) arr.push_back({{"line", i.line}, {"reason", i.reason}});
    return arr;
  };
  return {{"data_rows", report.data_rows},
          {"malformed_rows", issues(report.malformed)},
          {"negative_values", issues(report.negative_values)}};
}

}  // namespace dwmrpm::data
