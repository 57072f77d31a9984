#include "dwmrpm/data/monthly.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>

#include "dwmrpm/data/csv.hpp"

namespace dwmrpm::data {

namespace {

constexpr std::string_view kCacheHeader = "station_id,latitude,longitude,year,month,rainfall_mm,flag";

struct MonthAccumulator {
  double sum = 0;
  int observed_days = 0;
};

// Returns the reason a station is dropped, or nothing when it is kept.
std::optional<std::string> aggregate_station(std::vector<const RainfallRecord*>& recs, const CleanPolicy& policy,
                                             MonthlySeries& series, StationCleaning& stats,
                                             std::vector<std::string>& duplicates) {
  std::stable_sort(recs.begin(), recs.end(),
                   [](const RainfallRecord* a, const RainfallRecord* b) { return a->date < b->date; });
  const auto& first = *recs.front();
  series.station_id = first.station_id;
  series.latitude = first.latitude;
  series.longitude = first.longitude;
  series.zone = first.zone;
  series.start = first.date.year_month();
  const int n_months = recs.back()->date.year_month().index() - series.start.index() + 1;

  std::vector<MonthAccumulator> months(static_cast<std::size_t>(n_months));
  const Date* prev = nullptr;
  for (const auto* r : recs) {
    if (prev && *prev == r->date) {
      duplicates.push_back(r->station_id + " " + format_date(r->date));
      continue;
    }
    prev = &r->date;
    if (!r->rainfall_mm || *r->rainfall_mm < 0) continue;  // negative readings count as missing
    auto& acc = months[static_cast<std::size_t>(r->date.year_month().index() - series.start.index())];
    acc.sum += *r->rainfall_mm;
    ++acc.observed_days;
  }

  series.values.assign(months.size(), 0.0);
  series.flags.assign(months.size(), MonthFlag::Observed);
  std::array<double, 12> clim_sum{};
  std::array<int, 12> clim_count{};
  for (std::size_t i = 0; i < months.size(); ++i) {
    const auto ym = series.month_at(i);
    const int missing = days_in_month(ym.year, ym.month) - months[i].observed_days;
    stats.missing_days += static_cast<std::size_t>(missing);
    if (missing <= policy.max_missing_days) {
      series.values[i] = months[i].sum;
      clim_sum[ym.month - 1] += months[i].sum;
      ++clim_count[ym.month - 1];
    } else {
      series.flags[i] = MonthFlag::Imputed;
      stats.discarded_daily_mm += months[i].sum;
    }
  }

  stats.station_id = series.station_id;
  stats.months = months.size();
  for (std::size_t i = 0; i < months.size(); ++i) {
    if (series.flags[i] == MonthFlag::Observed) {
      stats.observed_total_mm += series.values[i];
      continue;
    }
    const int m = series.month_at(i).month;
    if (clim_count[m - 1] == 0)
      return std::string("no observed ") + month_abbrev(m) + " months to build a climatology";
    series.values[i] = clim_sum[m - 1] / clim_count[m - 1];
    stats.imputed_total_mm += series.values[i];
    ++stats.imputed_months;
  }

  const double imputed_fraction = static_cast<double>(stats.imputed_months) / static_cast<double>(stats.months);
  if (imputed_fraction > policy.max_imputed_fraction)
    return "imputed fraction " + format_double(imputed_fraction) + " exceeds " +
           format_double(policy.max_imputed_fraction);
  if (stats.months < policy.min_months)
    return "only " + std::to_string(stats.months) + " months of data, need " + std::to_string(policy.min_months);
  return std::nullopt;
}

const char* flag_name(MonthFlag f) { return f == MonthFlag::Observed ? "observed" : "imputed"; }

}  // namespace

AggregateResult clean_and_aggregate(std::span<const RainfallRecord> records, const CleanPolicy& policy) {
  std::map<std::string, std::vector<const RainfallRecord*>> by_station;
  for (const auto& r : records) by_station[r.station_id].push_back(&r);

  AggregateResult result;
  for (auto& [id, recs] : by_station) {
    MonthlySeries series;
    StationCleaning stats;
    if (auto reason = aggregate_station(recs, policy, series, stats, result.report.duplicate_days)) {
      result.report.excluded.push_back({id, *reason});
      continue;
    }
    result.series.push_back(std::move(series));
    result.report.stations.push_back(std::move(stats));
  }
  return result;
}

nlohmann::json to_json(const CleaningReport& report) {
  auto stations = nlohmann::json::array();
  for (const auto& s : report.stations)
    stations.push_back({{"station_id", s.station_id},
                        {"months", s.months},
                        {"imputed_months", s.imputed_months},
                        {"missing_days", s.missing_days},
                        {"observed_total_mm", s.observed_total_mm},
                        {"imputed_total_mm", s.imputed_total_mm},
                        {"discarded_daily_mm", s.discarded_daily_mm}});
  auto excluded = nlohmann::json::array();
  for (const auto& e : report.excluded) excluded.push_back({{"station_id", e.station_id}, {"reason", e.reason}});
  std::size_t imputed = 0;
  for (const auto& s : report.stations) imputed += s.imputed_months;
  return {{"stations", stations},
          {"excluded_stations", excluded},
          {"imputed_months_total", imputed},
          {"duplicate_days", report.duplicate_days},
          {"ingest", to_json(report.ingest)}};
}

void write_monthly_cache(std::ostream& out, std::span<const MonthlySeries> series) {
  out << kCacheHeader << '\n';
  for (const auto& s : series) {
    const std::string prefix = s.station_id + ',' + format_double(s.latitude) + ',' + format_double(s.longitude) + ',';
    for (std::size_t i = 0; i < s.size(); ++i) {
      const auto ym = s.month_at(i);
      out << prefix << ym.year << ',' << ym.month << ',' << format_double(s.values[i]) << ',' << flag_name(s.flags[i])
          << '\n';
    }
  }
}

std::vector<MonthlySeries> read_monthly_cache(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != kCacheHeader)
    throw IoError("monthly cache: missing or unexpected header");

  std::map<std::string, MonthlySeries> by_station;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto f = split_fields(line);
    auto fail = [&](const std::string& why) {
      throw IoError("monthly cache line " + std::to_string(line_no) + ": " + why);
    };
    if (f.size() != 7) fail("expected 7 fields");
    const auto lat = parse_double(f[1]), lon = parse_double(f[2]), value = parse_double(f[5]);
    const auto year = parse_int(f[3]), month = parse_int(f[4]);
    if (!lat || !lon || !value || !year || !month || *month < 1 || *month > 12) fail("unparsable field");
    if (*value < 0) fail("negative monthly total");
    MonthFlag flag = MonthFlag::Observed;
    if (f[6] == "observed")
      flag = MonthFlag::Observed;
    else if (f[6] == "imputed")
      flag = MonthFlag::Imputed;
    else
      fail("unknown flag '" + std::string(f[6]) + "'");

    const YearMonth ym{*year, *month};
    auto [it, inserted] = by_station.try_emplace(std::string(f[0]));
    auto& s = it->second;
    if (inserted) {
      s.station_id = std::string(f[0]);
      s.latitude = *lat;
      s.longitude = *lon;
      s.start = ym;
    } else if (ym != s.month_at(s.size())) {
      fail("station " + s.station_id + " is not contiguous in time");
    }
    s.values.push_back(*value);
    s.flags.push_back(flag);
  }

  std::vector<MonthlySeries> out;
  out.reserve(by_station.size());
  for (auto& [id, s] : by_station) out.push_back(std::move(s));
  return out;
}

void save_monthly_cache(const std::filesystem::path& path, std::span<const MonthlySeries> series) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write monthly cache '" + path.string() + "'");
  write_monthly_cache(out, series);
}

std::vector<MonthlySeries> load_monthly_cache(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read monthly cache '" + path.string() + "'");
  return read_monthly_cache(in);
}

}  // namespace dwmrpm::data
