#include "dwmrpm/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>

#include "dwmrpm/core/errors.hpp"
#include "dwmrpm/data/csv.hpp"

namespace dwmrpm::eval {

using data::format_double;
using models::ModelKind;

namespace {

void check_pairs(std::span<const double> actual, std::span<const double> predicted) {
  if (actual.empty()) throw ContractError("metrics need at least one pair");
  if (actual.size() != predicted.size())
    throw ContractError("metrics: " + std::to_string(actual.size()) + " actual vs " +
                        std::to_string(predicted.size()) + " predicted values");
}

constexpr const char* kPredictionsHeader =
    "station_id,latitude,longitude,year,month,model,actual_normalized,predicted_normalized,actual_mm,predicted_mm";

}  // namespace

double rmse(std::span<const double> actual, std::span<const double> predicted) {
  check_pairs(actual, predicted);
  double sum = 0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    const double d = actual[i] - predicted[i];
    sum += d * d;
  }
  return std::sqrt(sum / static_cast<double>(actual.size()));
}

double mae(std::span<const double> actual, std::span<const double> predicted) {
  check_pairs(actual, predicted);
  double sum = 0;
  for (std::size_t i = 0; i < actual.size(); ++i) sum += std::abs(actual[i] - predicted[i]);
  return sum / static_cast<double>(actual.size());
}

Unit parse_unit(const std::string& name) {
  if (name == "normalized") return Unit::Normalized;
  if (name == "mm") return Unit::Millimetres;
  throw InvalidParameter("unknown unit '" + name + "' (expected normalized or mm)");
}

std::string to_string(Unit unit) { return unit == Unit::Normalized ? "normalized" : "mm"; }

std::vector<ModelKind> report_model_order() { return {ModelKind::Mlp, ModelKind::Cnn1d, ModelKind::Dwmrpm}; }

namespace {

MetricCell cell_for(const std::vector<const PredictionRecord*>& group, Unit unit) {
  std::vector<double> a, p;
  for (const auto* r : group) {
    a.push_back(r->actual(unit));
    p.push_back(r->predicted(unit));
  }
  MetricCell c{rmse(a, p), mae(a, p), group.size()};
  // Power-mean inequality; a violation beyond rounding means the inputs are broken.
  if (c.rmse < c.mae * (1 - 1e-12)) throw ContractError("RMSE below MAE in a metrics group");
  return c;
}

std::vector<ModelKind> ordered(const std::set<ModelKind>& present) {
  std::vector<ModelKind> out;
  for (auto k : report_model_order())
    if (present.count(k)) out.push_back(k);
  return out;
}

}  // namespace

MetricsTable per_month_metrics(std::span<const PredictionRecord> records, Unit unit) {
  std::map<std::pair<int, ModelKind>, std::vector<const PredictionRecord*>> groups;
  std::map<ModelKind, std::vector<const PredictionRecord*>> pooled;
  std::set<ModelKind> present;
  for (const auto& r : records) {
    if (!data::is_monsoon_month(r.target.month))
      throw ContractError("prediction record for " + r.station_id + " targets month " +
                          std::to_string(r.target.month) + ", outside June-September");
    groups[{r.target.month, r.model}].push_back(&r);
    pooled[r.model].push_back(&r);
    present.insert(r.model);
  }

  MetricsTable table;
  table.unit = unit;
  table.models = ordered(present);
  for (int month = 6; month <= 9; ++month) {
    MetricsRow row{data::month_name(month), month, {}};
    for (auto k : table.models) {
      auto it = groups.find({month, k});
      if (it == groups.end()) {
        table.notes.push_back("no " + models::display_name(k) + " records for " + data::month_name(month));
        continue;
      }
      row.cells[k] = cell_for(it->second, unit);
    }
    if (!row.cells.empty()) table.rows.push_back(std::move(row));
  }
  if (!pooled.empty()) {
    MetricsRow overall{"Overall", 0, {}};
    for (auto k : table.models) overall.cells[k] = cell_for(pooled[k], unit);
    table.rows.push_back(std::move(overall));
  } else {
    table.notes.push_back("no prediction records");
  }
  return table;
}

MetricsTable join_tables(std::span<const MetricsTable> tables) {
  MetricsTable out;
  if (tables.empty()) return out;
  out.unit = tables.front().unit;
  std::set<ModelKind> present;
  std::map<int, MetricsRow> rows;
  for (const auto& t : tables) {
    if (t.unit != out.unit)
      throw ContractError("cannot join metrics in " + to_string(out.unit) + " with metrics in " + to_string(t.unit));
    for (auto k : t.models)
      if (!present.insert(k).second) throw ContractError("model " + models::display_name(k) + " appears twice");
    for (const auto& r : t.rows) {
      // Overall sorts after the months.
      auto& row = rows.try_emplace(r.month == 0 ? 13 : r.month, MetricsRow{r.label, r.month, {}}).first->second;
      row.cells.insert(r.cells.begin(), r.cells.end());
    }
    out.notes.insert(out.notes.end(), t.notes.begin(), t.notes.end());
  }
  out.models = ordered(present);
  for (auto& [key, row] : rows) out.rows.push_back(std::move(row));
  return out;
}

void write_metrics_csv(std::ostream& out, const MetricsTable& table) {
  out << "Month";
  for (auto k : table.models) out << ',' << models::display_name(k) << " RMSE," << models::display_name(k) << " MAE";
  out << '\n';
  for (const auto& row : table.rows) {
    out << row.label;
    for (auto k : table.models) {
      auto it = row.cells.find(k);
      if (it == row.cells.end())
        out << ",,";
      else
        out << ',' << format_double(it->second.rmse) << ',' << format_double(it->second.mae);
    }
    out << '\n';
  }
}

nlohmann::json to_json(const MetricsTable& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : table.rows) {
    nlohmann::json cells = nlohmann::json::object();
    for (const auto& [k, c] : row.cells)
      cells[models::display_name(k)] = {{"rmse", c.rmse}, {"mae", c.mae}, {"count", c.count}};
    rows.push_back({{"month", row.label}, {"metrics", std::move(cells)}});
  }
  nlohmann::json names = nlohmann::json::array();
  for (auto k : table.models) names.push_back(models::display_name(k));
  return {{"unit", to_string(table.unit)}, {"models", names}, {"rows", rows}, {"notes", table.notes}};
}

MetricsTable metrics_table_from_json(const nlohmann::json& j) {
  auto kind_from_display = [](const std::string& name) {
    for (auto k : report_model_order())
      if (models::display_name(k) == name) return k;
    throw IoError("unknown model column '" + name + "'");
  };
  try {
    MetricsTable t;
    t.unit = parse_unit(j.at("unit").get<std::string>());
    for (const auto& n : j.at("models")) t.models.push_back(kind_from_display(n.get<std::string>()));
    for (const auto& r : j.at("rows")) {
      MetricsRow row;
      row.label = r.at("month").get<std::string>();
      for (int m = 6; m <= 9; ++m)
        if (row.label == data::month_name(m)) row.month = m;
      for (const auto& [name, c] : r.at("metrics").items())
        row.cells[kind_from_display(name)] = {c.at("rmse").get<double>(), c.at("mae").get<double>(),
                                              c.at("count").get<std::size_t>()};
      t.rows.push_back(std::move(row));
    }
    t.notes = j.at("notes").get<std::vector<std::string>>();
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("malformed metrics document: ") + e.what());
  }
}

void write_predictions_csv(std::ostream& out, std::span<const PredictionRecord> records) {
  out << kPredictionsHeader << '\n';
  for (const auto& r : records)
    out << r.station_id << ',' << format_double(r.latitude) << ',' << format_double(r.longitude) << ','
        << r.target.year << ',' << r.target.month << ',' << models::to_string(r.model) << ','
        << format_double(r.actual_normalized) << ',' << format_double(r.predicted_normalized) << ','
        << format_double(r.actual_mm) << ',' << format_double(r.predicted_mm) << '\n';
}

std::vector<PredictionRecord> read_predictions_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || data::trim(line) != kPredictionsHeader)
    throw IoError("predictions file must start with header: " + std::string(kPredictionsHeader));
  std::vector<PredictionRecord> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (data::trim(line).empty()) continue;
    const auto f = data::split_fields(line);
    auto fail = [&](const std::string& why) {
      return IoError("predictions line " + std::to_string(lineno) + ": " + why);
    };
    if (f.size() != 10) throw fail("expected 10 fields");
    PredictionRecord r;
    r.station_id = std::string(data::trim(f[0]));
    const auto lat = data::parse_double(f[1]), lon = data::parse_double(f[2]);
    const auto year = data::parse_int(f[3]), month = data::parse_int(f[4]);
    const auto an = data::parse_double(f[6]), pn = data::parse_double(f[7]);
    const auto am = data::parse_double(f[8]), pm = data::parse_double(f[9]);
    if (!lat || !lon || !year || !month || !an || !pn || !am || !pm || *month < 1 || *month > 12)
      throw fail("unparseable field");
    r.latitude = *lat;
    r.longitude = *lon;
    r.target = {*year, *month};
    r.model = models::parse_model_kind(std::string(data::trim(f[5])));
    r.actual_normalized = *an;
    r.predicted_normalized = *pn;
    r.actual_mm = *am;
    r.predicted_mm = *pm;
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<std::filesystem::path> write_plot_csvs(const std::filesystem::path& dir,
                                                   std::span<const PredictionRecord> records) {
  std::map<std::pair<std::string, std::string>, std::vector<const PredictionRecord*>> groups;
  for (const auto& r : records) groups[{models::to_string(r.model), r.station_id}].push_back(&r);
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  for (auto& [key, group] : groups) {
    std::stable_sort(group.begin(), group.end(),
                     [](const auto* a, const auto* b) { return a->target < b->target; });
    const auto path = dir / ("plot_" + key.first + "_" + key.second + ".csv");
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << "year,month,actual_mm,predicted_mm\n";
    for (const auto* r : group)
      out << r->target.year << ',' << r->target.month << ',' << format_double(r->actual_mm) << ','
          << format_double(r->predicted_mm) << '\n';
    written.push_back(path);
  }
  return written;
}

}  // namespace dwmrpm::eval
