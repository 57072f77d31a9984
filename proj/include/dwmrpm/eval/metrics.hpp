#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dwmrpm/data/calendar.hpp"
#include "dwmrpm/models/spec.hpp"

namespace dwmrpm::eval {

/// sqrt(mean((y - yhat)^2)); equal non-empty lengths required.
double rmse(std::span<const double> actual, std::span<const double> predicted);
/// mean(|y - yhat|).
double mae(std::span<const double> actual, std::span<const double> predicted);

enum class Unit { Normalized, Millimetres };
Unit parse_unit(const std::string& name);  // "normalized" | "mm"
std::string to_string(Unit unit);

struct PredictionRecord {
  std::string station_id;
  double latitude = 0;
  double longitude = 0;
  data::YearMonth target;
  double actual_normalized = 0;
  double actual_mm = 0;
  double predicted_normalized = 0;
  double predicted_mm = 0;
  models::ModelKind model = models::ModelKind::Dwmrpm;

  double actual(Unit u) const { return u == Unit::Normalized ? actual_normalized : actual_mm; }
  double predicted(Unit u) const { return u == Unit::Normalized ? predicted_normalized : predicted_mm; }
};

struct MetricCell {
  double rmse = 0;
  double mae = 0;
  std::size_t count = 0;
};

struct MetricsRow {
  std::string label;  // "June".."September" or "Overall"
  int month = 0;      // 6..9, 0 for the pooled row
  std::map<models::ModelKind, MetricCell> cells;
};

/// Rows in fixed order June, July, August, September, Overall. The Overall row
/// pools all records rather than averaging the monthly metrics.
struct MetricsTable {
  Unit unit = Unit::Normalized;
  std::vector<models::ModelKind> models;  // column order
  std::vector<MetricsRow> rows;
  std::vector<std::string> notes;  // absent (month, model) groups
};

/// Column order used in reports: MLP, 1-DCNN, DWMRPM.
std::vector<models::ModelKind> report_model_order();

/// Groups records by target month and model. Any non-monsoon record is a contract error.
MetricsTable per_month_metrics(std::span<const PredictionRecord> records, Unit unit = Unit::Normalized);

/// Merges per-model tables into one; tables must share a unit and cover distinct models.
MetricsTable join_tables(std::span<const MetricsTable> tables);

// Month,<Model> RMSE,<Model> MAE,... with one line per row.
void write_metrics_csv(std::ostream& out, const MetricsTable& table);
nlohmann::json to_json(const MetricsTable& table);
MetricsTable metrics_table_from_json(const nlohmann::json& j);

void write_predictions_csv(std::ostream& out, std::span<const PredictionRecord> records);
std::vector<PredictionRecord> read_predictions_csv(std::istream& in);

/// One `year,month,actual_mm,predicted_mm` file per (model, station), named
/// plot_<model>_<station>.csv. Returns the files written.
std::vector<std::filesystem::path> write_plot_csvs(const std::filesystem::path& dir,
                                                   std::span<const PredictionRecord> records);

}  // namespace dwmrpm::eval
