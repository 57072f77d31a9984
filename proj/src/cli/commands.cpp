#include "dwmrpm/cli/commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>

#include "dwmrpm/core/errors.hpp"
#include "dwmrpm/data/csv.hpp"
#include "dwmrpm/data/ingest.hpp"
#include "dwmrpm/data/monthly.hpp"
#include "dwmrpm/data/normalize.hpp"
#include "dwmrpm/data/synthetic.hpp"
#include "dwmrpm/eval/metrics.hpp"
#include "dwmrpm/eval/summary.hpp"
#include "dwmrpm/optim/train.hpp"

namespace dwmrpm::cli {

namespace fs = std::filesystem;
using models::ModelKind;

namespace {

struct Prepared {
  std::vector<data::MonthlySeries> series;
  data::NormalizationParams norm;
  data::DatasetSplit split;
};

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

void write_json(const fs::path& path, const nlohmann::json& j) { open_out(path) << j.dump(2) << '\n'; }

fs::path output_dir(const RunConfig& cfg) {
  fs::path dir(cfg.output);
  fs::create_directories(dir);
  return dir;
}

// The normalizer only sees months up to the end of the training years.
Prepared prepare(const RunConfig& cfg) {
  Prepared p;
  p.series = data::load_monthly_cache(cfg.input);
  if (p.series.empty()) throw ContractError(cfg.input + " holds no monthly series");
  p.norm = data::fit_normalizer(data::truncate_after_year(p.series, cfg.train_years.last));
  std::vector<data::WindowSample> samples;
  for (const auto& s : p.series) {
    auto w = data::build_windows(s, p.norm, cfg.window_months);
    std::move(w.begin(), w.end(), std::back_inserter(samples));
  }
  p.split = data::split_by_years(std::move(samples), cfg.split_years());
  return p;
}

models::ModelSpec spec_for(const RunConfig& cfg, ModelKind kind) {
  auto spec = models::ModelSpec::defaults(kind, cfg.seed);
  spec.input_len = cfg.window_months + 2;
  spec.coords = models::parse_coords_wiring(cfg.coords_wiring);
  spec.head_bias = !cfg.strict_paper_head;
  return spec;
}

optim::TrainConfig train_config(const RunConfig& cfg) {
  optim::TrainConfig tc;
  tc.epochs = cfg.epochs;
  tc.batch_size = cfg.batch_size;
  tc.lr = cfg.lr;
  tc.seed = cfg.seed;
  tc.keep_best_validation = !cfg.final_weights;
  return tc;
}

optim::TrainResult fit(const RunConfig& cfg, ModelKind kind, const Prepared& data, std::ostream& log) {
  log << "training " << models::display_name(kind) << " on " << data.split.train.size() << " samples ("
      << data.split.validation.size() << " validation)\n";
  auto progress = [&](std::size_t epoch, double train_mse, double val_mse) {
    if ((epoch + 1) % 10 == 0 || epoch + 1 == cfg.epochs)
      log << "  epoch " << epoch + 1 << "/" << cfg.epochs << " train_mse " << train_mse << " val_mse " << val_mse
          << '\n';
    return true;
  };
  return optim::train(spec_for(cfg, kind), data.split.train, data.split.validation, train_config(cfg), data.norm,
                      progress);
}

std::vector<eval::PredictionRecord> score(const models::TrainedModel& model,
                                          std::span<const data::WindowSample> samples) {
  std::vector<eval::PredictionRecord> out;
  constexpr std::size_t kChunk = 32;
  for (std::size_t begin = 0; begin < samples.size(); begin += kChunk) {
    const auto chunk = samples.subspan(begin, std::min(kChunk, samples.size() - begin));
    const auto pred = model.network.predict_batch(models::stack_inputs(chunk));
    for (std::size_t i = 0; i < chunk.size(); ++i) {
      const auto& s = chunk[i];
      out.push_back({s.station_id, s.latitude, s.longitude, s.target_month, s.target, s.target_mm, pred[i],
                     data::denormalize(pred[i], model.normalization), model.network.spec().kind});
    }
  }
  return out;
}

const std::vector<data::WindowSample>& pick_split(const RunConfig& cfg, const Prepared& p) {
  if (cfg.split == "train") return p.split.train;
  if (cfg.split == "validation") return p.split.validation;
  if (cfg.split == "test") return p.split.test;
  throw InvalidParameter("unknown split '" + cfg.split + "'");
}

void check_fingerprint(const models::TrainedModel& model, const Prepared& p) {
  const auto have = model.normalization.fingerprint(), want = p.norm.fingerprint();
  if (have != want || model.metadata.data_fingerprint != want)
    throw ContractError("normalization fingerprint mismatch: model was trained with " + have + " [" +
                        data::format_double(model.normalization.i_min) + ", " +
                        data::format_double(model.normalization.i_max) + "] but the dataset gives " + want + " [" +
                        data::format_double(p.norm.i_min) + ", " + data::format_double(p.norm.i_max) + "]");
}

void write_tables(const fs::path& dir, const std::vector<eval::PredictionRecord>& records, eval::Unit primary,
                  std::ostream& out) {
  for (auto unit : {eval::Unit::Normalized, eval::Unit::Millimetres}) {
    std::vector<eval::MetricsTable> per_model;
    for (auto k : eval::report_model_order()) {
      std::vector<eval::PredictionRecord> subset;
      std::copy_if(records.begin(), records.end(), std::back_inserter(subset),
                   [k](const auto& r) { return r.model == k; });
      if (!subset.empty()) per_model.push_back(eval::per_month_metrics(subset, unit));
    }
    const auto table = eval::join_tables(per_model);
    const auto tag = eval::to_string(unit);
    {
      auto csv = open_out(dir / ("metrics_" + tag + ".csv"));
      eval::write_metrics_csv(csv, table);
    }
    write_json(dir / ("metrics_" + tag + ".json"), eval::to_json(table));
    if (unit == primary) {
      auto csv = open_out(dir / "metrics.csv");
      eval::write_metrics_csv(csv, table);
      write_json(dir / "metrics.json", eval::to_json(table));
      out << "metrics (" << tag << ")\n";
      eval::write_metrics_csv(out, table);
    }
  }
}

void cmd_ingest(const RunConfig& cfg, const fs::path& dir, std::ostream& out) {
  data::IngestResult ingested;
  try {
    ingested = data::ingest_daily(cfg.input, data::parse_daily_format(cfg.format));
  } catch (const data::IngestionFailed& e) {
    write_json(dir / "ingest_report.json", data::to_json(e.report()));
    throw;
  }
  auto agg = data::clean_and_aggregate(ingested.records);
  agg.report.ingest = std::move(ingested.report);
  data::save_monthly_cache(dir / "monthly.csv", agg.series);
  write_json(dir / "cleaning_report.json", data::to_json(agg.report));
  out << "kept " << agg.series.size() << " station(s), excluded " << agg.report.excluded.size() << ", "
      << agg.report.ingest.malformed.size() << " malformed row(s)\n";
}

void cmd_summarize(const RunConfig& cfg, const fs::path& dir, std::ostream& out) {
  auto series = data::load_monthly_cache(cfg.input);
  if (!cfg.station.empty()) {
    std::erase_if(series, [&](const auto& s) { return s.station_id != cfg.station; });
    if (series.empty()) throw ContractError("station '" + cfg.station + "' not found in " + cfg.input);
  }
  if (!cfg.near.empty()) {
    const auto f = data::split_fields(cfg.near);
    const auto lat = f.size() == 2 ? data::parse_double(f[0]) : std::nullopt;
    const auto lon = f.size() == 2 ? data::parse_double(f[1]) : std::nullopt;
    if (!lat || !lon) throw InvalidParameter("--near expects LAT,LON");
    if (series.empty()) throw ContractError(cfg.input + " holds no monthly series");
    auto dist = [&](const data::MonthlySeries& s) {
      return std::hypot(s.latitude - *lat, s.longitude - *lon);
    };
    const auto best = std::min_element(series.begin(), series.end(),
                                       [&](const auto& a, const auto& b) { return dist(a) < dist(b); });
    out << "nearest station " << best->station_id << " at " << data::format_double(best->latitude) << ", "
        << data::format_double(best->longitude) << '\n';
    series = {*best};
  }
  const auto summary = eval::statistical_summary(series);
  auto csv = open_out(dir / "summary.csv");
  eval::write_summary_csv(csv, summary);
  eval::write_summary_csv(out, summary);
}

void cmd_synth(const RunConfig& cfg, const fs::path& dir, std::ostream& out) {
  data::SynthConfig sc;
  sc.stations = cfg.synth_stations;
  sc.start_year = cfg.synth_start_year;
  sc.years = cfg.synth_years;
  const auto series = data::generate_synthetic(sc, cfg.seed);
  data::save_monthly_cache(dir / "monthly.csv", series);
  out << "wrote " << series.size() << " synthetic station(s) to " << (dir / "monthly.csv").string() << '\n';
}

void cmd_train(const RunConfig& cfg, const fs::path& dir, std::ostream& out, std::ostream& log) {
  const auto data = prepare(cfg);
  auto result = fit(cfg, models::parse_model_kind(cfg.model), data, log);
  models::save_model(dir / "model.json", result.model);
  write_json(dir / "history.json", optim::history_to_json(result.history));
  out << "trained " << models::display_name(result.model.network.spec().kind) << " ("
      << result.model.network.parameter_count() << " parameters), best epoch " << result.model.metadata.best_epoch
      << '\n';
}

void cmd_predict(const RunConfig& cfg, const fs::path& dir, std::ostream& out) {
  const auto model = models::load_model(cfg.model_file);
  const auto data = prepare(cfg);
  check_fingerprint(model, data);
  const auto records = score(model, pick_split(cfg, data));
  auto csv = open_out(dir / "predictions.csv");
  eval::write_predictions_csv(csv, records);
  eval::write_plot_csvs(dir / "plots", records);
  out << "wrote " << records.size() << " prediction(s)\n";
}

void cmd_evaluate(const RunConfig& cfg, const fs::path& dir, std::ostream& out) {
  const auto model = models::load_model(cfg.model_file);
  const auto data = prepare(cfg);
  check_fingerprint(model, data);
  const auto records = score(model, pick_split(cfg, data));
  if (records.empty()) throw ContractError("the " + cfg.split + " split holds no samples");
  write_tables(dir, records, eval::parse_unit(cfg.unit), out);
}

void cmd_compare(const RunConfig& cfg, const fs::path& dir, std::ostream& out, std::ostream& log) {
  const auto data = prepare(cfg);
  if (data.split.test.empty()) throw ContractError("the test split holds no samples");
  std::vector<eval::PredictionRecord> records;
  fs::create_directories(dir / "models");
  for (auto kind : eval::report_model_order()) {
    auto result = fit(cfg, kind, data, log);
    const auto name = models::to_string(kind);
    models::save_model(dir / "models" / (name + ".json"), result.model);
    write_json(dir / ("history_" + name + ".json"), optim::history_to_json(result.history));
    auto scored = score(result.model, data.split.test);
    std::move(scored.begin(), scored.end(), std::back_inserter(records));
  }
  {
    auto csv = open_out(dir / "predictions.csv");
    eval::write_predictions_csv(csv, records);
  }
  eval::write_plot_csvs(dir / "plots", records);
  write_tables(dir, records, eval::parse_unit(cfg.unit), out);
}

bool needs_input(const std::string& command) { return command != "synth"; }
bool needs_model(const std::string& command) { return command == "predict" || command == "evaluate"; }

}  // namespace

void execute(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  const auto dir = output_dir(cfg);
  if (cfg.command == "ingest")
    cmd_ingest(cfg, dir, out);
  else if (cfg.command == "summarize")
    cmd_summarize(cfg, dir, out);
  else if (cfg.command == "synth")
    cmd_synth(cfg, dir, out);
  else if (cfg.command == "train")
    cmd_train(cfg, dir, out, log);
  else if (cfg.command == "predict")
    cmd_predict(cfg, dir, out);
  else if (cfg.command == "evaluate")
    cmd_evaluate(cfg, dir, out);
  else if (cfg.command == "compare")
    cmd_compare(cfg, dir, out, log);
  else
    throw InvalidParameter("unknown command '" + cfg.command + "'");
  save_run_config(dir / "run_config.txt", cfg);
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  // A --config file supplies the defaults; explicit flags then override it.
  std::string config_path;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--config" && i + 1 < argc) config_path = argv[i + 1];
    if (arg.rfind("--config=", 0) == 0) config_path = arg.substr(9);
  }
  try {
    if (!config_path.empty()) cfg = load_run_config(config_path);
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  CLI::App app{"Deep and wide monsoon rainfall models: data pipeline, training and evaluation"};
  app.name("dwmrpm");
  app.require_subcommand(1, 1);
  app.fallthrough();

  std::string train_years = data::to_string(cfg.train_years);
  std::string val_years = data::to_string(cfg.val_years);
  std::string test_years = data::to_string(cfg.test_years);
  std::string config_flag;

  app.add_option("--config", config_flag, "Flat key = value file whose values act as defaults");
  app.add_option("-i,--input", cfg.input, "Input file (daily CSV for ingest, monthly cache otherwise)");
  app.add_option("-o,--output", cfg.output, "Output directory")->capture_default_str();
  app.add_option("--model-file", cfg.model_file, "Trained model JSON (predict, evaluate)");
  app.add_option("--format", cfg.format, "Daily CSV layout")
      ->check(CLI::IsMember({"imd_grid", "wrd_station"}))
      ->capture_default_str();
  app.add_option("--train-years", train_years, "Training target years A:B")->capture_default_str();
  app.add_option("--val-years", val_years, "Validation target years C:D")->capture_default_str();
  app.add_option("--test-years", test_years, "Test target years E:F")->capture_default_str();
  app.add_option("--window-months", cfg.window_months, "Months of history per sample")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--model", cfg.model, "Architecture to train")
      ->check(CLI::IsMember({"dwmrpm", "mlp", "cnn"}))
      ->capture_default_str();
  app.add_option("--epochs", cfg.epochs, "Training epochs")->capture_default_str();
  app.add_option("--batch-size", cfg.batch_size, "Mini-batch size")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--lr", cfg.lr, "Adam learning rate")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--seed", cfg.seed, "Seed for initialization, dropout, shuffling and synthesis")
      ->capture_default_str();
  app.add_option("--unit", cfg.unit, "Unit of the primary metrics table")
      ->check(CLI::IsMember({"normalized", "mm"}))
      ->capture_default_str();
  app.add_option("--coords-wiring", cfg.coords_wiring, "Which paths of the joint model see coordinates")
      ->check(CLI::IsMember({"both", "deep-only"}))
      ->capture_default_str();
  app.add_flag("--strict-paper-head", cfg.strict_paper_head, "Drop the bias of the joint output head");
  app.add_flag("--final-weights", cfg.final_weights, "Keep final-epoch weights instead of best validation");
  app.add_option("--split", cfg.split, "Split scored by predict and evaluate")
      ->check(CLI::IsMember({"train", "validation", "test"}))
      ->capture_default_str();
  app.add_option("--station", cfg.station, "summarize: only this station id");
  app.add_option("--near", cfg.near, "summarize: station nearest to LAT,LON");
  app.add_option("--synth-stations", cfg.synth_stations, "synth: station count")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--synth-start-year", cfg.synth_start_year, "synth: first year")->capture_default_str();
  app.add_option("--synth-years", cfg.synth_years, "synth: number of years")->capture_default_str();

  const std::pair<const char*, const char*> commands[] = {
      {"ingest", "Daily CSV to monthly cache and cleaning report"},
      {"summarize", "Monthly mean/max/min table of a monthly cache"},
      {"synth", "Write a synthetic monthly cache"},
      {"train", "Train one model"},
      {"predict", "Write prediction records for a split"},
      {"evaluate", "Per-month RMSE/MAE of a trained model"},
      {"compare", "Train MLP, 1-DCNN and DWMRPM on identical data and tabulate them"},
  };
  for (const auto& [name, help] : commands) app.add_subcommand(name, help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }
  cfg.command = app.get_subcommands().front()->get_name();

  try {
    cfg.train_years = data::parse_year_range(train_years);
    cfg.val_years = data::parse_year_range(val_years);
    cfg.test_years = data::parse_year_range(test_years);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  if (needs_input(cfg.command) && cfg.input.empty()) {
    err << "error: " << cfg.command << " requires --input\n";
    return kExitUsage;
  }
  if (needs_model(cfg.command) && cfg.model_file.empty()) {
    err << "error: " << cfg.command << " requires --model-file\n";
    return kExitUsage;
  }

  try {
    execute(cfg, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitOk;
}

}  // namespace dwmrpm::cli
