#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "dwmrpm/data/windows.hpp"

namespace dwmrpm::cli {

/// Everything a command needs, mirroring the command-line flags one to one.
/// Serialized as a flat `key = value` text file; a command's effective
/// configuration is written as run_config.txt in its output directory.
struct RunConfig {
  std::string command;
  std::string input;
  std::string output = "out";
  std::string model_file;
  std::string format = "wrd_station";
  data::YearRange train_years = data::kWrdSplit.train;
  data::YearRange val_years = data::kWrdSplit.validation;
  data::YearRange test_years = data::kWrdSplit.test;
  std::size_t window_months = data::kDefaultWindowMonths;
  std::string model = "dwmrpm";
  std::size_t epochs = 200;
  std::size_t batch_size = 8;
  double lr = 1e-3;
  std::uint64_t seed = 42;
  std::string unit = "normalized";
  std::string coords_wiring = "both";
  bool strict_paper_head = false;
  bool final_weights = false;
  std::string split = "test";  // which split predict scores: train | validation | test
  std::string station;         // summarize: restrict to one station id
  std::string near;            // summarize: "LAT,LON", pick the nearest station
  std::size_t synth_stations = 30;
  int synth_start_year = 1968;
  int synth_years = 40;

  data::SplitYears split_years() const { return {train_years, val_years, test_years}; }
  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

void write_run_config(std::ostream& out, const RunConfig& cfg);
/// Starts from defaults and applies every `key = value` line; `#` starts a comment.
/// Unknown keys and unparseable values throw InvalidParameter.
RunConfig read_run_config(std::istream& in);
RunConfig load_run_config(const std::filesystem::path& path);
void save_run_config(const std::filesystem::path& path, const RunConfig& cfg);

}  // namespace dwmrpm::cli
