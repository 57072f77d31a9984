#include "dwmrpm/cli/run_config.hpp"

#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "dwmrpm/core/errors.hpp"
#include "dwmrpm/data/csv.hpp"

namespace dwmrpm::cli {

namespace {

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  if constexpr (std::is_same_v<T, double>) {
    if (auto v = data::parse_double(text)) return *v;
  } else {
    T value{};
    const auto* end = text.data() + text.size();
    if (auto [ptr, ec] = std::from_chars(text.data(), end, value); ec == std::errc{} && ptr == end) return value;
  }
  throw InvalidParameter("config key '" + key + "': cannot parse '" + text + "'");
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true") return true;
  if (text == "false") return false;
  throw InvalidParameter("config key '" + key + "': expected true or false, got '" + text + "'");
}

// Each key with its printer and parser, in file order.
struct Field {
  const char* key;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

template <typename M>
Field text_field(const char* key, M RunConfig::*member) {
  return {key, [member](const RunConfig& c) { return c.*member; },
          [member](RunConfig& c, const std::string& v) { c.*member = v; }};
}

template <typename M>
Field number_field(const char* key, M RunConfig::*member) {
  return {key,
          [member](const RunConfig& c) {
            if constexpr (std::is_same_v<M, double>)
              return data::format_double(c.*member);
            else
              return std::to_string(c.*member);
          },
          [key, member](RunConfig& c, const std::string& v) { c.*member = parse_number<M>(key, v); }};
}

Field bool_field(const char* key, bool RunConfig::*member) {
  return {key, [member](const RunConfig& c) { return std::string(c.*member ? "true" : "false"); },
          [key, member](RunConfig& c, const std::string& v) { c.*member = parse_bool(key, v); }};
}

Field years_field(const char* key, data::YearRange RunConfig::*member) {
  return {key, [member](const RunConfig& c) { return data::to_string(c.*member); },
          [member](RunConfig& c, const std::string& v) { c.*member = data::parse_year_range(v); }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> all{
      text_field("command", &RunConfig::command),
      text_field("input", &RunConfig::input),
      text_field("output", &RunConfig::output),
      text_field("model_file", &RunConfig::model_file),
      text_field("format", &RunConfig::format),
      years_field("train_years", &RunConfig::train_years),
      years_field("val_years", &RunConfig::val_years),
      years_field("test_years", &RunConfig::test_years),
      number_field("window_months", &RunConfig::window_months),
      text_field("model", &RunConfig::model),
      number_field("epochs", &RunConfig::epochs),
      number_field("batch_size", &RunConfig::batch_size),
      number_field("lr", &RunConfig::lr),
      number_field("seed", &RunConfig::seed),
      text_field("unit", &RunConfig::unit),
      text_field("coords_wiring", &RunConfig::coords_wiring),
      bool_field("strict_paper_head", &RunConfig::strict_paper_head),
      bool_field("final_weights", &RunConfig::final_weights),
      text_field("split", &RunConfig::split),
      text_field("station", &RunConfig::station),
      text_field("near", &RunConfig::near),
      number_field("synth_stations", &RunConfig::synth_stations),
      number_field("synth_start_year", &RunConfig::synth_start_year),
      number_field("synth_years", &RunConfig::synth_years),
  };
  return all;
}

}  // namespace

void write_run_config(std::ostream& out, const RunConfig& cfg) {
  out << "# dwmrpm effective run configuration\n";
  for (const auto& f : fields()) out << f.key << " = " << f.get(cfg) << '\n';
}

RunConfig read_run_config(std::istream& in) {
  RunConfig cfg;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto body = data::trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos)
      throw InvalidParameter("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key(data::trim(body.substr(0, eq)));
    const std::string value(data::trim(body.substr(eq + 1)));
    bool known = false;
    for (const auto& f : fields())
      if (key == f.key) {
        f.set(cfg, value);
        known = true;
      }
    if (!known) throw InvalidParameter("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
  }
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config " + path.string());
  return read_run_config(in);
}

void save_run_config(const std::filesystem::path& path, const RunConfig& cfg) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  write_run_config(out, cfg);
}

}  // namespace dwmrpm::cli
