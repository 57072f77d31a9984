#include "dwmrpm/models/trained_model.hpp"

#include <fstream>

#include "dwmrpm/core/errors.hpp"

namespace dwmrpm::models {

namespace {

constexpr const char* kFormat = "dwmrpm-model";
constexpr int kVersion = 1;

nlohmann::json tensor_json(const TensorR& t) {
  // nlohmann writes doubles in shortest round-trip form, which keeps the reload bit-exact.
  return {{"shape", t.shape()}, {"data", std::vector<Real>(t.raw(), t.raw() + t.size())}};
}

TensorR tensor_from_json(const nlohmann::json& j) {
  auto shape = j.at("shape").get<Shape>();
  auto values = j.at("data").get<std::vector<Real>>();
  TensorR t(std::move(shape));
  if (values.size() != t.size()) throw ShapeError("stored tensor data does not match its shape");
  std::copy(values.begin(), values.end(), t.raw());
  return t;
}

}  // namespace

Prediction predict(const TrainedModel& model, const data::WindowSample& sample) {
  Prediction p;
  p.normalized = model.network.predict(sample.inputs);
  p.mm = data::denormalize(p.normalized, model.normalization);
  return p;
}

TensorR stack_inputs(std::span<const data::WindowSample> samples) {
  if (samples.empty()) throw ShapeError("cannot stack zero samples");
  const std::size_t width = samples.front().inputs.size();
  TensorR out({samples.size(), width});
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& in = samples[i].inputs;
    if (in.size() != width) throw ShapeError("samples have unequal input lengths");
    std::copy(in.begin(), in.end(), out.raw() + i * width);
  }
  return out;
}

TensorR stack_targets(std::span<const data::WindowSample> samples) {
  if (samples.empty()) throw ShapeError("cannot stack zero samples");
  TensorR out({samples.size()});
  for (std::size_t i = 0; i < samples.size(); ++i) out[i] = samples[i].target;
  return out;
}

nlohmann::json to_json(const TrainedModel& model) {
  nlohmann::json params = nlohmann::json::array();
  for (const auto* p : model.network.parameters())
    params.push_back({{"name", p->name}, {"tensor", tensor_json(p->value)}});
  const auto& md = model.metadata;
  return {{"format", kFormat},
          {"version", kVersion},
          {"spec", to_json(model.network.spec())},
          {"normalization",
           {{"i_min", model.normalization.i_min},
            {"i_max", model.normalization.i_max},
            {"fingerprint", model.normalization.fingerprint()}}},
          {"metadata",
           {{"seed", md.seed},
            {"epochs", md.epochs},
            {"best_epoch", md.best_epoch},
            {"train_samples", md.train_samples},
            {"data_fingerprint", md.data_fingerprint}}},
          {"parameters", std::move(params)}};
}

TrainedModel trained_model_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != kFormat) throw IoError("not a model document");
    if (j.at("version").get<int>() != kVersion)
      throw IoError("unsupported model version " + std::to_string(j.at("version").get<int>()));

    Network network(model_spec_from_json(j.at("spec")));
    const auto& stored = j.at("parameters");
    auto params = network.parameters();
    if (stored.size() != params.size())
      throw ShapeError("model document has " + std::to_string(stored.size()) + " parameters, spec implies " +
                       std::to_string(params.size()));
    for (std::size_t i = 0; i < params.size(); ++i) {
      const auto name = stored[i].at("name").get<std::string>();
      if (name != params[i]->name)
        throw ShapeError("parameter " + std::to_string(i) + " is '" + name + "', expected '" + params[i]->name + "'");
      auto value = tensor_from_json(stored[i].at("tensor"));
      if (value.shape() != params[i]->value.shape())
        throw ShapeError("parameter '" + name + "' has shape " + shape_string(value.shape()) + ", expected " +
                         shape_string(params[i]->value.shape()));
      params[i]->value = std::move(value);
    }

    data::NormalizationParams norm{j.at("normalization").at("i_min").get<double>(),
                                   j.at("normalization").at("i_max").get<double>()};
    data::validate(norm);

    const auto& m = j.at("metadata");
    TrainingMetadata md{m.at("seed").get<std::uint64_t>(), m.at("epochs").get<std::size_t>(),
                        m.at("best_epoch").get<std::size_t>(), m.at("train_samples").get<std::size_t>(),
                        m.at("data_fingerprint").get<std::string>()};
    return {std::move(network), norm, std::move(md)};
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("malformed model document: ") + e.what());
  }
}

void save_model(const std::filesystem::path& path, const TrainedModel& model) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << to_json(model).dump() << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

TrainedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
  return trained_model_from_json(j);
}

}  // namespace dwmrpm::models
