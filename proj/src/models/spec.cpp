#include "dwmrpm/models/spec.hpp"

#include "dwmrpm/core/errors.hpp"

namespace dwmrpm::models {

ModelKind parse_model_kind(const std::string& name) {
  if (name == "dwmrpm") return ModelKind::Dwmrpm;
  if (name == "mlp") return ModelKind::Mlp;
  if (name == "cnn") return ModelKind::Cnn1d;
  throw InvalidParameter("unknown model '" + name + "' (expected dwmrpm, mlp or cnn)");
}

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Dwmrpm: return "dwmrpm";
    case ModelKind::Mlp: return "mlp";
    case ModelKind::Cnn1d: return "cnn";
  }
  return "?";
}

std::string display_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::Dwmrpm: return "DWMRPM";
    case ModelKind::Mlp: return "MLP";
    case ModelKind::Cnn1d: return "1-DCNN";
  }
  return "?";
}

CoordsWiring parse_coords_wiring(const std::string& name) {
  if (name == "both") return CoordsWiring::Both;
  if (name == "deep-only") return CoordsWiring::DeepOnly;
  throw InvalidParameter("unknown coordinate wiring '" + name + "' (expected both or deep-only)");
}

std::string to_string(CoordsWiring wiring) { return wiring == CoordsWiring::Both ? "both" : "deep-only"; }

ModelSpec ModelSpec::defaults(ModelKind kind, std::uint64_t seed) {
  ModelSpec spec;
  spec.kind = kind;
  spec.seed = seed;
  if (kind == ModelKind::Cnn1d) spec.conv_layers = 2;
  return spec;
}

void validate(const ModelSpec& spec) {
  if (spec.input_len == 0) throw ShapeError("model input length must be positive");
  if (!(spec.dropout_rate >= 0.0 && spec.dropout_rate < 1.0))
    throw InvalidParameter("dropout rate must lie in [0, 1)");
  if (spec.kind != ModelKind::Cnn1d) {
    if (spec.deep_widths.empty()) throw InvalidParameter("deep path needs at least one hidden layer");
    for (auto w : spec.deep_widths)
      if (w == 0) throw InvalidParameter("hidden layer width must be positive");
  }
  if (spec.kind != ModelKind::Mlp) {
    if (spec.conv_filters == 0 || spec.kernel_len == 0 || spec.conv_layers == 0)
      throw InvalidParameter("conv filters, kernel length and layer count must be positive");
    std::size_t len = spec.input_len;
    if (spec.kind == ModelKind::Dwmrpm && spec.coords == CoordsWiring::DeepOnly) {
      if (len <= 2) throw ShapeError("deep-only coordinate wiring needs input length > 2");
      len -= 2;
    }
    for (std::size_t i = 0; i < spec.conv_layers; ++i) {
      if (len < spec.kernel_len)
        throw ShapeError("input length " + std::to_string(spec.input_len) + " too short for " +
                         std::to_string(spec.conv_layers) + " conv layer(s) of kernel " +
                         std::to_string(spec.kernel_len));
      len = len - spec.kernel_len + 1;
    }
  }
}

nlohmann::json to_json(const ModelSpec& spec) {
  return {{"kind", to_string(spec.kind)},
          {"input_len", spec.input_len},
          {"deep_widths", spec.deep_widths},
          {"dropout_rate", spec.dropout_rate},
          {"conv_filters", spec.conv_filters},
          {"kernel_len", spec.kernel_len},
          {"conv_layers", spec.conv_layers},
          {"seed", spec.seed},
          {"coords_wiring", to_string(spec.coords)},
          {"head_bias", spec.head_bias}};
}

ModelSpec model_spec_from_json(const nlohmann::json& j) {
  ModelSpec spec;
  spec.kind = parse_model_kind(j.at("kind").get<std::string>());
  spec.input_len = j.at("input_len").get<std::size_t>();
  spec.deep_widths = j.at("deep_widths").get<std::vector<std::size_t>>();
  spec.dropout_rate = j.at("dropout_rate").get<double>();
  spec.conv_filters = j.at("conv_filters").get<std::size_t>();
  spec.kernel_len = j.at("kernel_len").get<std::size_t>();
  spec.conv_layers = j.at("conv_layers").get<std::size_t>();
  spec.seed = j.at("seed").get<std::uint64_t>();
  spec.coords = parse_coords_wiring(j.at("coords_wiring").get<std::string>());
  spec.head_bias = j.at("head_bias").get<bool>();
  return spec;
}

}  // namespace dwmrpm::models
