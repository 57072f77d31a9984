#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace dwmrpm::models {

enum class ModelKind { Dwmrpm, Mlp, Cnn1d };

/// Whether the wide (convolutional) path of the joint model also sees the two
/// trailing coordinate values, or only the rainfall sequence.
enum class CoordsWiring { Both, DeepOnly };

ModelKind parse_model_kind(const std::string& name);  // dwmrpm | mlp | cnn
std::string to_string(ModelKind kind);                // same spelling as parse
std::string display_name(ModelKind kind);             // DWMRPM | MLP | 1-DCNN
CoordsWiring parse_coords_wiring(const std::string& name);
std::string to_string(CoordsWiring wiring);

struct ModelSpec {
  ModelKind kind = ModelKind::Dwmrpm;
  std::size_t input_len = 110;  // 108 months + latitude + longitude
  std::vector<std::size_t> deep_widths{300, 200, 100};
  double dropout_rate = 0.3;
  std::size_t conv_filters = 100;
  std::size_t kernel_len = 5;
  std::size_t conv_layers = 1;
  std::uint64_t seed = 0;
  CoordsWiring coords = CoordsWiring::Both;
  bool head_bias = true;

  /// Published configuration for each architecture (two conv layers for the CNN baseline).
  static ModelSpec defaults(ModelKind kind, std::uint64_t seed = 0);

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

/// Throws ShapeError / InvalidParameter for specs that cannot be built.
void validate(const ModelSpec& spec);

nlohmann::json to_json(const ModelSpec& spec);
ModelSpec model_spec_from_json(const nlohmann::json& j);

}  // namespace dwmrpm::models
