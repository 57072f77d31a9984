#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>

#include <nlohmann/json.hpp>

#include "dwmrpm/data/normalize.hpp"
#include "dwmrpm/data/windows.hpp"
#include "dwmrpm/models/network.hpp"

namespace dwmrpm::models {

struct TrainingMetadata {
  std::uint64_t seed = 0;
  std::size_t epochs = 0;
  std::size_t best_epoch = 0;  // 1-based, 0 when untrained
  std::size_t train_samples = 0;
  std::string data_fingerprint;  // NormalizationParams::fingerprint() of the training data

  friend bool operator==(const TrainingMetadata&, const TrainingMetadata&) = default;
};

/// Learned parameters bundled with the normalization needed to read predictions in mm.
struct TrainedModel {
  Network network;
  data::NormalizationParams normalization;
  TrainingMetadata metadata;

  friend bool operator==(const TrainedModel&, const TrainedModel&) = default;
};

struct Prediction {
  Real normalized = 0;
  Real mm = 0;
};

Prediction predict(const TrainedModel& model, const data::WindowSample& sample);

TensorR stack_inputs(std::span<const data::WindowSample> samples);
TensorR stack_targets(std::span<const data::WindowSample> samples);

/// Self-describing JSON document. Parameter arrays are stored as shortest
/// round-trip decimals, so load(save(m)) == m bit for bit.
nlohmann::json to_json(const TrainedModel& model);
TrainedModel trained_model_from_json(const nlohmann::json& j);
void save_model(const std::filesystem::path& path, const TrainedModel& model);
TrainedModel load_model(const std::filesystem::path& path);

}  // namespace dwmrpm::models
