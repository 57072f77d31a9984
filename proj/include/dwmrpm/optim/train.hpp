#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "dwmrpm/models/trained_model.hpp"
#include "dwmrpm/optim/adam.hpp"

namespace dwmrpm::optim {

struct TrainConfig {
  std::size_t epochs = 200;
  std::size_t batch_size = 8;
  double lr = 1e-3;
  std::uint64_t seed = 0;
  bool shuffle = true;
  bool keep_best_validation = true;  // false returns the final-epoch weights
};

struct TrainHistory {
  std::vector<double> train_mse;  // running train-mode mean over each epoch's batches
  std::vector<double> val_mse;    // eval-mode; empty when no validation set was given
  std::optional<std::size_t> best_epoch;  // 0-based index into val_mse

  std::size_t epochs() const { return train_mse.size(); }
  friend bool operator==(const TrainHistory&, const TrainHistory&) = default;
};

nlohmann::json history_to_json(const TrainHistory& history);

/// Called after every epoch with (epoch index, train mse, val mse or NaN).
/// Returning false ends training early.
using EpochCallback = std::function<bool(std::size_t, double, double)>;

struct TrainResult {
  models::TrainedModel model;
  TrainHistory history;
};

/// One Adam update on a mini-batch with dropout in train mode; returns the batch MSE
/// measured before the update.
double train_step(models::Network& network, AdamState<models::Real>& state, const models::TensorR& inputs,
                  const models::TensorR& targets, Rng& dropout_rng);

/// Eval-mode mean squared error over samples; does not touch parameters.
double evaluate_mse(const models::Network& network, std::span<const data::WindowSample> samples);

/// Mini-batch Adam over shuffled batches. Dropout masks and shuffle order come
/// from separate streams derived from cfg.seed, so runs repeat bit for bit.
/// The last partial batch is trained on.
TrainResult train(const models::ModelSpec& spec, std::span<const data::WindowSample> train_set,
                  std::span<const data::WindowSample> val_set, const TrainConfig& cfg,
                  const data::NormalizationParams& normalization, const EpochCallback& on_epoch = {});

}  // namespace dwmrpm::optim
