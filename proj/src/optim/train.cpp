#include "dwmrpm/optim/train.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "dwmrpm/optim/loss.hpp"

namespace dwmrpm::optim {

using models::Network;
using models::Real;
using models::TensorR;

namespace {

constexpr std::uint64_t kDropoutStream = 1;
constexpr std::uint64_t kShuffleStream = 2;
constexpr std::size_t kEvalChunk = 32;

void check_inputs(const Network& net, std::span<const data::WindowSample> samples, const char* which) {
  for (const auto& s : samples)
    if (s.inputs.size() != net.spec().input_len)
      throw ShapeError(std::string(which) + " sample for " + s.station_id + " has " +
                       std::to_string(s.inputs.size()) + " inputs, model expects " +
                       std::to_string(net.spec().input_len));
}

std::vector<data::WindowSample> gather(std::span<const data::WindowSample> set, std::span<const std::size_t> idx) {
  std::vector<data::WindowSample> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(set[i]);
  return out;
}

}  // namespace

nlohmann::json history_to_json(const TrainHistory& history) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t e = 0; e < history.train_mse.size(); ++e) {
    nlohmann::json row{{"epoch", e + 1}, {"train_mse", history.train_mse[e]}};
    row["val_mse"] = e < history.val_mse.size() ? nlohmann::json(history.val_mse[e]) : nlohmann::json(nullptr);
    rows.push_back(std::move(row));
  }
  return {{"epochs", rows},
          {"best_epoch", history.best_epoch ? nlohmann::json(*history.best_epoch + 1) : nlohmann::json(nullptr)}};
}

double train_step(Network& network, AdamState<Real>& state, const TensorR& inputs, const TensorR& targets,
                  Rng& dropout_rng) {
  models::Tape tape;
  const nn::Var y = network.forward(tape, tape.constant(inputs), nn::DropoutMode::Train, dropout_rng);
  const nn::Var loss = mse_loss(tape, y, targets);
  const Real value = tape.value(loss)[0];
  if (!std::isfinite(value)) throw TrainingDiverged("loss is not finite");
  const auto grads = backward(tape, loss);
  auto params = network.parameters();
  adam_step<Real>(params, grads, state);
  return value;
}

double evaluate_mse(const Network& network, std::span<const data::WindowSample> samples) {
  if (samples.empty()) throw ContractError("evaluate_mse needs at least one sample");
  double sum = 0;
  for (std::size_t begin = 0; begin < samples.size(); begin += kEvalChunk) {
    const auto chunk = samples.subspan(begin, std::min(kEvalChunk, samples.size() - begin));
    const TensorR pred = network.predict_batch(models::stack_inputs(chunk));
    for (std::size_t i = 0; i < chunk.size(); ++i) {
      const double d = pred[i] - chunk[i].target;
      sum += d * d;
    }
  }
  return sum / static_cast<double>(samples.size());
}

TrainResult train(const models::ModelSpec& spec, std::span<const data::WindowSample> train_set,
                  std::span<const data::WindowSample> val_set, const TrainConfig& cfg,
                  const data::NormalizationParams& normalization, const EpochCallback& on_epoch) {
  if (train_set.empty()) throw ContractError("training set is empty");
  if (cfg.batch_size == 0) throw InvalidParameter("batch size must be positive");
  if (!(cfg.lr > 0) || !std::isfinite(cfg.lr)) throw InvalidParameter("learning rate must be positive");
  data::validate(normalization);

  Network network(spec);
  check_inputs(network, train_set, "training");
  check_inputs(network, val_set, "validation");

  AdamState<Real> adam;
  adam.config.lr = cfg.lr;
  Rng dropout_rng(derive_seed(cfg.seed, kDropoutStream));
  Rng shuffle_rng(derive_seed(cfg.seed, kShuffleStream));

  TrainHistory history;
  std::optional<Network> best;
  double best_val = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (cfg.shuffle) std::shuffle(order.begin(), order.end(), shuffle_rng);
    double weighted = 0;
    try {
      for (std::size_t begin = 0; begin < order.size(); begin += cfg.batch_size) {
        const std::span<const std::size_t> idx(order.data() + begin, std::min(cfg.batch_size, order.size() - begin));
        const auto batch = gather(train_set, idx);
        const double loss =
            train_step(network, adam, models::stack_inputs(batch), models::stack_targets(batch), dropout_rng);
        weighted += loss * static_cast<double>(idx.size());
      }
    } catch (const TrainingDiverged& e) {
      throw TrainingDiverged("training diverged in epoch " + std::to_string(epoch + 1) + ": " + e.what());
    }
    history.train_mse.push_back(weighted / static_cast<double>(train_set.size()));

    double val = std::numeric_limits<double>::quiet_NaN();
    if (!val_set.empty()) {
      val = evaluate_mse(network, val_set);
      if (!std::isfinite(val))
        throw TrainingDiverged("validation loss is not finite in epoch " + std::to_string(epoch + 1));
      history.val_mse.push_back(val);
      if (val < best_val) {
        best_val = val;
        history.best_epoch = epoch;
        if (cfg.keep_best_validation) best = network;
      }
    }
    if (on_epoch && !on_epoch(epoch, history.train_mse.back(), val)) break;
  }

  models::TrainingMetadata md;
  md.seed = cfg.seed;
  md.epochs = history.epochs();
  md.best_epoch = history.best_epoch ? *history.best_epoch + 1 : 0;
  md.train_samples = train_set.size();
  md.data_fingerprint = normalization.fingerprint();
  if (best) network = std::move(*best);
  return {{std::move(network), normalization, std::move(md)}, std::move(history)};
}

}  // namespace dwmrpm::optim
