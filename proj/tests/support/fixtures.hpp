#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "dwmrpm/data/synthetic.hpp"
#include "dwmrpm/data/windows.hpp"
#include "dwmrpm/models/network.hpp"
#include "dwmrpm/nn/tape.hpp"
#include "dwmrpm/optim/loss.hpp"

namespace dwmrpm::testing {

struct SyntheticData {
  std::vector<data::MonthlySeries> series;
  data::NormalizationParams norm;
  data::DatasetSplit split;
};

/// Default synthetic network of stations pushed through the standard pipeline.
inline SyntheticData synthetic_data(std::uint64_t seed, const data::SynthConfig& cfg = {},
                                    const data::SplitYears& years = data::kWrdSplit) {
  SyntheticData d;
  d.series = data::generate_synthetic(cfg, seed);
  d.norm = data::fit_normalizer(data::truncate_after_year(d.series, years.train.last));
  std::vector<data::WindowSample> all;
  for (const auto& s : d.series) {
    auto w = data::build_windows(s, d.norm);
    all.insert(all.end(), w.begin(), w.end());
  }
  d.split = data::split_by_years(std::move(all), years);
  return d;
}

/// n distinct samples drawn from pool with a seeded shuffle.
inline std::vector<data::WindowSample> pick(const std::vector<data::WindowSample>& pool, std::size_t n,
                                            std::uint64_t seed) {
  std::vector<std::size_t> idx(pool.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  std::vector<data::WindowSample> out;
  for (std::size_t i = 0; i < n && i < idx.size(); ++i) out.push_back(pool[idx[i]]);
  return out;
}

/// Library gradients of the eval-mode batch MSE.
inline std::map<std::string, models::TensorR> analytic_gradients(const models::Network& net,
                                                                 const std::vector<std::vector<double>>& inputs,
                                                                 const std::vector<double>& targets) {
  models::Tape tape;
  Rng unused(0);
  const auto x = tape.constant(models::stack_rows(inputs));
  const auto y = net.forward(tape, x, nn::DropoutMode::Eval, unused);
  models::TensorR t({targets.size()});
  for (std::size_t i = 0; i < targets.size(); ++i) t[i] = targets[i];
  const auto loss = optim::mse_loss(tape, y, t);
  return nn::backward(tape, loss);
}

}  // namespace dwmrpm::testing
