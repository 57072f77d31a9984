#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <string>

#include "dwmrpm/nn/layers.hpp"

namespace dwmrpm::optim {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

template <typename Scalar>
struct AdamState {
  AdamConfig config;
  std::uint64_t step = 0;
  std::map<std::string, Tensor<Scalar>> m;
  std::map<std::string, Tensor<Scalar>> v;

  friend bool operator==(const AdamState& a, const AdamState& b) {
    return a.step == b.step && a.m == b.m && a.v == b.v;
  }
};

/// One bias-corrected Adam update of every parameter in place.
///
/// All gradients are validated before any parameter moves, so a diverged
/// step leaves parameters and state untouched.
template <typename Scalar>
void adam_step(std::span<nn::Parameter<Scalar>* const> params,
               const std::map<std::string, Tensor<Scalar>>& grads, AdamState<Scalar>& state) {
  for (const auto* p : params) {
    auto it = grads.find(p->name);
    if (it == grads.end()) throw ContractError("adam_step: no gradient for parameter '" + p->name + "'");
    if (it->second.shape() != p->value.shape())
      throw ShapeError("adam_step: gradient for '" + p->name + "' has shape " + shape_string(it->second.shape()) +
                       ", parameter is " + shape_string(p->value.shape()));
    if (!it->second.all_finite())
      throw TrainingDiverged("non-finite gradient for parameter '" + p->name + "'");
  }

  const auto& cfg = state.config;
  ++state.step;
  const Scalar b1 = Scalar(cfg.beta1), b2 = Scalar(cfg.beta2);
  const Scalar correct1 = Scalar(1) - std::pow(b1, static_cast<Scalar>(state.step));
  const Scalar correct2 = Scalar(1) - std::pow(b2, static_cast<Scalar>(state.step));
  for (auto* p : params) {
    const auto& g = grads.at(p->name).data().array();
    auto m = state.m.try_emplace(p->name, p->value.shape()).first->second.data().array();
    auto v = state.v.try_emplace(p->name, p->value.shape()).first->second.data().array();
    m = b1 * m + (Scalar(1) - b1) * g;
    v = b2 * v + (Scalar(1) - b2) * g.square();
    p->value.data().array() -=
        Scalar(cfg.lr) * (m / correct1) / ((v / correct2).sqrt() + Scalar(cfg.epsilon));
  }
}

}  // namespace dwmrpm::optim
