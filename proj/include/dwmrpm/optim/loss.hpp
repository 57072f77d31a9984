#pragma once

#include "dwmrpm/nn/tape.hpp"

namespace dwmrpm::optim {

namespace detail {
template <typename Scalar>
void check_loss_operands(const Tensor<Scalar>& pred, const Tensor<Scalar>& target) {
  if (pred.empty() || target.empty() || pred.size() != target.size())
    throw ShapeError("mse_loss: prediction " + shape_string(pred.shape()) + " vs target " +
                     shape_string(target.shape()));
}
}  // namespace detail

/// Mean of squared differences; shapes may differ as long as element counts match.
template <typename Scalar>
Scalar mse_loss(const Tensor<Scalar>& pred, const Tensor<Scalar>& target) {
  detail::check_loss_operands(pred, target);
  return (pred.data() - target.data()).squaredNorm() / static_cast<Scalar>(pred.size());
}

/// Recorded MSE; its backward pushes 2 (pred - target) / N into pred.
template <typename Scalar>
nn::Var mse_loss(nn::GradientTape<Scalar>& tape, nn::Var pred, const Tensor<Scalar>& target) {
  detail::check_loss_operands(tape.value(pred), target);
  Tensor<Scalar> out({1});
  out[0] = mse_loss(tape.value(pred), target);
  auto fn = [pred, target](nn::GradientTape<Scalar>& t, const Tensor<Scalar>& dy) {
    if (!t.needs_grad(pred)) return;
    const Scalar scale = Scalar(2) * dy[0] / static_cast<Scalar>(target.size());
    t.grad(pred).data() += scale * (t.value(pred).data() - target.data());
  };
  return tape.push(std::move(out), {pred}, fn);
}

}  // namespace dwmrpm::optim
