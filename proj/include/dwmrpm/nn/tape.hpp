#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "dwmrpm/nn/layers.hpp"

namespace dwmrpm::nn {

/// Handle to a value recorded on a GradientTape.
struct Var {
  std::size_t index = 0;
};

/// Ordered record of forward operations for reverse-mode differentiation.
///
/// Each recorded node keeps its forward value and a closure that pushes the
/// node's incoming gradient to its inputs. A tape built with record=false keeps
/// values only, which is what inference uses.
template <typename Scalar>
class GradientTape {
 public:
  using TensorT = Tensor<Scalar>;
  using BackwardFn = std::function<void(GradientTape&, const TensorT&)>;

  explicit GradientTape(bool record = true) : record_(record) {}

  bool recording() const { return record_; }
  std::size_t size() const { return nodes_.size(); }

  Var constant(TensorT value) {
    nodes_.push_back({std::move(value), {}, false, nullptr, {}});
    return {nodes_.size() - 1};
  }

  /// Registers a parameter as a differentiable leaf. Watching twice returns the same Var.
  Var watch(const Parameter<Scalar>& p) {
    if (auto it = watched_.find(&p); it != watched_.end()) return {it->second};
    nodes_.push_back({{}, {}, record_, &p, {}});
    watched_.emplace(&p, nodes_.size() - 1);
    return {nodes_.size() - 1};
  }

  Var push(TensorT value, std::initializer_list<Var> inputs, BackwardFn fn) {
    bool needs = false;
    if (record_)
      for (Var in : inputs) needs = needs || nodes_.at(in.index).needs_grad;
    nodes_.push_back({std::move(value), {}, needs, nullptr, needs ? std::move(fn) : BackwardFn{}});
    return {nodes_.size() - 1};
  }

  /// Parameter leaves read through to the parameter, which must outlive the tape.
  const TensorT& value(Var v) const {
    const auto& node = nodes_.at(v.index);
    return node.param ? node.param->value : node.value;
  }
  bool needs_grad(Var v) const { return nodes_.at(v.index).needs_grad; }

  /// Gradient accumulator for v, zero-initialised on first use.
  TensorT& grad(Var v) {
    auto& node = nodes_.at(v.index);
    if (node.grad.empty()) node.grad = TensorT(value(v).shape());
    return node.grad;
  }

  template <typename S>
  friend std::map<std::string, Tensor<S>> backward(GradientTape<S>& tape, Var loss);

 private:
  struct Node {
    TensorT value;
    TensorT grad;
    bool needs_grad = false;
    const Parameter<Scalar>* param = nullptr;
    BackwardFn backward;
  };

  bool record_;
  std::vector<Node> nodes_;
  std::map<const Parameter<Scalar>*, std::size_t> watched_;
};

/// Replays the tape from a scalar loss and returns d(loss)/d(parameter) for every
/// watched parameter, keyed by parameter name.
template <typename Scalar>
std::map<std::string, Tensor<Scalar>> backward(GradientTape<Scalar>& tape, Var loss) {
  if (!tape.recording()) throw ContractError("backward called on a non-recording tape");
  if (loss.index >= tape.nodes_.size()) throw ContractError("backward: loss is not on this tape");
  if (tape.value(loss).size() != 1)
    throw ContractError("backward requires a scalar loss, got " + shape_string(tape.value(loss).shape()));
  for (auto& node : tape.nodes_) node.grad = {};
  tape.grad(loss).data().setOnes();
  for (std::size_t i = loss.index + 1; i-- > 0;) {
    auto& node = tape.nodes_[i];
    if (!node.needs_grad || node.grad.empty() || !node.backward) continue;
    node.backward(tape, node.grad);
  }
  std::map<std::string, Tensor<Scalar>> grads;
  for (const auto& [param, index] : tape.watched_) {
    const auto& node = tape.nodes_[index];
    grads.emplace(param->name, node.grad.empty() ? Tensor<Scalar>(param->value.shape()) : node.grad);
  }
  return grads;
}

// ---------------------------------------------------------------------------
// Recorded operations.

/// y = x W^T (+ b); x [B x in], W [out x in], b [out].
template <typename Scalar>
Var affine(GradientTape<Scalar>& tape, Var x, Var w, std::optional<Var> b) {
  auto y = affine_forward(tape.value(x), tape.value(w), b ? &tape.value(*b) : nullptr);
  const Var bias = b.value_or(Var{});
  const bool has_bias = b.has_value();
  auto fn = [x, w, bias, has_bias](GradientTape<Scalar>& t, const Tensor<Scalar>& dy) {
    const auto& xv = t.value(x);
    const auto& wv = t.value(w);
    const std::size_t rows = xv.rank() == 2 ? xv.dim(0) : 1;
    const auto dym = dy.matrix(rows, wv.dim(0));
    if (t.needs_grad(w)) t.grad(w).matrix().noalias() += dym.transpose() * xv.matrix(rows, wv.dim(1));
    if (has_bias && t.needs_grad(bias)) t.grad(bias).data() += dym.colwise().sum().transpose();
    if (t.needs_grad(x)) t.grad(x).matrix(rows, wv.dim(1)).noalias() += dym * wv.matrix();
  };
  return has_bias ? tape.push(std::move(y), {x, w, bias}, fn) : tape.push(std::move(y), {x, w}, fn);
}

template <typename Scalar>
Var relu(GradientTape<Scalar>& tape, Var x) {
  auto fn = [x](GradientTape<Scalar>& t, const Tensor<Scalar>& dy) {
    if (!t.needs_grad(x)) return;
    // Subgradient at exactly zero is taken as 0.
    t.grad(x).data().array() +=
        (t.value(x).data().array() > Scalar(0)).select(dy.data().array(), Scalar(0));
  };
  return tape.push(relu_forward(tape.value(x)), {x}, fn);
}

/// Inverted dropout. Eval mode (or rate 0) records an identity and draws nothing from rng.
template <typename Scalar>
Var dropout(GradientTape<Scalar>& tape, Var x, const DropoutLayer& layer, Rng& rng) {
  check_dropout_rate(layer.rate);
  if (layer.mode == DropoutMode::Eval || layer.rate == 0.0) return x;
  auto mask = dropout_mask<Scalar>(tape.value(x).shape(), layer.rate, rng);
  Tensor<Scalar> y = tape.value(x);
  y.data().array() *= mask.data().array();
  auto fn = [x, mask = std::move(mask)](GradientTape<Scalar>& t, const Tensor<Scalar>& dy) {
    if (t.needs_grad(x)) t.grad(x).data().array() += dy.data().array() * mask.data().array();
  };
  return tape.push(std::move(y), {x}, std::move(fn));
}

/// Channels-last convolution, x [B x L x C] -> [B x L-K+1 x F].
template <typename Scalar>
Var conv1d(GradientTape<Scalar>& tape, Var x, Var kernels, Var biases) {
  const auto& xv0 = tape.value(x);
  const auto& kv0 = tape.value(kernels);
  check_conv1d_operands(xv0, kv0, tape.value(biases));
  // The im2col patches are needed again for dK; keep them rather than rebuild.
  auto patches = std::make_shared<const typename Tensor<Scalar>::RowMatrix>(conv1d_patches(xv0, kv0.dim(1)));
  auto y = conv1d_from_patches(*patches, kv0, tape.value(biases), xv0.dim(0));
  if (!tape.recording() || !tape.needs_grad(kernels)) patches.reset();
  auto fn = [x, kernels, biases, patches](GradientTape<Scalar>& t, const Tensor<Scalar>& dy) {
    const auto& xv = t.value(x);
    const auto& kv = t.value(kernels);
    const std::size_t batch = xv.dim(0), len = xv.dim(1), ch = xv.dim(2);
    const std::size_t filters = kv.dim(0), k = kv.dim(1), width = k * ch;
    const std::size_t out_len = len - k + 1;
    const auto dz = dy.matrix(batch * out_len, filters);
    if (t.needs_grad(kernels)) {
      if (patches)
        t.grad(kernels).matrix(filters, width).noalias() += dz.transpose() * *patches;
      else
        t.grad(kernels).matrix(filters, width).noalias() += dz.transpose() * conv1d_patches(xv, k);
    }
    if (t.needs_grad(biases)) t.grad(biases).data() += dz.colwise().sum().transpose();
    if (t.needs_grad(x)) {
      typename Tensor<Scalar>::RowMatrix dp = dz * kv.matrix(filters, width);
      Scalar* dx = t.grad(x).raw();
      for (std::size_t b = 0; b < batch; ++b)
        for (std::size_t p = 0; p < out_len; ++p) {
          const Scalar* row = dp.row(static_cast<Eigen::Index>(b * out_len + p)).data();
          Scalar* dst = dx + (b * len + p) * ch;
          for (std::size_t j = 0; j < width; ++j) dst[j] += row[j];
        }
    }
  };
  return tape.push(std::move(y), {x, kernels, biases}, fn);
}

/// [B x P x F] -> [B x F].
template <typename Scalar>
Var global_avg_pool(GradientTape<Scalar>& tape, Var x) {
  auto fn = [x](GradientTape<Scalar>& t, const Tensor<Scalar>& dy) {
    if (!t.needs_grad(x)) return;
    const auto& xv = t.value(x);
    const std::size_t batch = xv.dim(0), pos = xv.dim(1), filters = xv.dim(2);
    auto dx = t.grad(x).matrix(batch * pos, filters);
    const Scalar inv = Scalar(1) / static_cast<Scalar>(pos);
    for (std::size_t b = 0; b < batch; ++b)
      dx.middleRows(static_cast<Eigen::Index>(b * pos), static_cast<Eigen::Index>(pos)).rowwise() +=
          dy.matrix().row(static_cast<Eigen::Index>(b)) * inv;
  };
  return tape.push(global_avg_pool_channels_last(tape.value(x)), {x}, fn);
}

template <typename Scalar>
Var concat(GradientTape<Scalar>& tape, Var a, Var b) {
  auto fn = [a, b](GradientTape<Scalar>& t, const Tensor<Scalar>& dy) {
    const auto& av = t.value(a);
    const std::size_t rows = av.rank() == 2 ? av.dim(0) : 1;
    const std::size_t ca = av.size() / rows, cb = t.value(b).size() / rows;
    const auto dym = dy.matrix(rows, ca + cb);
    if (t.needs_grad(a)) t.grad(a).matrix(rows, ca) += dym.leftCols(static_cast<Eigen::Index>(ca));
    if (t.needs_grad(b)) t.grad(b).matrix(rows, cb) += dym.rightCols(static_cast<Eigen::Index>(cb));
  };
  return tape.push(concat_forward(tape.value(a), tape.value(b)), {a, b}, fn);
}

template <typename Scalar>
Var reshape(GradientTape<Scalar>& tape, Var x, Shape shape) {
  auto fn = [x](GradientTape<Scalar>& t, const Tensor<Scalar>& dy) {
    if (t.needs_grad(x)) t.grad(x).data() += dy.data();
  };
  return tape.push(tape.value(x).reshaped(std::move(shape)), {x}, fn);
}

/// Columns [begin, begin+count) of a [B x N] value.
template <typename Scalar>
Var slice_columns(GradientTape<Scalar>& tape, Var x, std::size_t begin, std::size_t count) {
  const auto& xv = tape.value(x);
  if (xv.rank() != 2 || begin + count > xv.dim(1) || count == 0)
    throw ShapeError("slice_columns out of range for " + shape_string(xv.shape()));
  Tensor<Scalar> y({xv.dim(0), count});
  y.matrix() = xv.matrix().middleCols(static_cast<Eigen::Index>(begin), static_cast<Eigen::Index>(count));
  auto fn = [x, begin, count](GradientTape<Scalar>& t, const Tensor<Scalar>& dy) {
    if (t.needs_grad(x))
      t.grad(x).matrix().middleCols(static_cast<Eigen::Index>(begin), static_cast<Eigen::Index>(count)) +=
          dy.matrix();
  };
  return tape.push(std::move(y), {x}, fn);
}

// Layer conveniences.

template <typename Scalar>
Var dense(GradientTape<Scalar>& tape, Var x, const DenseLayer<Scalar>& layer) {
  Var y = affine(tape, x, tape.watch(layer.weights), tape.watch(layer.bias));
  return layer.activation == Activation::ReLU ? relu(tape, y) : y;
}

template <typename Scalar>
Var conv1d(GradientTape<Scalar>& tape, Var x, const Conv1DLayer<Scalar>& layer) {
  Var y = conv1d(tape, x, tape.watch(layer.kernels), tape.watch(layer.biases));
  return layer.activation == Activation::ReLU ? relu(tape, y) : y;
}

}  // namespace dwmrpm::nn
