#pragma once

#include <optional>
#include <span>
#include <vector>

#include "dwmrpm/core/random.hpp"
#include "dwmrpm/models/spec.hpp"
#include "dwmrpm/nn/tape.hpp"

namespace dwmrpm::models {

using Real = double;
using TensorR = Tensor<Real>;
using ParameterR = nn::Parameter<Real>;
using Tape = nn::GradientTape<Real>;

/// Scalar output y = k_cn . h_cn + k_d . h_d (+ bias).
struct JointHead {
  ParameterR k_cn;
  ParameterR k_d;
  std::optional<ParameterR> bias;
};

/// One of the three regressors, built from nn layers.
///
///   DWMRPM: deep  x -> [dense+ReLU -> dropout] x3 -> h_d
///           wide  x -> conv1d -> global average pool -> h_cn
///           head  concat(h_cn, h_d) . concat(k_cn, k_d) + bias
///   MLP:    x -> dense+ReLU x3 -> dense(1)
///   CNN1D:  x -> conv1d+ReLU -> conv1d+ReLU -> global average pool -> dense(1)
///
/// Weights are He-initialised from spec.seed, biases start at zero.
class Network {
 public:
  explicit Network(ModelSpec spec);

  const ModelSpec& spec() const { return spec_; }

  /// Every trainable parameter in a fixed order.
  std::vector<ParameterR*> parameters();
  std::vector<const ParameterR*> parameters() const;
  std::size_t parameter_count() const;

  /// Records the forward pass for inputs [B x input_len]; returns a [B x 1] Var.
  nn::Var forward(Tape& tape, nn::Var inputs, nn::DropoutMode mode, Rng& rng) const;

  /// Eval-mode predictions for inputs [B x input_len] -> [B].
  TensorR predict_batch(const TensorR& inputs) const;
  Real predict(std::span<const Real> input) const;

  // Sub-path outputs of the joint model for one input, eval mode.
  TensorR wide_features(std::span<const Real> input) const;  // h_cn
  TensorR deep_features(std::span<const Real> input) const;  // h_d

  const std::vector<nn::DenseLayer<Real>>& hidden_layers() const { return hidden_; }
  const std::vector<nn::Conv1DLayer<Real>>& conv_layers() const { return convs_; }
  const std::optional<nn::DenseLayer<Real>>& output_layer() const { return output_; }
  const std::optional<JointHead>& head() const { return head_; }

  /// Lengths of each conv layer's output for the configured input.
  std::vector<std::size_t> conv_output_lengths() const;

  friend bool operator==(const Network& a, const Network& b);

 private:
  nn::Var deep_path(Tape& tape, nn::Var x, nn::DropoutMode mode, Rng& rng) const;
  nn::Var wide_path(Tape& tape, nn::Var x) const;
  std::size_t wide_input_len() const;

  ModelSpec spec_;
  std::vector<nn::DenseLayer<Real>> hidden_;
  std::vector<nn::Conv1DLayer<Real>> convs_;
  std::optional<nn::DenseLayer<Real>> output_;
  std::optional<JointHead> head_;
};

/// Stacks sample inputs into [B x input_len]; all rows must have equal length.
TensorR stack_rows(std::span<const std::vector<Real>> rows);

}  // namespace dwmrpm::models
