#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>

#include "dwmrpm/core/errors.hpp"
#include "dwmrpm/core/random.hpp"
#include "dwmrpm/core/tensor.hpp"

namespace dwmrpm::nn {

template <typename Scalar>
struct Parameter {
  std::string name;
  Tensor<Scalar> value;
};

enum class Activation { Identity, ReLU };
enum class DropoutMode { Train, Eval };

/// Fully connected layer: out = f(W x + b), W stored [out x in].
template <typename Scalar>
struct DenseLayer {
  Parameter<Scalar> weights;
  Parameter<Scalar> bias;
  Activation activation = Activation::Identity;

  std::size_t in_dim() const { return weights.value.dim(1); }
  std::size_t out_dim() const { return weights.value.dim(0); }
};

/// Valid (unpadded), stride-1 cross-correlation. Kernels are stored
/// [filters x kernelLen x inChannels] so a flattened row matches one
/// contiguous channels-last input patch.
template <typename Scalar>
struct Conv1DLayer {
  Parameter<Scalar> kernels;
  Parameter<Scalar> biases;
  Activation activation = Activation::Identity;

  std::size_t filters() const { return kernels.value.dim(0); }
  std::size_t kernel_len() const { return kernels.value.dim(1); }
  std::size_t in_channels() const { return kernels.value.dim(2); }
  std::size_t output_len(std::size_t input_len) const {
    if (input_len < kernel_len())
      throw ShapeError("conv1d input length " + std::to_string(input_len) + " shorter than kernel " +
                       std::to_string(kernel_len()));
    return input_len - kernel_len() + 1;
  }
};

struct DropoutLayer {
  double rate = 0.0;
  DropoutMode mode = DropoutMode::Eval;
};

inline void check_dropout_rate(double rate) {
  if (!(rate >= 0.0 && rate < 1.0))
    throw InvalidParameter("dropout rate must lie in [0, 1), got " + std::to_string(rate));
}

/// Zero-mean normal weights with variance 2 / fanIn, drawn from a stream keyed by seed.
template <typename Scalar = double>
Tensor<Scalar> he_init(const Shape& shape, std::size_t fan_in, std::uint64_t seed) {
  check_shape(shape);
  if (fan_in == 0) throw InvalidParameter("he_init: fanIn must be >= 1");
  Rng rng(seed);
  std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / static_cast<double>(fan_in)));
  Tensor<Scalar> out(shape);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<Scalar>(dist(rng));
  return out;
}

template <typename Scalar>
DenseLayer<Scalar> make_dense(const std::string& name, std::size_t in, std::size_t out, Activation act,
                              std::uint64_t seed) {
  return {{name + ".weight", he_init<Scalar>({out, in}, in, seed)},
          {name + ".bias", Tensor<Scalar>({out})},
          act};
}

template <typename Scalar>
Conv1DLayer<Scalar> make_conv1d(const std::string& name, std::size_t filters, std::size_t kernel_len,
                                std::size_t in_channels, Activation act, std::uint64_t seed) {
  return {{name + ".kernel", he_init<Scalar>({filters, kernel_len, in_channels}, kernel_len * in_channels, seed)},
          {name + ".bias", Tensor<Scalar>({filters})},
          act};
}

// ---------------------------------------------------------------------------
// Kernels. Batched tensors are row-major with the batch as leading axis.

/// y = x W^T + b for x [B x in] (or [in]), W [out x in], b [out].
template <typename Scalar>
Tensor<Scalar> affine_forward(const Tensor<Scalar>& x, const Tensor<Scalar>& w, const Tensor<Scalar>* b) {
  if (w.rank() != 2) throw ShapeError("affine weights must be rank 2, got " + shape_string(w.shape()));
  const std::size_t in = w.dim(1), out = w.dim(0);
  const bool batched = x.rank() == 2;
  if (!(x.rank() == 1 || batched) || x.shape().back() != in)
    throw ShapeError("affine input " + shape_string(x.shape()) + " incompatible with weights " +
                     shape_string(w.shape()));
  if (b && b->size() != out) throw ShapeError("affine bias " + shape_string(b->shape()) + " expected [" +
                                              std::to_string(out) + "]");
  const std::size_t rows = batched ? x.dim(0) : 1;
  Tensor<Scalar> y(batched ? Shape{rows, out} : Shape{out});
  auto ym = y.matrix(rows, out);
  ym.noalias() = x.matrix(rows, in) * w.matrix().transpose();
  if (b) ym.rowwise() += b->data().transpose();
  return y;
}

template <typename Scalar>
Tensor<Scalar> relu_forward(Tensor<Scalar> x) {
  x.data() = x.data().cwiseMax(Scalar(0));
  return x;
}

template <typename Scalar>
Tensor<Scalar> apply_activation(Tensor<Scalar> x, Activation act) {
  return act == Activation::ReLU ? relu_forward(std::move(x)) : x;
}

/// im2col for channels-last input [B x L x C]: one row per (sample, position)
/// holding the kernelLen*C contiguous values under the window.
template <typename Scalar>
typename Tensor<Scalar>::RowMatrix conv1d_patches(const Tensor<Scalar>& x, std::size_t kernel_len) {
  const std::size_t batch = x.dim(0), len = x.dim(1), ch = x.dim(2);
  const std::size_t out_len = len - kernel_len + 1;
  const std::size_t width = kernel_len * ch;
  typename Tensor<Scalar>::RowMatrix patches(static_cast<Eigen::Index>(batch * out_len),
                                             static_cast<Eigen::Index>(width));
  for (std::size_t b = 0; b < batch; ++b) {
    const Scalar* src = x.raw() + b * len * ch;
    for (std::size_t p = 0; p < out_len; ++p)
      std::copy_n(src + p * ch, width, patches.row(static_cast<Eigen::Index>(b * out_len + p)).data());
  }
  return patches;
}

/// GEMM half of the convolution: patches [B*P x K*C] -> [B x P x F].
template <typename Scalar>
Tensor<Scalar> conv1d_from_patches(const typename Tensor<Scalar>::RowMatrix& patches, const Tensor<Scalar>& kernels,
                                   const Tensor<Scalar>& biases, std::size_t batch) {
  const std::size_t filters = kernels.dim(0), out_len = static_cast<std::size_t>(patches.rows()) / batch;
  Tensor<Scalar> y({batch, out_len, filters});
  auto ym = y.matrix(batch * out_len, filters);
  ym.noalias() = patches * kernels.matrix(filters, static_cast<std::size_t>(patches.cols())).transpose();
  ym.rowwise() += biases.data().transpose();
  return y;
}

template <typename Scalar>
void check_conv1d_operands(const Tensor<Scalar>& x, const Tensor<Scalar>& kernels, const Tensor<Scalar>& biases) {
  if (x.rank() != 3 || kernels.rank() != 3 || x.dim(2) != kernels.dim(2))
    throw ShapeError("conv1d input " + shape_string(x.shape()) + " incompatible with kernels " +
                     shape_string(kernels.shape()));
  if (x.dim(1) < kernels.dim(1))
    throw ShapeError("conv1d input length " + std::to_string(x.dim(1)) + " shorter than kernel " +
                     std::to_string(kernels.dim(1)));
  if (biases.size() != kernels.dim(0)) throw ShapeError("conv1d bias length does not match filter count");
}

/// Channels-last convolution: x [B x L x C], kernels [F x K x C] -> [B x (L-K+1) x F].
template <typename Scalar>
Tensor<Scalar> conv1d_channels_last(const Tensor<Scalar>& x, const Tensor<Scalar>& kernels,
                                    const Tensor<Scalar>& biases) {
  check_conv1d_operands(x, kernels, biases);
  return conv1d_from_patches(conv1d_patches(x, kernels.dim(1)), kernels, biases, x.dim(0));
}

/// Mean over the position axis: [B x P x F] -> [B x F].
template <typename Scalar>
Tensor<Scalar> global_avg_pool_channels_last(const Tensor<Scalar>& maps) {
  if (maps.rank() != 3) throw ShapeError("global_avg_pool expects [batch x positions x filters]");
  const std::size_t batch = maps.dim(0), pos = maps.dim(1), filters = maps.dim(2);
  Tensor<Scalar> out({batch, filters});
  for (std::size_t b = 0; b < batch; ++b)
    out.matrix().row(static_cast<Eigen::Index>(b)) =
        maps.matrix(batch * pos, filters)
            .middleRows(static_cast<Eigen::Index>(b * pos), static_cast<Eigen::Index>(pos))
            .colwise()
            .mean();
  return out;
}

/// Concatenates along the last axis; rank-1 with rank-1 or rank-2 with matching rows.
template <typename Scalar>
Tensor<Scalar> concat_forward(const Tensor<Scalar>& a, const Tensor<Scalar>& b) {
  if (a.rank() != b.rank() || a.rank() > 2 || (a.rank() == 2 && a.dim(0) != b.dim(0)))
    throw ShapeError("cannot concatenate " + shape_string(a.shape()) + " with " + shape_string(b.shape()));
  const std::size_t rows = a.rank() == 2 ? a.dim(0) : 1;
  const std::size_t ca = a.size() / rows, cb = b.size() / rows;
  Tensor<Scalar> out(a.rank() == 2 ? Shape{rows, ca + cb} : Shape{ca + cb});
  auto om = out.matrix(rows, ca + cb);
  om.leftCols(static_cast<Eigen::Index>(ca)) = a.matrix(rows, ca);
  om.rightCols(static_cast<Eigen::Index>(cb)) = b.matrix(rows, cb);
  return out;
}

/// Inverted-dropout mask: 0 with probability rate, else 1/(1-rate).
template <typename Scalar>
Tensor<Scalar> dropout_mask(const Shape& shape, double rate, Rng& rng) {
  check_dropout_rate(rate);
  Tensor<Scalar> mask(shape);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Scalar keep = Scalar(1) / Scalar(1.0 - rate);
  for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = unit(rng) < rate ? Scalar(0) : keep;
  return mask;
}

// ---------------------------------------------------------------------------
// Single-sample layer API.

/// Accepts [in] or a batch [B x in].
template <typename Scalar>
Tensor<Scalar> dense_forward(const DenseLayer<Scalar>& layer, const Tensor<Scalar>& input) {
  return apply_activation(affine_forward(input, layer.weights.value, &layer.bias.value), layer.activation);
}

/// Accepts a signal [L] (single channel) or [C x L]; returns feature maps [filters x positions].
template <typename Scalar>
Tensor<Scalar> conv1d_forward(const Conv1DLayer<Scalar>& layer, const Tensor<Scalar>& input) {
  if (input.rank() > 2) throw ShapeError("conv1d_forward expects [L] or [C x L]");
  const std::size_t ch = input.rank() == 2 ? input.dim(0) : 1;
  const std::size_t len = input.shape().back();
  Tensor<Scalar> x({1, len, ch});
  x.matrix(len, ch) = input.matrix(ch, len).transpose();
  const auto y = conv1d_channels_last(x, layer.kernels.value, layer.biases.value);
  const std::size_t out_len = y.dim(1), filters = y.dim(2);
  Tensor<Scalar> out({filters, out_len});
  out.matrix() = y.matrix(out_len, filters).transpose();
  return apply_activation(std::move(out), layer.activation);
}

/// [filters x positions] -> [filters].
template <typename Scalar>
Tensor<Scalar> global_avg_pool(const Tensor<Scalar>& maps) {
  if (maps.rank() != 2) throw ShapeError("global_avg_pool expects [filters x positions]");
  Tensor<Scalar> out({maps.dim(0)});
  out.data() = maps.matrix().rowwise().mean();
  return out;
}

template <typename Scalar>
Tensor<Scalar> dropout_forward(const DropoutLayer& layer, const Tensor<Scalar>& input, Rng& rng) {
  check_dropout_rate(layer.rate);
  if (layer.mode == DropoutMode::Eval || layer.rate == 0.0) return input;
  Tensor<Scalar> out = input;
  out.data().array() *= dropout_mask<Scalar>(input.shape(), layer.rate, rng).data().array();
  return out;
}

}  // namespace dwmrpm::nn
