#include "dwmrpm/models/network.hpp"

namespace dwmrpm::models {

namespace {

// Seed streams for each layer slot so adding a layer never reshuffles the others.
constexpr std::uint64_t kHiddenStream = 0;
constexpr std::uint64_t kConvStream = 100;
constexpr std::uint64_t kOutputStream = 200;

}  // namespace

Network::Network(ModelSpec spec) : spec_(std::move(spec)) {
  validate(spec_);
  const auto seed = spec_.seed;
  using nn::Activation;

  if (spec_.kind != ModelKind::Cnn1d) {
    std::size_t in = spec_.input_len;
    for (std::size_t i = 0; i < spec_.deep_widths.size(); ++i) {
      hidden_.push_back(nn::make_dense<Real>("deep." + std::to_string(i), in, spec_.deep_widths[i], Activation::ReLU,
                                             derive_seed(seed, kHiddenStream + i)));
      in = spec_.deep_widths[i];
    }
  }
  if (spec_.kind != ModelKind::Mlp) {
    // The joint model's wide path is linear; the CNN baseline rectifies each conv.
    const auto act = spec_.kind == ModelKind::Cnn1d ? Activation::ReLU : Activation::Identity;
    std::size_t channels = 1;
    for (std::size_t i = 0; i < spec_.conv_layers; ++i) {
      convs_.push_back(nn::make_conv1d<Real>("wide.conv" + std::to_string(i), spec_.conv_filters, spec_.kernel_len,
                                             channels, act, derive_seed(seed, kConvStream + i)));
      channels = spec_.conv_filters;
    }
  }

  switch (spec_.kind) {
    case ModelKind::Dwmrpm: {
      const std::size_t wide = spec_.conv_filters, deep = spec_.deep_widths.back();
      JointHead head{{"head.k_cn", nn::he_init<Real>({wide}, wide + deep, derive_seed(seed, kOutputStream))},
                     {"head.k_d", nn::he_init<Real>({deep}, wide + deep, derive_seed(seed, kOutputStream + 1))},
                     std::nullopt};
      if (spec_.head_bias) head.bias = ParameterR{"head.bias", TensorR({1})};
      head_ = std::move(head);
      break;
    }
    case ModelKind::Mlp:
      output_ = nn::make_dense<Real>("output", spec_.deep_widths.back(), 1, Activation::Identity,
                                     derive_seed(seed, kOutputStream));
      break;
    case ModelKind::Cnn1d:
      output_ = nn::make_dense<Real>("output", spec_.conv_filters, 1, Activation::Identity,
                                     derive_seed(seed, kOutputStream));
      break;
  }
}

std::vector<ParameterR*> Network::parameters() {
  std::vector<ParameterR*> out;
  for (auto& l : hidden_) out.insert(out.end(), {&l.weights, &l.bias});
  for (auto& c : convs_) out.insert(out.end(), {&c.kernels, &c.biases});
  if (output_) out.insert(out.end(), {&output_->weights, &output_->bias});
  if (head_) {
    out.insert(out.end(), {&head_->k_cn, &head_->k_d});
    if (head_->bias) out.push_back(&*head_->bias);
  }
  return out;
}

std::vector<const ParameterR*> Network::parameters() const {
  auto mutable_params = const_cast<Network*>(this)->parameters();
  return {mutable_params.begin(), mutable_params.end()};
}

std::size_t Network::parameter_count() const {
  std::size_t n = 0;
  for (const auto* p : parameters()) n += p->value.size();
  return n;
}

std::size_t Network::wide_input_len() const {
  return spec_.kind == ModelKind::Dwmrpm && spec_.coords == CoordsWiring::DeepOnly ? spec_.input_len - 2
                                                                                     : spec_.input_len;
}

std::vector<std::size_t> Network::conv_output_lengths() const {
  std::vector<std::size_t> lens;
  std::size_t len = wide_input_len();
  for (const auto& c : convs_) lens.push_back(len = c.output_len(len));
  return lens;
}

nn::Var Network::deep_path(Tape& tape, nn::Var x, nn::DropoutMode mode, Rng& rng) const {
  for (const auto& layer : hidden_) {
    x = nn::dense(tape, x, layer);
    if (spec_.kind == ModelKind::Dwmrpm) x = nn::dropout(tape, x, nn::DropoutLayer{spec_.dropout_rate, mode}, rng);
  }
  return x;
}

nn::Var Network::wide_path(Tape& tape, nn::Var x) const {
  const std::size_t batch = tape.value(x).dim(0);
  const std::size_t len = wide_input_len();
  if (len != spec_.input_len) x = nn::slice_columns(tape, x, 0, len);
  x = nn::reshape(tape, x, {batch, len, 1});
  for (const auto& conv : convs_) x = nn::conv1d(tape, x, conv);
  return nn::global_avg_pool(tape, x);
}

nn::Var Network::forward(Tape& tape, nn::Var inputs, nn::DropoutMode mode, Rng& rng) const {
  const auto& xv = tape.value(inputs);
  if (xv.rank() != 2 || xv.dim(1) != spec_.input_len)
    throw ShapeError("model expects inputs [batch x " + std::to_string(spec_.input_len) + "], got " +
                     shape_string(xv.shape()));
  switch (spec_.kind) {
    case ModelKind::Dwmrpm: {
      const nn::Var h_d = deep_path(tape, inputs, mode, rng);
      const nn::Var h_cn = wide_path(tape, inputs);
      const nn::Var h = nn::concat(tape, h_cn, h_d);
      const std::size_t width = head_->k_cn.value.size() + head_->k_d.value.size();
      const nn::Var k = nn::reshape(tape, nn::concat(tape, tape.watch(head_->k_cn), tape.watch(head_->k_d)), {1, width});
      std::optional<nn::Var> bias;
      if (head_->bias) bias = tape.watch(*head_->bias);
      return nn::affine(tape, h, k, bias);
    }
    case ModelKind::Mlp:
      return nn::dense(tape, deep_path(tape, inputs, mode, rng), *output_);
    case ModelKind::Cnn1d:
      return nn::dense(tape, wide_path(tape, inputs), *output_);
  }
  throw ContractError("unknown model kind");
}

namespace {
TensorR single_row(std::span<const Real> input, std::size_t expected) {
  if (input.size() != expected)
    throw ShapeError("sample has " + std::to_string(input.size()) + " inputs, model expects " +
                     std::to_string(expected));
  TensorR x({1, input.size()});
  std::copy(input.begin(), input.end(), x.raw());
  return x;
}
}  // namespace

TensorR Network::predict_batch(const TensorR& inputs) const {
  Tape tape(false);
  Rng unused(0);
  const nn::Var y = forward(tape, tape.constant(inputs), nn::DropoutMode::Eval, unused);
  return tape.value(y).reshaped({inputs.dim(0)});
}

Real Network::predict(std::span<const Real> input) const {
  return predict_batch(single_row(input, spec_.input_len))[0];
}

TensorR Network::wide_features(std::span<const Real> input) const {
  if (spec_.kind == ModelKind::Mlp) throw ContractError("the MLP has no wide path");
  Tape tape(false);
  return tape.value(wide_path(tape, tape.constant(single_row(input, spec_.input_len)))).reshaped({spec_.conv_filters});
}

TensorR Network::deep_features(std::span<const Real> input) const {
  if (spec_.kind == ModelKind::Cnn1d) throw ContractError("the CNN baseline has no deep path");
  Tape tape(false);
  Rng unused(0);
  const auto h = tape.value(
      deep_path(tape, tape.constant(single_row(input, spec_.input_len)), nn::DropoutMode::Eval, unused));
  return h.reshaped({h.size()});
}

bool operator==(const Network& a, const Network& b) {
  if (!(a.spec_ == b.spec_)) return false;
  const auto pa = a.parameters(), pb = b.parameters();
  for (std::size_t i = 0; i < pa.size(); ++i)
    if (pa[i]->name != pb[i]->name || !(pa[i]->value == pb[i]->value)) return false;
  return true;
}

TensorR stack_rows(std::span<const std::vector<Real>> rows) {
  if (rows.empty()) throw ShapeError("cannot stack zero rows");
  const std::size_t width = rows.front().size();
  TensorR out({rows.size(), width});
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != width) throw ShapeError("rows have unequal lengths");
    std::copy(rows[i].begin(), rows[i].end(), out.raw() + i * width);
  }
  return out;
}

}  // namespace dwmrpm::models
