#include "oracles.hpp"

#include <algorithm>
#include <optional>
#include <stdexcept>

namespace dwmrpm::testing {

namespace {

constexpr int kMaxStepReductions = 4;  // down to h / 1e4

template <typename T>
std::vector<LD> widen(const Tensor<T>& t) {
  return std::vector<LD>(t.raw(), t.raw() + t.size());
}

bool starts_with(const std::string& s, const std::string& prefix) { return s.rfind(prefix, 0) == 0; }

// "deep.2.weight" -> 2 for prefix "deep."; "wide.conv1.bias" -> 1 for "wide.conv".
std::size_t layer_of(const std::string& name, const std::string& prefix) {
  return std::stoul(name.substr(prefix.size()));
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

FiniteDifferenceOracle::FiniteDifferenceOracle(const models::Network& net,
                                               const std::vector<std::vector<double>>& inputs,
                                               const std::vector<double>& targets)
    : kind_(net.spec().kind) {
  const auto& spec = net.spec();
  wide_len_ = kind_ == models::ModelKind::Dwmrpm && spec.coords == models::CoordsWiring::DeepOnly
                  ? spec.input_len - 2
                  : spec.input_len;
  for (const auto& l : net.hidden_layers())
    hidden_.push_back({l.in_dim(), l.out_dim(), widen(l.weights.value), widen(l.bias.value),
                       l.activation == nn::Activation::ReLU});
  for (const auto& c : net.conv_layers())
    convs_.push_back({c.filters(), c.kernel_len(), c.in_channels(), widen(c.kernels.value), widen(c.biases.value),
                      c.activation == nn::Activation::ReLU});
  if (const auto& o = net.output_layer())
    out_ = {o->in_dim(), o->out_dim(), widen(o->weights.value), widen(o->bias.value), false};
  if (const auto& h = net.head()) {
    k_cn_ = widen(h->k_cn.value);
    k_d_ = widen(h->k_d.value);
    bias_ = h->bias ? h->bias->value[0] : 0.0;
  }
  for (const auto* p : net.parameters()) {
    names_.push_back(p->name);
    sizes_[p->name] = p->value.size();
  }
  if (inputs.size() != targets.size()) throw std::invalid_argument("inputs and targets differ in length");
  for (const auto& x : inputs) caches_.push_back(forward(Vec(x.begin(), x.end())));
  targets_.assign(targets.begin(), targets.end());
}

FiniteDifferenceOracle::Vec FiniteDifferenceOracle::dense_pre(const Dense& d, const Vec& in) {
  Vec z(d.out);
  for (std::size_t j = 0; j < d.out; ++j) {
    LD acc = d.b[j];
    for (std::size_t i = 0; i < d.in; ++i) acc += d.w[j * d.in + i] * in[i];
    z[j] = acc;
  }
  return z;
}

FiniteDifferenceOracle::Vec FiniteDifferenceOracle::conv_pre(const Conv& c, const Vec& in, std::size_t len) {
  const std::size_t positions = len - c.klen + 1;
  Vec z(positions * c.filters);
  for (std::size_t p = 0; p < positions; ++p)
    for (std::size_t f = 0; f < c.filters; ++f) {
      LD acc = c.b[f];
      for (std::size_t j = 0; j < c.klen; ++j)
        for (std::size_t ch = 0; ch < c.channels; ++ch)
          acc += c.k[(f * c.klen + j) * c.channels + ch] * in[(p + j) * c.channels + ch];
      z[p * c.filters + f] = acc;
    }
  return z;
}

FiniteDifferenceOracle::Vec FiniteDifferenceOracle::act(Vec z, bool relu) {
  if (relu)
    for (auto& v : z) v = v > 0 ? v : 0;
  return z;
}

FiniteDifferenceOracle::Vec FiniteDifferenceOracle::pool(const Vec& a, std::size_t positions,
                                                         std::size_t filters) const {
  Vec g(filters, 0);
  for (std::size_t p = 0; p < positions; ++p)
    for (std::size_t f = 0; f < filters; ++f) g[f] += a[p * filters + f];
  for (auto& v : g) v /= static_cast<LD>(positions);
  return g;
}

LD FiniteDifferenceOracle::head(const Vec& g, const Vec& h) const {
  LD y = 0;
  switch (kind_) {
    case models::ModelKind::Dwmrpm:
      y = bias_;
      for (std::size_t i = 0; i < g.size(); ++i) y += k_cn_[i] * g[i];
      for (std::size_t i = 0; i < h.size(); ++i) y += k_d_[i] * h[i];
      return y;
    case models::ModelKind::Mlp:
      y = out_.b[0];
      for (std::size_t i = 0; i < h.size(); ++i) y += out_.w[i] * h[i];
      return y;
    case models::ModelKind::Cnn1d:
      y = out_.b[0];
      for (std::size_t i = 0; i < g.size(); ++i) y += out_.w[i] * g[i];
      return y;
  }
  return y;
}

FiniteDifferenceOracle::Cache FiniteDifferenceOracle::forward(const Vec& x) const {
  Cache c;
  c.x = x;
  Vec in = x;
  for (const auto& d : hidden_) {
    c.z.push_back(dense_pre(d, in));
    c.a.push_back(act(c.z.back(), d.relu));
    in = c.a.back();
  }
  if (!convs_.empty()) {
    Vec wide(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(wide_len_));
    std::size_t len = wide_len_;
    for (const auto& cv : convs_) {
      c.cz.push_back(conv_pre(cv, wide, len));
      c.ca.push_back(act(c.cz.back(), cv.relu));
      len = len - cv.klen + 1;
      c.clen.push_back(len);
      wide = c.ca.back();
    }
    c.g = pool(c.ca.back(), len, convs_.back().filters);
  }
  c.y = head(c.g, c.a.empty() ? Vec{} : c.a.back());
  return c;
}

std::vector<double> FiniteDifferenceOracle::outputs() const {
  std::vector<double> y;
  for (const auto& c : caches_) y.push_back(static_cast<double>(c.y));
  return y;
}

LD FiniteDifferenceOracle::loss() const {
  LD acc = 0;
  for (std::size_t s = 0; s < caches_.size(); ++s) acc += (caches_[s].y - targets_[s]) * (caches_[s].y - targets_[s]);
  return acc / static_cast<LD>(caches_.size());
}

LD FiniteDifferenceOracle::after_hidden(const Cache& c, std::size_t layer, std::size_t unit, LD new_z,
                                        bool& crossed) const {
  const auto& d = hidden_[layer];
  if (d.relu && ((c.z[layer][unit] > 0) != (new_z > 0))) crossed = true;
  const LD new_a = d.relu && new_z < 0 ? 0 : new_z;
  Vec h = c.a[layer];
  const LD delta = new_a - h[unit];
  h[unit] = new_a;
  if (layer + 1 < hidden_.size()) {
    // Rank-one update of the next layer, then plain recomputation.
    const auto& next = hidden_[layer + 1];
    Vec z = c.z[layer + 1];
    for (std::size_t j = 0; j < next.out; ++j) z[j] += next.w[j * next.in + unit] * delta;
    for (std::size_t j = 0; j < z.size(); ++j)
      if (next.relu && ((z[j] > 0) != (c.z[layer + 1][j] > 0))) crossed = true;
    h = act(z, next.relu);
    for (std::size_t m = layer + 2; m < hidden_.size(); ++m) {
      z = dense_pre(hidden_[m], h);
      for (std::size_t j = 0; j < z.size(); ++j)
        if (hidden_[m].relu && ((z[j] > 0) != (c.z[m][j] > 0))) crossed = true;
      h = act(z, hidden_[m].relu);
    }
  }
  return head(c.g, h);
}

LD FiniteDifferenceOracle::after_conv(const Cache& c, std::size_t layer, std::size_t filter, const Vec& new_z,
                                      bool& crossed) const {
  const auto& cv = convs_[layer];
  const std::size_t positions = c.clen[layer], filters = cv.filters;
  Vec col(positions);
  for (std::size_t p = 0; p < positions; ++p) {
    const LD old = c.cz[layer][p * filters + filter];
    if (cv.relu && ((old > 0) != (new_z[p] > 0))) crossed = true;
    col[p] = cv.relu && new_z[p] < 0 ? 0 : new_z[p];
  }
  Vec g = c.g;
  if (layer + 1 == convs_.size()) {
    LD sum = 0;
    for (auto v : col) sum += v;
    g[filter] = sum / static_cast<LD>(positions);
  } else {
    // Only one input channel of the next conv changed.
    const auto& next = convs_[layer + 1];
    const std::size_t out_len = c.clen[layer + 1];
    Vec z = c.cz[layer + 1];
    for (std::size_t p = 0; p < out_len; ++p)
      for (std::size_t f = 0; f < next.filters; ++f) {
        LD acc = 0;
        for (std::size_t j = 0; j < next.klen; ++j)
          acc += next.k[(f * next.klen + j) * next.channels + filter] *
                 (col[p + j] - c.ca[layer][(p + j) * filters + filter]);
        z[p * next.filters + f] += acc;
      }
    for (std::size_t i = 0; i < z.size(); ++i)
      if (next.relu && ((z[i] > 0) != (c.cz[layer + 1][i] > 0))) crossed = true;
    Vec a = act(z, next.relu);
    std::size_t len = out_len;
    for (std::size_t m = layer + 2; m < convs_.size(); ++m) {
      z = conv_pre(convs_[m], a, len);
      for (std::size_t i = 0; i < z.size(); ++i)
        if (convs_[m].relu && ((z[i] > 0) != (c.cz[m][i] > 0))) crossed = true;
      a = act(z, convs_[m].relu);
      len = c.clen[m];
    }
    g = pool(a, len, convs_.back().filters);
  }
  return head(g, c.a.empty() ? Vec{} : c.a.back());
}

LD FiniteDifferenceOracle::perturbed_output(const Cache& c, const std::string& name, std::size_t index, LD delta,
                                            bool& crossed) const {
  if (starts_with(name, "deep.")) {
    const std::size_t l = layer_of(name, "deep.");
    const auto& d = hidden_[l];
    if (ends_with(name, ".weight")) {
      const std::size_t j = index / d.in, i = index % d.in;
      const LD input = l == 0 ? c.x[i] : c.a[l - 1][i];
      return after_hidden(c, l, j, c.z[l][j] + delta * input, crossed);
    }
    return after_hidden(c, l, index, c.z[l][index] + delta, crossed);
  }
  if (starts_with(name, "wide.conv")) {
    const std::size_t l = layer_of(name, "wide.conv");
    const auto& cv = convs_[l];
    const std::size_t positions = c.clen[l];
    const Vec& in = l == 0 ? c.x : c.ca[l - 1];
    Vec z(positions);
    if (ends_with(name, ".kernel")) {
      const std::size_t f = index / (cv.klen * cv.channels), rest = index % (cv.klen * cv.channels);
      const std::size_t j = rest / cv.channels, ch = rest % cv.channels;
      for (std::size_t p = 0; p < positions; ++p)
        z[p] = c.cz[l][p * cv.filters + f] + delta * in[(p + j) * cv.channels + ch];
      return after_conv(c, l, f, z, crossed);
    }
    for (std::size_t p = 0; p < positions; ++p) z[p] = c.cz[l][p * cv.filters + index] + delta;
    return after_conv(c, l, index, z, crossed);
  }
  const Vec& h = c.a.empty() ? c.g : c.a.back();
  if (name == "output.weight") {
    const Vec& feat = kind_ == models::ModelKind::Cnn1d ? c.g : h;
    LD y = out_.b[0];
    for (std::size_t i = 0; i < feat.size(); ++i) y += (out_.w[i] + (i == index ? delta : 0)) * feat[i];
    return y;
  }
  if (name == "output.bias") {
    LD y = out_.b[0] + delta;
    const Vec& feat = kind_ == models::ModelKind::Cnn1d ? c.g : h;
    for (std::size_t i = 0; i < feat.size(); ++i) y += out_.w[i] * feat[i];
    return y;
  }
  if (name == "head.k_cn" || name == "head.k_d" || name == "head.bias") {
    LD y = bias_ + (name == "head.bias" ? delta : 0);
    for (std::size_t i = 0; i < c.g.size(); ++i)
      y += (k_cn_[i] + (name == "head.k_cn" && i == index ? delta : 0)) * c.g[i];
    for (std::size_t i = 0; i < c.a.back().size(); ++i)
      y += (k_d_[i] + (name == "head.k_d" && i == index ? delta : 0)) * c.a.back()[i];
    return y;
  }
  throw std::invalid_argument("oracle does not know parameter " + name);
}

GradCheckReport FiniteDifferenceOracle::check(const std::map<std::string, models::TensorR>& analytic, double h,
                                              double rel_tol, double small_threshold, double abs_tol) const {
  GradCheckReport r;
  const LD n = static_cast<LD>(caches_.size());
  for (const auto& name : names_) {
    auto it = analytic.find(name);
    if (it == analytic.end() || it->second.size() != sizes_.at(name)) {
      ++r.failures;
      r.failed.push_back(name + ": missing or mis-shaped analytic gradient");
      continue;
    }
    // Mean loss with parameter idx shifted by delta; flags any ReLU flip.
    auto shifted = [&](std::size_t idx, LD delta, bool& crossed) {
      LD sum = 0;
      for (std::size_t s = 0; s < caches_.size(); ++s) {
        const LD y = perturbed_output(caches_[s], name, idx, delta, crossed);
        sum += (y - targets_[s]) * (y - targets_[s]);
      }
      return sum / n;
    };
    for (std::size_t idx = 0; idx < sizes_.at(name); ++idx) {
      bool up = false, down = false;
      LD step = h;
      LD lp = shifted(idx, step, up), lm = shifted(idx, -step, down);
      const bool crossed = up || down;
      // A difference taken across a ReLU kink measures no derivative; shrink
      // the step until both nudges stay on the same linear piece.
      for (int k = 0; (up || down) && k < kMaxStepReductions; ++k) {
        step /= 10;
        up = down = false;
        lp = shifted(idx, step, up);
        lm = shifted(idx, -step, down);
      }
      double fd = static_cast<double>((lp - lm) / (2 * step));
      std::optional<double> other;
      if (up || down) {
        // Some pre-activation sits exactly on the kink, so only one-sided
        // derivatives exist. The library's ReLU'(0) = 0 picks one of them.
        ++r.kink_unresolved;
        const LD l0 = loss();
        fd = static_cast<double>((lp - l0) / step);
        other = static_cast<double>((l0 - lm) / step);
      }
      const double an = it->second[idx];
      auto error_of = [&](double ref, bool& ok) {
        const double mag = std::max(std::fabs(ref), std::fabs(an));
        const double err = std::fabs(ref - an);
        if (mag < small_threshold) {
          ok = err < abs_tol;
          return std::pair{err, false};
        }
        ok = err / mag < rel_tol;
        return std::pair{err / mag, true};
      };
      bool ok = false;
      auto [e, relative] = error_of(fd, ok);
      if (!ok && other) {
        bool ok2 = false;
        const auto alt = error_of(*other, ok2);
        if (ok2 || alt.first < e) {
          ok = ok2;
          e = alt.first;
          relative = alt.second;
          fd = *other;
        }
      }
      if (relative) {
        if (e > r.max_rel_error) {
          r.max_rel_error = e;
          r.worst = name + "[" + std::to_string(idx) + "]";
        }
      } else {
        r.max_abs_error_small = std::max(r.max_abs_error_small, e);
      }
      ++r.checked;
      if (crossed) ++r.kink_crossings;
      if (!ok) {
        ++r.failures;
        if (r.failed.size() < 10)
          r.failed.push_back(name + "[" + std::to_string(idx) + "] analytic " + std::to_string(an) + " fd " +
                             std::to_string(fd) + (other ? " (one-sided, pre-activation on kink)" : crossed ? " (ReLU kink at h)" : ""));
      }
    }
  }
  return r;
}

}  // namespace dwmrpm::testing
