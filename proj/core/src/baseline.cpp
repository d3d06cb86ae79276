#include "hdqual/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "hdqual/error.hpp"
#include "hdqual/random.hpp"

namespace hdqual {

std::string_view to_string(Activation a) noexcept {
  return a == Activation::relu ? "relu" : "tanh";
}

Activation parse_activation(std::string_view text) {
  if (text == "relu") return Activation::relu;
  if (text == "tanh") return Activation::tanh;
  throw Error(ErrorCode::invalid_argument, "unknown activation '" + std::string(text) + "'");
}

void MlpTrainConfig::validate() const {
  if (epochs == 0 || batch_size == 0) {
    throw Error(ErrorCode::invalid_argument, "epochs and batch size must be positive");
  }
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw Error(ErrorCode::invalid_argument, "learning rate must be non-negative");
  }
  for (std::size_t h : hidden_sizes) {
    if (h == 0) throw Error(ErrorCode::invalid_argument, "hidden sizes must be positive");
  }
}

MlpModel::MlpModel(std::vector<DenseLayer<float>> layers, Activation activation)
    : layers_(std::move(layers)), activation_(activation) {
  if (layers_.empty()) throw Error(ErrorCode::invalid_argument, "MLP needs at least one layer");
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& L = layers_[l];
    if (L.inputs == 0 || L.outputs == 0 || L.weights.size() != L.inputs * L.outputs ||
        L.bias.size() != L.outputs || (l > 0 && L.inputs != layers_[l - 1].outputs)) {
      throw Error(ErrorCode::dimension_mismatch, "MLP layer shapes do not compose");
    }
  }
  if (layers_.back().outputs != kQualityCount) {
    throw Error(ErrorCode::dimension_mismatch, "MLP output layer must have 3 units");
  }
}

MlpModel MlpModel::init(std::size_t input_size, std::span<const std::size_t> hidden_sizes,
                        Activation activation, std::uint64_t seed) {
  if (input_size == 0) throw Error(ErrorCode::invalid_argument, "MLP input size must be positive");
  std::vector<std::size_t> widths{input_size};
  widths.insert(widths.end(), hidden_sizes.begin(), hidden_sizes.end());
  widths.push_back(kQualityCount);

  Rng rng(derive_seed(seed, "mlp-init"));
  std::vector<DenseLayer<float>> layers;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    DenseLayer<float> L;
    L.inputs = widths[l];
    L.outputs = widths[l + 1];
    L.weights.resize(L.inputs * L.outputs);
    L.bias.assign(L.outputs, 0.0f);
    const double scale = std::sqrt(2.0 / static_cast<double>(L.inputs));
    for (auto& w : L.weights) w = static_cast<float>(scale * rng.normal());
    layers.push_back(std::move(L));
  }
  return MlpModel(std::move(layers), activation);
}

std::size_t MlpModel::parameter_count() const noexcept {
  std::size_t n = 0;
  for (const auto& L : layers_) n += L.weights.size() + L.bias.size();
  return n;
}

bool operator==(const MlpModel& a, const MlpModel& b) {
  if (a.activation_ != b.activation_ || a.layers_.size() != b.layers_.size()) return false;
  for (std::size_t l = 0; l < a.layers_.size(); ++l) {
    if (a.layers_[l].weights != b.layers_[l].weights || a.layers_[l].bias != b.layers_[l].bias) {
      return false;
    }
  }
  return true;
}

namespace {

template <typename T>
T activate(Activation a, T z) {
  return a == Activation::relu ? (z > T(0) ? z : T(0)) : std::tanh(z);
}

// d activation / dz, expressed through the activation output where possible.
template <typename T>
T activate_grad(Activation a, T z, T out) {
  return a == Activation::relu ? (z > T(0) ? T(1) : T(0)) : T(1) - out * out;
}

/// Pre-activations and activations of every layer; acts[0] is the input.
template <typename T>
struct Trace {
  std::vector<std::vector<T>> pre;
  std::vector<std::vector<T>> acts;
};

template <typename T>
void forward(const std::vector<DenseLayer<T>>& layers, Activation act,
             std::span<const double> x, Trace<T>& tr) {
  tr.pre.resize(layers.size());
  tr.acts.resize(layers.size() + 1);
  tr.acts[0].assign(x.begin(), x.end());
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& L = layers[l];
    const auto& in = tr.acts[l];
    auto& z = tr.pre[l];
    auto& a = tr.acts[l + 1];
    z.resize(L.outputs);
    a.resize(L.outputs);
    const bool last = l + 1 == layers.size();
    for (std::size_t o = 0; o < L.outputs; ++o) {
      const T* w = L.weights.data() + o * L.inputs;
      T s = L.bias[o];
      for (std::size_t i = 0; i < L.inputs; ++i) s += w[i] * in[i];
      z[o] = s;
      a[o] = last ? s : activate(act, s);
    }
  }
}

template <typename T>
std::vector<double> softmax(const std::vector<T>& logits) {
  const double top = static_cast<double>(*std::max_element(logits.begin(), logits.end()));
  std::vector<double> p(logits.size());
  double sum = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    p[k] = std::exp(static_cast<double>(logits[k]) - top);
    sum += p[k];
  }
  for (auto& v : p) v /= sum;
  return p;
}

template <typename T>
double cross_entropy(const std::vector<T>& logits, Quality label) {
  const double top = static_cast<double>(*std::max_element(logits.begin(), logits.end()));
  double sum = 0.0;
  for (T z : logits) sum += std::exp(static_cast<double>(z) - top);
  return -(static_cast<double>(logits[index_of(label)]) - top - std::log(sum));
}

/// Accumulates scale * dLoss/dparams into grad_w / grad_b (same shapes as
/// the layers) given a completed forward trace.
template <typename T>
void backward(const std::vector<DenseLayer<T>>& layers, Activation act, const Trace<T>& tr,
              Quality label, T scale, std::vector<std::vector<T>>& grad_w,
              std::vector<std::vector<T>>& grad_b) {
  const auto p = softmax(tr.pre.back());
  std::vector<T> delta(p.size());
  for (std::size_t k = 0; k < p.size(); ++k) {
    delta[k] = scale * static_cast<T>(p[k] - (k == index_of(label) ? 1.0 : 0.0));
  }
  for (std::size_t l = layers.size(); l-- > 0;) {
    const auto& L = layers[l];
    const auto& in = tr.acts[l];
    auto& gw = grad_w[l];
    auto& gb = grad_b[l];
    for (std::size_t o = 0; o < L.outputs; ++o) {
      const T d = delta[o];
      gb[o] += d;
      if (d == T(0)) continue;
      T* g = gw.data() + o * L.inputs;
      for (std::size_t i = 0; i < L.inputs; ++i) g[i] += d * in[i];
    }
    if (l == 0) break;
    std::vector<T> prev(L.inputs, T(0));
    for (std::size_t o = 0; o < L.outputs; ++o) {
      const T d = delta[o];
      if (d == T(0)) continue;
      const T* w = L.weights.data() + o * L.inputs;
      for (std::size_t i = 0; i < L.inputs; ++i) prev[i] += w[i] * d;
    }
    const auto& z = tr.pre[l - 1];
    const auto& a = tr.acts[l];
    for (std::size_t i = 0; i < prev.size(); ++i) prev[i] *= activate_grad(act, z[i], a[i]);
    delta = std::move(prev);
  }
}

std::vector<DenseLayer<double>> to_double(const std::vector<DenseLayer<float>>& layers) {
  std::vector<DenseLayer<double>> out;
  for (const auto& L : layers) {
    out.push_back({L.inputs, L.outputs, std::vector<double>(L.weights.begin(), L.weights.end()),
                   std::vector<double>(L.bias.begin(), L.bias.end())});
  }
  return out;
}

void check_input(const MlpModel& model, std::span<const double> x) {
  if (x.size() != model.input_size()) {
    throw Error(ErrorCode::dimension_mismatch,
                "MLP expects " + std::to_string(model.input_size()) + " inputs, got " +
                    std::to_string(x.size()));
  }
}

template <typename T>
void zero_like(const std::vector<DenseLayer<T>>& layers, std::vector<std::vector<T>>& gw,
               std::vector<std::vector<T>>& gb) {
  gw.resize(layers.size());
  gb.resize(layers.size());
  for (std::size_t l = 0; l < layers.size(); ++l) {
    gw[l].assign(layers[l].weights.size(), T(0));
    gb[l].assign(layers[l].bias.size(), T(0));
  }
}

}  // namespace

std::vector<double> mlp_forward(const MlpModel& model, std::span<const double> x) {
  check_input(model, x);
  Trace<float> tr;
  forward(model.layers(), model.activation(), x, tr);
  return softmax(tr.pre.back());
}

Quality mlp_predict(const MlpModel& model, std::span<const double> x) {
  const auto p = mlp_forward(model, x);
  return kQualities[static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin())];
}

MlpModel mlp_fit(const LabeledDataset& train, const MlpTrainConfig& cfg) {
  cfg.validate();
  train.validate();
  if (train.empty()) throw Error(ErrorCode::empty_dataset, "cannot train the MLP on no data");

  MlpModel model = MlpModel::init(train.feature_length(), cfg.hidden_sizes, cfg.activation,
                                  cfg.seed);
  auto& layers = model.layers();
  std::vector<std::vector<float>> gw, gb;
  Trace<float> tr;
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(derive_seed(cfg.seed, "mlp-order"));

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    shuffle(std::span<std::size_t>(order), rng);
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      zero_like(layers, gw, gb);
      for (std::size_t b = start; b < end; ++b) {
        const std::size_t i = order[b];
        forward(layers, model.activation(), train.samples[i], tr);
        loss_sum += cross_entropy(tr.pre.back(), train.labels[i]);
        backward(layers, model.activation(), tr, train.labels[i], 1.0f, gw, gb);
      }
      const auto step = static_cast<float>(cfg.learning_rate / static_cast<double>(end - start));
      if (step == 0.0f) continue;
      for (std::size_t l = 0; l < layers.size(); ++l) {
        for (std::size_t k = 0; k < gw[l].size(); ++k) layers[l].weights[k] -= step * gw[l][k];
        for (std::size_t k = 0; k < gb[l].size(); ++k) layers[l].bias[k] -= step * gb[l][k];
      }
    }
    model.loss_log().push_back(loss_sum / static_cast<double>(train.size()));
  }
  return model;
}

Evaluation mlp_evaluate(const MlpModel& model, const LabeledDataset& test) {
  test.validate();
  if (test.empty()) throw Error(ErrorCode::empty_dataset, "test set is empty");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < test.size(); ++i) {
    cm.add(test.labels[i], mlp_predict(model, test.samples[i]));
  }
  return {cm, compute_metrics(cm)};
}

MlpGradients mlp_gradients(const MlpModel& model, std::span<const double> x, Quality label,
                           double loss_scale) {
  check_input(model, x);
  const auto layers = to_double(model.layers());
  Trace<double> tr;
  forward(layers, model.activation(), x, tr);
  MlpGradients g;
  zero_like(layers, g.weights, g.bias);
  backward(layers, model.activation(), tr, label, loss_scale, g.weights, g.bias);
  return g;
}

double mlp_loss(const MlpModel& model, std::span<const double> x, Quality label) {
  check_input(model, x);
  const auto layers = to_double(model.layers());
  Trace<double> tr;
  forward(layers, model.activation(), x, tr);
  return cross_entropy(tr.pre.back(), label);
}

double mlp_gradcheck(const MlpModel& model, std::span<const double> x, Quality label,
                     std::uint64_t seed, std::size_t min_params) {
  check_input(model, x);
  constexpr double h = 1e-4;
  auto layers = to_double(model.layers());
  const Activation act = model.activation();

  Trace<double> tr;
  forward(layers, act, x, tr);
  std::vector<std::vector<double>> gw, gb;
  zero_like(layers, gw, gb);
  backward(layers, act, tr, label, 1.0, gw, gb);

  // Flat parameter index -> (layer, is_bias, offset).
  struct Ref {
    std::size_t layer;
    bool bias;
    std::size_t k;
  };
  std::vector<Ref> refs;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    for (std::size_t k = 0; k < layers[l].weights.size(); ++k) refs.push_back({l, false, k});
    for (std::size_t k = 0; k < layers[l].bias.size(); ++k) refs.push_back({l, true, k});
  }
  if (refs.size() > min_params) {
    Rng rng(derive_seed(seed, "gradcheck"));
    shuffle(std::span<Ref>(refs), rng);
    refs.resize(min_params);
  }

  const auto loss_at = [&]() {
    forward(layers, act, x, tr);
    return cross_entropy(tr.pre.back(), label);
  };
  double worst = 0.0;
  for (const Ref& r : refs) {
    double& theta = r.bias ? layers[r.layer].bias[r.k] : layers[r.layer].weights[r.k];
    const double analytic = r.bias ? gb[r.layer][r.k] : gw[r.layer][r.k];
    const double saved = theta;
    theta = saved + h;
    const double up = loss_at();
    theta = saved - h;
    const double down = loss_at();
    theta = saved;
    const double numeric = (up - down) / (2.0 * h);
    const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
    worst = std::max(worst, std::abs(analytic - numeric) / denom);
  }
  return worst;
}

}  // namespace hdqual
