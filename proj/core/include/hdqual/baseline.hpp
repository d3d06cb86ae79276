#pragma once

// Gradient-trained comparison baseline: a fully connected network with
// softmax cross-entropy, trained by minibatch SGD in 32-bit floats.
// Gradient checks run in 64-bit.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "hdqual/eval.hpp"
#include "hdqual/labels.hpp"
#include "hdqual/pipeline.hpp"

namespace hdqual {

enum class Activation : std::uint8_t { relu, tanh };
std::string_view to_string(Activation a) noexcept;
Activation parse_activation(std::string_view text);

template <typename T>
struct DenseLayer {
  std::size_t inputs = 0;
  std::size_t outputs = 0;
  std::vector<T> weights;  // outputs x inputs, row-major
  std::vector<T> bias;     // outputs
};

struct MlpTrainConfig {
  std::vector<std::size_t> hidden_sizes{128};
  Activation activation = Activation::relu;
  std::size_t epochs = 100;
  std::size_t batch_size = 32;
  double learning_rate = 0.1;
  std::uint64_t seed = 0;

  /// learning_rate may be 0 (parameters then stay at their init values);
  /// epochs, batch_size and every hidden size must be positive.
  void validate() const;
};

class MlpModel {
 public:
  /// He-scaled normal weights (std sqrt(2 / fan_in)), zero biases.
  static MlpModel init(std::size_t input_size, std::span<const std::size_t> hidden_sizes,
                       Activation activation, std::uint64_t seed);
  MlpModel(std::vector<DenseLayer<float>> layers, Activation activation);

  std::size_t input_size() const noexcept { return layers_.front().inputs; }
  Activation activation() const noexcept { return activation_; }
  const std::vector<DenseLayer<float>>& layers() const noexcept { return layers_; }
  std::vector<DenseLayer<float>>& layers() noexcept { return layers_; }
  std::size_t parameter_count() const noexcept;

  /// Mean training loss of every epoch run by mlp_fit.
  const std::vector<double>& loss_log() const noexcept { return loss_log_; }
  std::vector<double>& loss_log() noexcept { return loss_log_; }

  friend bool operator==(const MlpModel&, const MlpModel&);

 private:
  std::vector<DenseLayer<float>> layers_;
  Activation activation_;
  std::vector<double> loss_log_;
};

/// Softmax class probabilities in Quality order.
std::vector<double> mlp_forward(const MlpModel& model, std::span<const double> x);
Quality mlp_predict(const MlpModel& model, std::span<const double> x);

MlpModel mlp_fit(const LabeledDataset& train, const MlpTrainConfig& cfg);

Evaluation mlp_evaluate(const MlpModel& model, const LabeledDataset& test);

/// Analytic gradients of loss_scale * cross-entropy for one sample, in double.
struct MlpGradients {
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> bias;
};
MlpGradients mlp_gradients(const MlpModel& model, std::span<const double> x, Quality label,
                           double loss_scale = 1.0);
double mlp_loss(const MlpModel& model, std::span<const double> x, Quality label);

/// Max relative error between analytic and central-difference gradients
/// (step 1e-4, double precision) over a seeded subset of at least
/// `min_params` parameters, or all of them if the model is smaller.
double mlp_gradcheck(const MlpModel& model, std::span<const double> x, Quality label,
                     std::uint64_t seed = 0, std::size_t min_params = 100);

}  // namespace hdqual
