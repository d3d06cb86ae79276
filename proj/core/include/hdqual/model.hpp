#pragma once

// Class-prototype HDC model.
//
// Training bundles every encoded sample into its class hypervector, then runs
// mispredict-driven retraining epochs. For a sample I of class c predicted as
// c', both prototypes move by
//
//   C_c  += eta * (1 - cos(C_c,  I)) * I
//   C_c' -= eta * (1 - cos(C_c', I)) * I
//
// with both cosines taken before either vector changes. Prototypes are never
// renormalized. Prediction is the argmax of cosine similarity; exact ties go
// to the label that comes first in Quality order.

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "hdqual/hypervector.hpp"
#include "hdqual/labels.hpp"

namespace hdqual {

struct EncodedSample {
  Hypervector hv;
  Quality label;
};

struct TrainConfig {
  double learning_rate = 0.05;
  std::size_t max_epochs = 20;
  /// Consecutive non-improving epochs tolerated before stopping. 0 stops
  /// after the first retraining pass.
  std::size_t patience = 3;
  std::uint64_t shuffle_seed = 0;

  /// Throws invalid_argument unless learning_rate > 0 and max_epochs >= 1.
  void validate() const;
};

struct Prediction {
  Quality label;
  /// Cosine similarity per class, in the model's label order.
  std::vector<std::pair<Quality, double>> scores;
};

class ClassModel {
 public:
  ClassModel(std::vector<Quality> labels, std::vector<Hypervector> classes,
             double learning_rate, std::uint64_t encoder_fingerprint);

  std::size_t dim() const noexcept { return classes_.empty() ? 0 : classes_.front().dim(); }
  std::span<const Quality> labels() const noexcept { return labels_; }
  std::span<const Hypervector> classes() const noexcept { return classes_; }
  /// Throws unknown_class if `label` was not in the training data.
  const Hypervector& class_vector(Quality label) const;
  Hypervector& class_vector(Quality label);
  bool has_label(Quality label) const noexcept;

  double learning_rate() const noexcept { return learning_rate_; }
  void set_learning_rate(double eta);
  std::uint64_t encoder_fingerprint() const noexcept { return encoder_fingerprint_; }

  const std::vector<std::size_t>& epoch_log() const noexcept { return epoch_log_; }
  void record_epoch(std::size_t mispredicts) { epoch_log_.push_back(mispredicts); }
  void set_epoch_log(std::vector<std::size_t> log) { epoch_log_ = std::move(log); }

  friend bool operator==(const ClassModel&, const ClassModel&) = default;

 private:
  std::size_t slot(Quality label) const;

  std::vector<Quality> labels_;
  std::vector<Hypervector> classes_;
  double learning_rate_;
  std::uint64_t encoder_fingerprint_;
  std::vector<std::size_t> epoch_log_;
};

/// C_c = sum of the hypervectors labelled c. The label set of the model is
/// exactly the set of labels present, in Quality order.
ClassModel bundle_classes(std::span<const EncodedSample> encoded,
                          double learning_rate = 0.05,
                          std::uint64_t encoder_fingerprint = 0);

/// One sequential pass over `encoded` in the given order, updating `model`
/// in place on every misprediction. Returns the number of mispredictions.
std::size_t retrain_epoch(ClassModel& model, std::span<const EncodedSample> encoded);

/// Bundling followed by up to cfg.max_epochs retraining passes, each over a
/// fresh seeded shuffle. Stops early on a clean epoch or when the mispredict
/// count has not improved for cfg.patience epochs.
ClassModel fit(std::span<const EncodedSample> encoded_train, const TrainConfig& cfg,
               std::uint64_t encoder_fingerprint = 0);

Prediction predict(const ClassModel& model, const Hypervector& query);

}  // namespace hdqual
