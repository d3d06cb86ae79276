#pragma once

// Recording -> labelled feature vectors.
//
// A recording is cut into non-overlapping windows of n samples; each window
// becomes one feature vector made of the per-channel slices concatenated in
// channel order ([ch0 s0..s(n-1), ch1 s0..s(n-1), ...]). Trailing samples that
// do not fill a window are dropped. Every window inherits the quality label of
// its part, obtained by z-scoring the measured deviations of all parts that
// share a feature id.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hdqual/hdspace.hpp"
#include "hdqual/labels.hpp"

namespace hdqual {

struct Channel {
  std::string name;
  std::vector<double> samples;
};

struct Recording {
  std::vector<Channel> channels;
  double sample_rate_hz = 500.0;
  std::string part_id;
  std::string feature_id;

  /// Samples per channel (T).
  std::size_t length() const noexcept {
    return channels.empty() ? 0 : channels.front().samples.size();
  }
  /// Throws invalid_input unless there is at least one channel, all channels
  /// have equal length and the sample rate is positive.
  void validate() const;
};

struct WindowSpec {
  std::size_t n = 50;
};

struct Provenance {
  std::string part_id;
  std::string feature_id;
  std::size_t window_index = 0;

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct LabeledDataset {
  std::vector<FeatureVector> samples;
  std::vector<Quality> labels;
  std::vector<Provenance> provenance;

  std::size_t size() const noexcept { return samples.size(); }
  bool empty() const noexcept { return samples.empty(); }
  std::size_t feature_length() const noexcept {
    return samples.empty() ? 0 : samples.front().size();
  }
  std::array<std::size_t, kQualityCount> class_counts() const noexcept;
  void push_back(FeatureVector x, Quality y, Provenance p);
  /// Throws invalid_input if the parallel arrays disagree in length or the
  /// feature vectors differ in length.
  void validate() const;
};

enum class StdKind { population, sample };

struct DeviationLabeling {
  std::vector<double> deviations;
  double mean = 0.0;
  double std = 1.0;
  std::vector<double> z_scores;
  std::vector<Quality> categories;
};

/// low below -1, average on [-1, 1], high above 1.
Quality categorize(double z) noexcept;

std::vector<FeatureVector> window(const Recording& rec, WindowSpec spec);

/// Needs at least two parts and a nonzero spread (degenerate_distribution).
DeviationLabeling label_deviation(std::span<const double> deviations,
                                  StdKind kind = StdKind::population);

/// Seeded downsampling of every class to the size of the smallest one.
/// Surviving samples keep their original relative order.
LabeledDataset balance(const LabeledDataset& ds, std::uint64_t seed);

struct TrainTestSplit {
  LabeledDataset train;
  LabeledDataset test;
};

/// Stratified split: each class contributes round(train_fraction * count)
/// samples to train, chosen by a seeded shuffle.
TrainTestSplit split(const LabeledDataset& ds, double train_fraction, std::uint64_t seed);

/// Windows every recording and labels it from the z-scored deviation of its
/// part. Deviations are z-scored separately per feature id.
LabeledDataset build_dataset(std::span<const Recording> recordings,
                             std::span<const double> deviations_mm, WindowSpec spec,
                             StdKind kind = StdKind::population);

/// Per-channel standardization fitted on training data, followed by scaling
/// each feature vector to unit Euclidean norm. The unit-norm step puts the
/// projections B_d . x on the O(1) scale the cosine encoder needs.
class FeatureScaler {
 public:
  FeatureScaler() = default;
  FeatureScaler(std::size_t channels, std::size_t window_length, std::vector<double> means,
                std::vector<double> stds, bool unit_norm);

  static FeatureScaler fit(const LabeledDataset& train, std::size_t channels,
                           bool unit_norm = true);

  std::size_t channels() const noexcept { return means_.size(); }
  std::size_t window_length() const noexcept { return window_length_; }
  const std::vector<double>& means() const noexcept { return means_; }
  const std::vector<double>& stds() const noexcept { return stds_; }
  bool unit_norm() const noexcept { return unit_norm_; }

  void apply(FeatureVector& x) const;
  void apply(LabeledDataset& ds) const;

 private:
  std::size_t window_length_ = 0;
  std::vector<double> means_;
  std::vector<double> stds_;
  bool unit_norm_ = true;
};

/// Windowed, labelled, balanced, split and scaled data ready for encoding.
struct PreparedData {
  LabeledDataset train;
  LabeledDataset test;
  FeatureScaler scaler;
};

/// build_dataset -> balance -> split -> FeatureScaler fitted on train and
/// applied to both halves. Balance and split draw from the "balance" and
/// "split" streams of `root_seed`.
PreparedData prepare_dataset(std::span<const Recording> recordings,
                             std::span<const double> deviations_mm, WindowSpec spec,
                             double train_fraction, std::uint64_t root_seed,
                             StdKind kind = StdKind::population);

struct SynthConfig {
  std::size_t classes = 3;
  std::size_t channels = 8;
  std::size_t length = 2000;
  double noise_sigma = 0.05;
  std::size_t parts_per_class = 6;
  double sample_rate_hz = 500.0;
  std::string feature_id = "counterbore";
  std::uint64_t seed = 0;
};

struct SyntheticData {
  std::vector<Recording> recordings;
  std::vector<double> deviations_mm;
  std::vector<Quality> intended;
};

/// Stand-in for real machine recordings. Every class has a fixed
/// multi-channel template (class-specific frequencies, level shifts and
/// drift); parts add Gaussian noise of noise_sigma times the channel
/// amplitude. Deviations are drawn around class-specific centres so that
/// z-score binning reproduces the intended class. Parts are ordered
/// class-major: all low parts, then average, then high.
SyntheticData gen_synthetic(const SynthConfig& cfg);

}  // namespace hdqual
