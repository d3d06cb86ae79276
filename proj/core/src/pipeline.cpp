#include "hdqual/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <string>

#include "hdqual/error.hpp"
#include "hdqual/random.hpp"

namespace hdqual {

void Recording::validate() const {
  if (channels.empty()) {
    throw Error(ErrorCode::invalid_input, "recording '" + part_id + "' has no channels");
  }
  for (const auto& ch : channels) {
    if (ch.samples.size() != channels.front().samples.size()) {
      throw Error(ErrorCode::invalid_input, "recording '" + part_id + "': channel '" +
                                                ch.name + "' has a different length");
    }
  }
  if (!(sample_rate_hz > 0.0)) {
    throw Error(ErrorCode::invalid_input,
                "recording '" + part_id + "' has a non-positive sample rate");
  }
}

std::array<std::size_t, kQualityCount> LabeledDataset::class_counts() const noexcept {
  std::array<std::size_t, kQualityCount> counts{};
  for (Quality q : labels) ++counts[index_of(q)];
  return counts;
}

void LabeledDataset::push_back(FeatureVector x, Quality y, Provenance p) {
  samples.push_back(std::move(x));
  labels.push_back(y);
  provenance.push_back(std::move(p));
}

void LabeledDataset::validate() const {
  if (labels.size() != samples.size() || provenance.size() != samples.size()) {
    throw Error(ErrorCode::invalid_input, "dataset arrays differ in length");
  }
  for (const auto& s : samples) {
    if (s.size() != feature_length()) {
      throw Error(ErrorCode::invalid_input, "dataset feature vectors differ in length");
    }
  }
}

Quality categorize(double z) noexcept {
  if (z < -1.0) return Quality::low;
  if (z > 1.0) return Quality::high;
  return Quality::average;
}

std::vector<FeatureVector> window(const Recording& rec, WindowSpec spec) {
  rec.validate();
  if (spec.n == 0) throw Error(ErrorCode::invalid_argument, "window length must be positive");
  const std::size_t length = rec.length();
  if (spec.n > length) {
    throw Error(ErrorCode::window_too_long,
                "window of " + std::to_string(spec.n) + " samples exceeds recording '" +
                    rec.part_id + "' of " + std::to_string(length) + " samples");
  }
  const std::size_t count = length / spec.n;
  std::vector<FeatureVector> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    FeatureVector x;
    x.reserve(spec.n * rec.channels.size());
    for (const auto& ch : rec.channels) {
      const auto first = ch.samples.begin() + static_cast<std::ptrdiff_t>(k * spec.n);
      x.insert(x.end(), first, first + static_cast<std::ptrdiff_t>(spec.n));
    }
    out.push_back(std::move(x));
  }
  return out;
}

DeviationLabeling label_deviation(std::span<const double> deviations, StdKind kind) {
  if (deviations.size() < 2) {
    throw Error(ErrorCode::degenerate_distribution,
                "z-scoring needs at least two parts, got " + std::to_string(deviations.size()));
  }
  DeviationLabeling out;
  out.deviations.assign(deviations.begin(), deviations.end());
  const double n = static_cast<double>(deviations.size());
  out.mean = std::accumulate(deviations.begin(), deviations.end(), 0.0) / n;
  double ss = 0.0;
  for (double d : deviations) ss += (d - out.mean) * (d - out.mean);
  out.std = std::sqrt(ss / (kind == StdKind::population ? n : n - 1.0));
  if (!(out.std > 0.0) || !std::isfinite(out.std)) {
    throw Error(ErrorCode::degenerate_distribution, "deviations have zero spread");
  }
  for (double d : deviations) {
    const double z = (d - out.mean) / out.std;
    out.z_scores.push_back(z);
    out.categories.push_back(categorize(z));
  }
  return out;
}

namespace {

LabeledDataset gather(const LabeledDataset& ds, std::vector<std::size_t> indices) {
  std::sort(indices.begin(), indices.end());
  LabeledDataset out;
  out.samples.reserve(indices.size());
  for (std::size_t i : indices) out.push_back(ds.samples[i], ds.labels[i], ds.provenance[i]);
  return out;
}

std::array<std::vector<std::size_t>, kQualityCount> indices_by_class(const LabeledDataset& ds) {
  std::array<std::vector<std::size_t>, kQualityCount> by_class;
  for (std::size_t i = 0; i < ds.size(); ++i) by_class[index_of(ds.labels[i])].push_back(i);
  return by_class;
}

}  // namespace

LabeledDataset balance(const LabeledDataset& ds, std::uint64_t seed) {
  ds.validate();
  auto by_class = indices_by_class(ds);
  for (Quality q : kQualities) {
    if (by_class[index_of(q)].empty()) {
      throw Error(ErrorCode::empty_class,
                  "class '" + std::string(to_string(q)) + "' has no samples to balance");
    }
  }
  std::size_t minority = ds.size();
  for (const auto& idx : by_class) minority = std::min(minority, idx.size());

  Rng rng(seed);
  std::vector<std::size_t> keep;
  for (auto& idx : by_class) {
    shuffle(std::span<std::size_t>(idx), rng);
    keep.insert(keep.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(minority));
  }
  return gather(ds, std::move(keep));
}

TrainTestSplit split(const LabeledDataset& ds, double train_fraction, std::uint64_t seed) {
  ds.validate();
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw Error(ErrorCode::invalid_argument, "train fraction must lie strictly in (0, 1)");
  }
  auto by_class = indices_by_class(ds);
  Rng rng(seed);
  std::vector<std::size_t> train, test;
  for (Quality q : kQualities) {
    auto& idx = by_class[index_of(q)];
    if (idx.empty()) continue;
    if (idx.size() < 2) {
      throw Error(ErrorCode::stratification, "class '" + std::string(to_string(q)) +
                                                 "' has fewer than 2 samples");
    }
    shuffle(std::span<std::size_t>(idx), rng);
    const auto n_train = static_cast<std::size_t>(
        std::llround(train_fraction * static_cast<double>(idx.size())));
    train.insert(train.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
    test.insert(test.end(), idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
  }
  return {gather(ds, std::move(train)), gather(ds, std::move(test))};
}

LabeledDataset build_dataset(std::span<const Recording> recordings,
                             std::span<const double> deviations_mm, WindowSpec spec,
                             StdKind kind) {
  if (recordings.size() != deviations_mm.size()) {
    throw Error(ErrorCode::invalid_input, "need exactly one deviation per recording");
  }
  if (recordings.empty()) throw Error(ErrorCode::empty_dataset, "no recordings");

  std::map<std::string, std::vector<std::size_t>> by_feature;
  for (std::size_t i = 0; i < recordings.size(); ++i) {
    by_feature[recordings[i].feature_id].push_back(i);
  }
  std::vector<Quality> part_label(recordings.size());
  for (const auto& [feature, parts] : by_feature) {
    std::vector<double> devs;
    for (std::size_t i : parts) devs.push_back(deviations_mm[i]);
    const auto labeling = label_deviation(devs, kind);
    for (std::size_t j = 0; j < parts.size(); ++j) part_label[parts[j]] = labeling.categories[j];
  }

  LabeledDataset ds;
  for (std::size_t i = 0; i < recordings.size(); ++i) {
    auto windows = window(recordings[i], spec);
    for (std::size_t k = 0; k < windows.size(); ++k) {
      ds.push_back(std::move(windows[k]), part_label[i],
                   {recordings[i].part_id, recordings[i].feature_id, k});
    }
  }
  ds.validate();
  return ds;
}

FeatureScaler::FeatureScaler(std::size_t channels, std::size_t window_length,
                             std::vector<double> means, std::vector<double> stds,
                             bool unit_norm)
    : window_length_(window_length),
      means_(std::move(means)),
      stds_(std::move(stds)),
      unit_norm_(unit_norm) {
  if (channels == 0 || window_length == 0 || means_.size() != channels ||
      stds_.size() != channels) {
    throw Error(ErrorCode::invalid_argument, "inconsistent scaler parameters");
  }
  for (double s : stds_) {
    if (!(s > 0.0) || !std::isfinite(s)) {
      throw Error(ErrorCode::invalid_argument, "scaler standard deviations must be positive");
    }
  }
}

FeatureScaler FeatureScaler::fit(const LabeledDataset& train, std::size_t channels,
                                 bool unit_norm) {
  train.validate();
  if (train.empty()) throw Error(ErrorCode::empty_dataset, "cannot fit scaler on no data");
  if (channels == 0 || train.feature_length() % channels != 0) {
    throw Error(ErrorCode::dimension_mismatch,
                "feature length " + std::to_string(train.feature_length()) +
                    " is not a multiple of " + std::to_string(channels) + " channels");
  }
  const std::size_t n = train.feature_length() / channels;
  std::vector<double> means(channels, 0.0), stds(channels, 0.0);
  const double count = static_cast<double>(train.size() * n);
  for (std::size_t c = 0; c < channels; ++c) {
    double sum = 0.0;
    for (const auto& x : train.samples) {
      for (std::size_t i = 0; i < n; ++i) sum += x[c * n + i];
    }
    means[c] = sum / count;
    double ss = 0.0;
    for (const auto& x : train.samples) {
      for (std::size_t i = 0; i < n; ++i) {
        const double d = x[c * n + i] - means[c];
        ss += d * d;
      }
    }
    const double s = std::sqrt(ss / count);
    // Constant channels carry no information; leave them centred only.
    stds[c] = s > 0.0 ? s : 1.0;
  }
  return FeatureScaler(channels, n, std::move(means), std::move(stds), unit_norm);
}

void FeatureScaler::apply(FeatureVector& x) const {
  if (x.size() != channels() * window_length_) {
    throw Error(ErrorCode::dimension_mismatch,
                "feature vector of length " + std::to_string(x.size()) +
                    " does not match scaler layout " + std::to_string(channels()) + "x" +
                    std::to_string(window_length_));
  }
  for (std::size_t c = 0; c < channels(); ++c) {
    for (std::size_t i = 0; i < window_length_; ++i) {
      auto& v = x[c * window_length_ + i];
      v = (v - means_[c]) / stds_[c];
    }
  }
  if (unit_norm_) {
    double ss = 0.0;
    for (double v : x) ss += v * v;
    if (ss > 0.0) {
      const double inv = 1.0 / std::sqrt(ss);
      for (double& v : x) v *= inv;
    }
  }
}

void FeatureScaler::apply(LabeledDataset& ds) const {
  for (auto& x : ds.samples) apply(x);
}

SyntheticData gen_synthetic(const SynthConfig& cfg) {
  if (cfg.classes != kQualityCount) {
    throw Error(ErrorCode::invalid_argument, "synthetic data has exactly 3 classes");
  }
  if (cfg.channels == 0 || cfg.length == 0 || cfg.parts_per_class == 0) {
    throw Error(ErrorCode::invalid_argument,
                "channels, length and parts per class must be positive");
  }
  if (!(cfg.noise_sigma >= 0.0) || !std::isfinite(cfg.noise_sigma)) {
    throw Error(ErrorCode::invalid_argument, "noise sigma must be non-negative");
  }
  if (!(cfg.sample_rate_hz > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "sample rate must be positive");
  }

  constexpr double two_pi = 2.0 * std::numbers::pi;
  const double duration = static_cast<double>(cfg.length) / cfg.sample_rate_hz;

  // template(k, c, t) for class k in {0,1,2}, channel c.
  const auto amplitude = [](std::size_t c) { return 1.0 + 0.25 * static_cast<double>(c); };
  const auto template_value = [&](std::size_t k, std::size_t c, double t) {
    const double shift = static_cast<double>(k) - 1.0;
    const double freq = 10.0 + 7.0 * static_cast<double>(k) + 3.0 * static_cast<double>(c);
    const double phase = 0.7 * static_cast<double>(c);
    const double sign = (c % 2 == 0) ? 1.0 : -1.0;
    const double level = 10.0 * static_cast<double>(c);
    return level + amplitude(c) * (std::sin(two_pi * freq * t + phase) + 0.3 * shift * sign +
                                   0.2 * shift * (t / duration - 0.5));
  };

  Rng rng(derive_seed(cfg.seed, "synth"));
  SyntheticData out;
  const std::size_t parts = cfg.parts_per_class * kQualityCount;
  out.recordings.reserve(parts);
  std::size_t part_no = 0;
  for (Quality q : kQualities) {
    const std::size_t k = index_of(q);
    for (std::size_t p = 0; p < cfg.parts_per_class; ++p, ++part_no) {
      Recording rec;
      rec.sample_rate_hz = cfg.sample_rate_hz;
      rec.feature_id = cfg.feature_id;
      std::string id = std::to_string(part_no);
      rec.part_id = "part-" + std::string(id.size() < 3 ? 3 - id.size() : 0, '0') + id;
      for (std::size_t c = 0; c < cfg.channels; ++c) {
        Channel ch{"ch" + std::to_string(c), std::vector<double>(cfg.length)};
        for (std::size_t i = 0; i < cfg.length; ++i) {
          const double t = static_cast<double>(i) / cfg.sample_rate_hz;
          double v = template_value(k, c, t);
          if (cfg.noise_sigma > 0.0) v += cfg.noise_sigma * amplitude(c) * rng.normal();
          ch.samples[i] = v;
        }
        rec.channels.push_back(std::move(ch));
      }
      // Nominal 0.05 mm, class centres 0.02 mm apart, jitter well inside the bins.
      const double deviation =
          0.05 + 0.02 * (static_cast<double>(k) - 1.0) + 0.002 * (2.0 * rng.uniform() - 1.0);
      out.recordings.push_back(std::move(rec));
      out.deviations_mm.push_back(deviation);
      out.intended.push_back(q);
    }
  }

  if (parts >= 2) {
    const auto labeling = label_deviation(out.deviations_mm);
    if (labeling.categories != out.intended) {
      throw Error(ErrorCode::invalid_argument,
                  "synthetic deviations do not bin into their intended classes");
    }
  }
  return out;
}

PreparedData prepare_dataset(std::span<const Recording> recordings,
                             std::span<const double> deviations_mm, WindowSpec spec,
                             double train_fraction, std::uint64_t root_seed, StdKind kind) {
  const auto full = build_dataset(recordings, deviations_mm, spec, kind);
  const auto balanced = balance(full, derive_seed(root_seed, "balance"));
  auto parts = split(balanced, train_fraction, derive_seed(root_seed, "split"));
  PreparedData out{std::move(parts.train), std::move(parts.test), {}};
  out.scaler = FeatureScaler::fit(out.train, recordings.front().channels.size());
  out.scaler.apply(out.train);
  out.scaler.apply(out.test);
  return out;
}

}  // namespace hdqual
