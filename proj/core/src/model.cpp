#include "hdqual/model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "hdqual/error.hpp"
#include "hdqual/hdspace.hpp"
#include "hdqual/random.hpp"

namespace hdqual {

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw Error(ErrorCode::invalid_argument, "learning rate must be positive");
  }
  if (max_epochs < 1) {
    throw Error(ErrorCode::invalid_argument, "max_epochs must be at least 1");
  }
}

ClassModel::ClassModel(std::vector<Quality> labels, std::vector<Hypervector> classes,
                       double learning_rate, std::uint64_t encoder_fingerprint)
    : labels_(std::move(labels)),
      classes_(std::move(classes)),
      learning_rate_(learning_rate),
      encoder_fingerprint_(encoder_fingerprint) {
  if (labels_.size() != classes_.size() || labels_.empty()) {
    throw Error(ErrorCode::invalid_argument,
                "class model needs one hypervector per label and at least one label");
  }
  if (!std::is_sorted(labels_.begin(), labels_.end()) ||
      std::adjacent_find(labels_.begin(), labels_.end()) != labels_.end()) {
    throw Error(ErrorCode::invalid_argument, "class labels must be unique and ordered");
  }
  for (const auto& c : classes_) {
    if (c.dim() != classes_.front().dim() || c.dim() == 0) {
      throw Error(ErrorCode::dimension_mismatch, "class hypervectors differ in dimension");
    }
  }
  set_learning_rate(learning_rate);
}

void ClassModel::set_learning_rate(double eta) {
  if (!(eta > 0.0) || !std::isfinite(eta)) {
    throw Error(ErrorCode::invalid_argument, "learning rate must be positive");
  }
  learning_rate_ = eta;
}

bool ClassModel::has_label(Quality label) const noexcept {
  return std::find(labels_.begin(), labels_.end(), label) != labels_.end();
}

std::size_t ClassModel::slot(Quality label) const {
  const auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) {
    throw Error(ErrorCode::unknown_class,
                "label '" + std::string(to_string(label)) + "' is not in the model");
  }
  return static_cast<std::size_t>(it - labels_.begin());
}

const Hypervector& ClassModel::class_vector(Quality label) const {
  return classes_[slot(label)];
}

Hypervector& ClassModel::class_vector(Quality label) { return classes_[slot(label)]; }

ClassModel bundle_classes(std::span<const EncodedSample> encoded, double learning_rate,
                          std::uint64_t encoder_fingerprint) {
  if (encoded.empty()) {
    throw Error(ErrorCode::empty_dataset, "cannot bundle an empty training set");
  }
  const std::size_t dim = encoded.front().hv.dim();
  std::array<bool, kQualityCount> present{};
  for (const auto& s : encoded) {
    if (s.hv.dim() != dim) {
      throw Error(ErrorCode::dimension_mismatch,
                  "training hypervectors have dimensions " + std::to_string(dim) +
                      " and " + std::to_string(s.hv.dim()));
    }
    present[index_of(s.label)] = true;
  }

  std::vector<Quality> labels;
  for (Quality q : kQualities) {
    if (present[index_of(q)]) labels.push_back(q);
  }
  std::vector<Hypervector> classes(labels.size(), Hypervector(dim));
  std::array<std::size_t, kQualityCount> slot_of{};
  for (std::size_t i = 0; i < labels.size(); ++i) slot_of[index_of(labels[i])] = i;

  for (const auto& s : encoded) classes[slot_of[index_of(s.label)]] += s.hv;
  return ClassModel(std::move(labels), std::move(classes), learning_rate,
                    encoder_fingerprint);
}

Prediction predict(const ClassModel& model, const Hypervector& query) {
  if (query.dim() != model.dim()) {
    throw Error(ErrorCode::dimension_mismatch,
                "query dimension " + std::to_string(query.dim()) +
                    " does not match model dimension " + std::to_string(model.dim()));
  }
  Prediction out{model.labels().front(), {}};
  out.scores.reserve(model.labels().size());
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < model.labels().size(); ++i) {
    const double s = similarity(query, model.classes()[i]);
    out.scores.emplace_back(model.labels()[i], s);
    // Strict comparison: the earlier label keeps exact ties.
    if (s > best) {
      best = s;
      out.label = model.labels()[i];
    }
  }
  return out;
}

namespace {

bool retrain_step(ClassModel& model, const EncodedSample& sample) {
  if (!model.has_label(sample.label)) {
    throw Error(ErrorCode::unknown_class, "sample label '" +
                                              std::string(to_string(sample.label)) +
                                              "' is not in the model");
  }
  const Prediction p = predict(model, sample.hv);
  if (p.label == sample.label) return false;

  double delta_true = 0.0;
  double delta_pred = 0.0;
  for (const auto& [label, score] : p.scores) {
    if (label == sample.label) delta_true = score;
    if (label == p.label) delta_pred = score;
  }
  const double eta = model.learning_rate();
  model.class_vector(sample.label).add_scaled(sample.hv, eta * (1.0 - delta_true));
  model.class_vector(p.label).add_scaled(sample.hv, -eta * (1.0 - delta_pred));
  return true;
}

}  // namespace

std::size_t retrain_epoch(ClassModel& model, std::span<const EncodedSample> encoded) {
  std::size_t mispredicts = 0;
  for (const auto& s : encoded) {
    if (retrain_step(model, s)) ++mispredicts;
  }
  return mispredicts;
}

ClassModel fit(std::span<const EncodedSample> encoded_train, const TrainConfig& cfg,
               std::uint64_t encoder_fingerprint) {
  cfg.validate();
  ClassModel model = bundle_classes(encoded_train, cfg.learning_rate, encoder_fingerprint);

  std::vector<std::size_t> order(encoded_train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(cfg.shuffle_seed);

  std::size_t best = std::numeric_limits<std::size_t>::max();
  std::size_t stalled = 0;
  for (std::size_t epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    shuffle(std::span<std::size_t>(order), rng);
    std::size_t mispredicts = 0;
    for (std::size_t i : order) {
      if (retrain_step(model, encoded_train[i])) ++mispredicts;
    }
    model.record_epoch(mispredicts);
    if (mispredicts == 0) break;
    if (mispredicts < best) {
      best = mispredicts;
      stalled = 0;
    } else {
      ++stalled;
    }
    if (stalled >= cfg.patience) break;
  }

  for (const auto& c : model.classes()) {
    if (c.norm() == 0.0) {
      throw Error(ErrorCode::zero_norm, "a class hypervector has zero norm after training");
    }
  }
  return model;
}

}  // namespace hdqual
