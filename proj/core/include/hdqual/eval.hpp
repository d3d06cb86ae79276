#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>

#include "hdqual/hdspace.hpp"
#include "hdqual/labels.hpp"
#include "hdqual/model.hpp"
#include "hdqual/pipeline.hpp"

namespace hdqual {

/// Rows are true labels, columns predicted labels, both in Quality order.
struct ConfusionMatrix {
  std::array<std::array<std::size_t, kQualityCount>, kQualityCount> counts{};

  void add(Quality truth, Quality predicted) noexcept {
    ++counts[index_of(truth)][index_of(predicted)];
  }
  std::size_t total() const noexcept;
  std::size_t trace() const noexcept;

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

/// Per-class scores with empty denominators reported as 0; the matching
/// `*_undefined` flag is set so reports can show that the 0 is a convention.
struct Metrics {
  double accuracy = 0.0;
  std::array<double, kQualityCount> precision{};
  std::array<double, kQualityCount> recall{};
  std::array<double, kQualityCount> f1{};
  std::array<bool, kQualityCount> precision_undefined{};
  std::array<bool, kQualityCount> recall_undefined{};
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
};

/// Macro averages run over all three classes.
Metrics compute_metrics(const ConfusionMatrix& cm);

ConfusionMatrix confusion(std::span<const Quality> truth, std::span<const Quality> predicted);

struct Evaluation {
  ConfusionMatrix confusion;
  Metrics metrics;
};

/// Encodes and classifies every test sample. Throws model_encoder_mismatch
/// if the model was trained with a different encoder.
Evaluation evaluate(const ClassModel& model, const Encoder& enc, const LabeledDataset& test,
                    unsigned threads = 1);

/// JSON metrics report; contains no timing information, so identical inputs
/// give byte-identical output.
std::string metrics_to_json(const Evaluation& ev);
/// Fixed-width table for terminals.
std::string metrics_table(const Evaluation& ev);

}  // namespace hdqual
