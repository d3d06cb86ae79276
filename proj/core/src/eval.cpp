#include "hdqual/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <string>

#include "hdqual/error.hpp"
#include "json.hpp"

namespace hdqual {

std::size_t ConfusionMatrix::total() const noexcept {
  std::size_t n = 0;
  for (const auto& row : counts) {
    for (std::size_t v : row) n += v;
  }
  return n;
}

std::size_t ConfusionMatrix::trace() const noexcept {
  std::size_t n = 0;
  for (std::size_t i = 0; i < kQualityCount; ++i) n += counts[i][i];
  return n;
}

Metrics compute_metrics(const ConfusionMatrix& cm) {
  Metrics m;
  const std::size_t total = cm.total();
  m.accuracy = total == 0 ? 0.0 : static_cast<double>(cm.trace()) / static_cast<double>(total);
  for (std::size_t c = 0; c < kQualityCount; ++c) {
    std::size_t predicted = 0, actual = 0;
    for (std::size_t r = 0; r < kQualityCount; ++r) predicted += cm.counts[r][c];
    for (std::size_t k = 0; k < kQualityCount; ++k) actual += cm.counts[c][k];
    const auto tp = static_cast<double>(cm.counts[c][c]);

    m.precision_undefined[c] = predicted == 0;
    m.recall_undefined[c] = actual == 0;
    m.precision[c] = predicted == 0 ? 0.0 : tp / static_cast<double>(predicted);
    m.recall[c] = actual == 0 ? 0.0 : tp / static_cast<double>(actual);
    const double pr = m.precision[c] + m.recall[c];
    m.f1[c] = pr > 0.0 ? 2.0 * m.precision[c] * m.recall[c] / pr : 0.0;

    m.macro_precision += m.precision[c] / kQualityCount;
    m.macro_recall += m.recall[c] / kQualityCount;
    m.macro_f1 += m.f1[c] / kQualityCount;
  }
  return m;
}

ConfusionMatrix confusion(std::span<const Quality> truth, std::span<const Quality> predicted) {
  if (truth.size() != predicted.size()) {
    throw Error(ErrorCode::dimension_mismatch, "truth and prediction counts differ");
  }
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < truth.size(); ++i) cm.add(truth[i], predicted[i]);
  return cm;
}

Evaluation evaluate(const ClassModel& model, const Encoder& enc, const LabeledDataset& test,
                    unsigned threads) {
  test.validate();
  if (test.empty()) throw Error(ErrorCode::empty_dataset, "test set is empty");
  if (model.encoder_fingerprint() != enc.fingerprint()) {
    throw Error(ErrorCode::model_encoder_mismatch,
                "model was trained with a different encoder");
  }
  const auto encoded = encode_batch(enc, test.samples, threads);
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < encoded.size(); ++i) {
    cm.add(test.labels[i], predict(model, encoded[i]).label);
  }
  return {cm, compute_metrics(cm)};
}

std::string metrics_to_json(const Evaluation& ev) {
  using nlohmann::json;
  const Metrics& m = ev.metrics;
  json per_class = json::object();
  for (Quality q : kQualities) {
    const auto c = index_of(q);
    per_class[std::string(to_string(q))] = {
        {"precision", m.precision[c]},
        {"recall", m.recall[c]},
        {"f1", m.f1[c]},
        {"precision_undefined", m.precision_undefined[c]},
        {"recall_undefined", m.recall_undefined[c]},
    };
  }
  json labels = json::array();
  for (Quality q : kQualities) labels.push_back(to_string(q));
  json j = {
      {"format", "hdqual.metrics"},
      {"version", 1},
      {"labels", labels},
      {"confusion", ev.confusion.counts},
      {"samples", ev.confusion.total()},
      {"accuracy", m.accuracy},
      {"averaging", "macro"},
      {"macro_precision", m.macro_precision},
      {"macro_recall", m.macro_recall},
      {"macro_f1", m.macro_f1},
      {"per_class", per_class},
  };
  return j.dump(2) + "\n";
}

std::string metrics_table(const Evaluation& ev) {
  const Metrics& m = ev.metrics;
  std::string out;
  char line[160];
  std::snprintf(line, sizeof line, "%-10s %10s %10s %10s\n", "class", "precision", "recall",
                "f1");
  out += line;
  for (Quality q : kQualities) {
    const auto c = index_of(q);
    std::snprintf(line, sizeof line, "%-10s %9.4f%s %9.4f%s %10.4f\n",
                  std::string(to_string(q)).c_str(), m.precision[c],
                  m.precision_undefined[c] ? "*" : " ", m.recall[c],
                  m.recall_undefined[c] ? "*" : " ", m.f1[c]);
    out += line;
  }
  std::snprintf(line, sizeof line, "%-10s %9.4f  %9.4f  %10.4f\n", "macro", m.macro_precision,
                m.macro_recall, m.macro_f1);
  out += line;
  std::snprintf(line, sizeof line, "accuracy   %.4f  (%zu samples)\n", m.accuracy,
                ev.confusion.total());
  out += line;
  if (std::find(m.precision_undefined.begin(), m.precision_undefined.end(), true) !=
          m.precision_undefined.end() ||
      std::find(m.recall_undefined.begin(), m.recall_undefined.end(), true) !=
          m.recall_undefined.end()) {
    out += "* empty denominator, reported as 0\n";
  }
  return out;
}

}  // namespace hdqual
