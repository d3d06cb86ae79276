#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace hdqual::cli {

struct CommonOptions {
  std::uint64_t seed = 1;
  unsigned threads = 0;  // 0: one per hardware thread
  std::string out;
  std::string config_text;  // effective settings, copied into `out`
};

struct SynthOptions {
  std::size_t channels = 8;
  std::size_t length = 2000;
  double noise = 0.05;
  std::size_t parts_per_class = 6;
  double sample_rate = 500.0;
  std::string feature_id = "counterbore";
};

struct DataOptions {
  std::string data;  // empty: synthesize in memory from `synth`
  SynthOptions synth;
  std::size_t window = 50;
  double train_fraction = 0.8;
  std::string std_kind = "population";
};

struct HdcOptions {
  std::size_t dim = 10000;
  std::string mode = "nonlinear";
  double lr = 0.05;
  std::size_t epochs = 20;
  std::size_t patience = 3;
};

struct PowerOptions {
  std::string source = "constant";
  double watts = 65.0;
  std::string counter_dir;
  std::string trace;
};

struct MlpOptions {
  std::string hidden = "128";
  std::string activation = "relu";
  std::size_t epochs = 100;
  std::size_t batch = 32;
  double lr = 0.1;
};

struct PredictOptions {
  std::string model;
  std::string preprocess;
  std::string data;
  std::string csv;
  double sample_rate = 500.0;
  bool evaluate = false;
};

struct ProjectOptions {
  std::string scenario;
  std::optional<double> candidate_ei;
  std::optional<double> baseline_ei;
  std::optional<double> rate;
  std::optional<double> part_time;
  std::optional<double> parts_per_year;
  std::optional<double> machines;
  std::optional<double> processes;
  std::optional<double> co2_factor;
};

void run_synth(const CommonOptions& common, const SynthOptions& opt);
void run_train(const CommonOptions& common, const DataOptions& data, const HdcOptions& hdc,
               const PowerOptions& power);
void run_predict(const CommonOptions& common, const PredictOptions& opt);
void run_bench(const CommonOptions& common, const DataOptions& data, const HdcOptions& hdc,
               const PowerOptions& power, const MlpOptions& mlp, std::size_t reps);
void run_project(const CommonOptions& common, const ProjectOptions& opt);

}  // namespace hdqual::cli
