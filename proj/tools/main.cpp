// hdqual command-line tool: synth, train, predict, bench, project.
//
// Exit codes: 0 success, 2 configuration error, 3 data error, 4 runtime
// error. Failures print one line to stderr:
//   hdqual: error[<code>]: <message>

#include <algorithm>
#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "commands.hpp"
#include "hdqual/dataset_io.hpp"
#include "hdqual/error.hpp"
#include "run_config.hpp"

using namespace hdqual;
using namespace hdqual::cli;

namespace {

enum Exit : int { kOk = 0, kConfigError = 2, kDataError = 3, kRuntimeError = 4 };

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::config:
    case ErrorCode::invalid_argument:
      return kConfigError;
    case ErrorCode::invalid_input:
    case ErrorCode::dimension_mismatch:
    case ErrorCode::empty_dataset:
    case ErrorCode::unknown_class:
    case ErrorCode::window_too_long:
    case ErrorCode::degenerate_distribution:
    case ErrorCode::empty_class:
    case ErrorCode::stratification:
    case ErrorCode::model_encoder_mismatch:
    case ErrorCode::io:
    case ErrorCode::schema:
      return kDataError;
    case ErrorCode::zero_norm:
    case ErrorCode::capability_unavailable:
    case ErrorCode::insufficient_samples:
      return kRuntimeError;
  }
  return kRuntimeError;
}

int fail(int exit_code, std::string_view code, std::string message) {
  std::replace(message.begin(), message.end(), '\n', ' ');
  std::fprintf(stderr, "hdqual: error[%.*s]: %s\n", static_cast<int>(code.size()), code.data(),
               message.c_str());
  return exit_code;
}

struct Options {
  CommonOptions common;
  SynthOptions synth;
  DataOptions data;
  HdcOptions hdc;
  PowerOptions power;
  MlpOptions mlp;
  PredictOptions predict;
  ProjectOptions project;
  std::size_t reps = 10;
  std::string config_path;
};

void add_common(CLI::App* sub, Options& o, bool out_required) {
  sub->add_option("--config", o.config_path, "key = value settings file; flags override it");
  sub->add_option("--seed", o.common.seed, "root seed for every random stream");
  sub->add_option("--threads", o.common.threads, "worker threads, 0 = all hardware threads");
  auto* out = sub->add_option("--out", o.common.out, "output directory");
  if (out_required) out->required();
}

void add_synth(CLI::App* sub, SynthOptions& s) {
  sub->add_option("--channels", s.channels, "synthetic sensor channels");
  sub->add_option("--length", s.length, "samples per channel");
  sub->add_option("--noise", s.noise, "noise sigma relative to channel amplitude");
  sub->add_option("--parts-per-class", s.parts_per_class, "recordings per quality class");
  sub->add_option("--sample-rate", s.sample_rate, "sampling rate in Hz");
  sub->add_option("--feature-id", s.feature_id, "feature id of the synthetic parts");
}

void add_data(CLI::App* sub, DataOptions& d) {
  sub->add_option("--data", d.data, "dataset directory or manifest; synthesized if omitted");
  add_synth(sub, d.synth);
  sub->add_option("--window", d.window, "window length n in samples");
  sub->add_option("--train-fraction", d.train_fraction, "stratified train share");
  sub->add_option("--std", d.std_kind, "deviation z-score spread: population or sample");
}

void add_hdc(CLI::App* sub, HdcOptions& h) {
  sub->add_option("--dim", h.dim, "hypervector dimensionality D");
  sub->add_option("--mode", h.mode, "encoder: nonlinear or linear");
  sub->add_option("--lr", h.lr, "retraining learning rate");
  sub->add_option("--epochs", h.epochs, "maximum retraining epochs");
  sub->add_option("--patience", h.patience, "epochs without improvement before stopping");
}

void add_power(CLI::App* sub, PowerOptions& p) {
  sub->add_option("--power", p.source, "energy source: constant, platform or trace");
  sub->add_option("--watts", p.watts, "power draw for the constant source");
  sub->add_option("--power-counter", p.counter_dir, "powercap directory for the platform source");
  sub->add_option("--power-trace", p.trace, "CSV of t_s,watts for the trace source");
}

void add_mlp(CLI::App* sub, MlpOptions& m) {
  sub->add_option("--hidden", m.hidden, "MLP hidden layer sizes, comma separated");
  sub->add_option("--activation", m.activation, "MLP activation: relu or tanh");
  sub->add_option("--mlp-epochs", m.epochs, "MLP training epochs");
  sub->add_option("--batch", m.batch, "MLP minibatch size");
  sub->add_option("--mlp-lr", m.lr, "MLP learning rate");
}

void build(CLI::App& app, Options& o) {
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast)
      ->always_capture_default();
  app.require_subcommand(1);
  app.set_version_flag("--version", "hdqual 0.1.0");

  auto* synth = app.add_subcommand("synth", "write a synthetic multi-channel dataset");
  add_common(synth, o, true);
  add_synth(synth, o.synth);

  auto* train = app.add_subcommand("train", "train and evaluate an HDC model");
  add_common(train, o, true);
  add_data(train, o.data);
  add_hdc(train, o.hdc);
  add_power(train, o.power);

  auto* predict = app.add_subcommand("predict", "classify recordings with a trained model");
  add_common(predict, o, false);
  predict->add_option("--model", o.predict.model, "model.hdq from train")->required();
  predict->add_option("--preprocess", o.predict.preprocess,
                      "preprocess.json; defaults to the one next to the model");
  predict->add_option("--data", o.predict.data, "dataset directory or manifest");
  predict->add_option("--csv", o.predict.csv, "single recording CSV");
  predict->add_option("--sample-rate", o.predict.sample_rate, "sampling rate of --csv in Hz");
  predict->add_flag("--evaluate", o.predict.evaluate, "score predictions against the manifest");

  auto* bench = app.add_subcommand("bench", "compare HDC and MLP time, energy and accuracy");
  add_common(bench, o, false);
  add_data(bench, o.data);
  add_hdc(bench, o.hdc);
  add_power(bench, o.power);
  add_mlp(bench, o.mlp);
  bench->add_option("--reps", o.reps, "timed repetitions per workload");

  auto* project = app.add_subcommand("project", "fleet-scale annual energy savings");
  add_common(project, o, false);
  auto& p = o.project;
  project->add_option("--scenario", p.scenario, "scenario JSON file");
  project->add_option("--candidate-ei", p.candidate_ei, "candidate joules per inference");
  project->add_option("--baseline-ei", p.baseline_ei, "baseline joules per inference");
  project->add_option("--rate", p.rate, "inferences per second (both sides)");
  project->add_option("--part-time", p.part_time, "seconds per part (both sides)");
  project->add_option("--parts-per-year", p.parts_per_year, "parts per machine-year (both sides)");
  project->add_option("--machines", p.machines, "machines in the fleet (both sides)");
  project->add_option("--processes", p.processes, "process types (both sides)");
  project->add_option("--co2-factor", p.co2_factor, "kg CO2e per kWh");
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  Options o;
  CLI::App app{"Hyperdimensional quality classification toolkit", "hdqual"};
  build(app, o);

  // Settings from --config go ahead of the real arguments so flags win.
  if (!args.empty()) {
    if (CLI::App* sub = app.get_subcommand_no_throw(args.front())) {
      const std::string path = find_config_arg(args);
      if (!path.empty()) {
        std::string text;
        try {
          text = read_text_file(path);
        } catch (const Error& e) {
          throw Error(ErrorCode::config, e.what());
        }
        const auto extra = config_to_args(parse_config_text(text, path), *sub, path);
        args.insert(args.begin() + 1, extra.begin(), extra.end());
      }
    }
  }
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::Success& e) {  // --help and --version
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(kConfigError, "config", e.what());
  }

  const CLI::App* sub = app.get_subcommands().front();
  o.common.config_text = effective_config(*sub);
  const std::string name = sub->get_name();
  if (name == "synth") run_synth(o.common, o.synth);
  if (name == "train") run_train(o.common, o.data, o.hdc, o.power);
  if (name == "predict") run_predict(o.common, o.predict);
  if (name == "bench") run_bench(o.common, o.data, o.hdc, o.power, o.mlp, o.reps);
  if (name == "project") run_project(o.common, o.project);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const Error& e) {
    return fail(exit_code_for(e.code()), to_string(e.code()), e.what());
  } catch (const std::exception& e) {
    return fail(kRuntimeError, "runtime", e.what());
  }
}
