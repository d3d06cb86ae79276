#include "commands.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <thread>

#include "hdqual/baseline.hpp"
#include "hdqual/dataset_io.hpp"
#include "hdqual/error.hpp"
#include "hdqual/eval.hpp"
#include "hdqual/hdspace.hpp"
#include "hdqual/metering.hpp"
#include "hdqual/model.hpp"
#include "hdqual/model_io.hpp"
#include "hdqual/pipeline.hpp"
#include "hdqual/projection.hpp"
#include "hdqual/random.hpp"
#include "json.hpp"

namespace hdqual::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kRunConfigName = "run_config.conf";

unsigned thread_count(const CommonOptions& c) {
  return c.threads > 0 ? c.threads : std::max(1u, std::thread::hardware_concurrency());
}

fs::path prepare_output(const CommonOptions& c) {
  const fs::path dir = c.out;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::io, "cannot create output directory '" + c.out + "': " + ec.message());
  write_text_file(dir / kRunConfigName, c.config_text);
  return dir;
}

SynthConfig synth_config(const SynthOptions& o, std::uint64_t root_seed) {
  SynthConfig cfg;
  cfg.channels = o.channels;
  cfg.length = o.length;
  cfg.noise_sigma = o.noise;
  cfg.parts_per_class = o.parts_per_class;
  cfg.sample_rate_hz = o.sample_rate;
  cfg.feature_id = o.feature_id;
  cfg.seed = derive_seed(root_seed, "synth");
  return cfg;
}

DatasetFiles load_data(const DataOptions& d, std::uint64_t root_seed) {
  if (!d.data.empty()) return read_dataset(d.data);
  auto synth = gen_synthetic(synth_config(d.synth, root_seed));
  return {std::move(synth.recordings), std::move(synth.deviations_mm)};
}

StdKind parse_std_kind(const std::string& s) {
  if (s == "population") return StdKind::population;
  if (s == "sample") return StdKind::sample;
  throw Error(ErrorCode::config, "std must be 'population' or 'sample', got '" + s + "'");
}

std::vector<PowerSample> load_trace(const std::string& path) {
  const std::string text = read_text_file(path);
  std::vector<PowerSample> out;
  std::size_t pos = 0, line_no = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#' || line.rfind("t_s", 0) == 0) continue;
    const auto comma = line.find(',');
    PowerSample s{};
    const char* b = line.data();
    const char* e = line.data() + line.size();
    const bool ok = comma != std::string::npos &&
                    std::from_chars(b, b + comma, s.t_s).ptr == b + comma &&
                    std::from_chars(b + comma + 1, e, s.watts).ptr == e;
    if (!ok) {
      throw Error(ErrorCode::invalid_input,
                  path + ":" + std::to_string(line_no) + ": expected 't_s,watts'");
    }
    out.push_back(s);
  }
  return out;
}

PowerSource make_power(const PowerOptions& p) {
  if (p.source == "constant") return PowerSource::constant(p.watts);
  if (p.source == "trace") {
    if (p.trace.empty()) throw Error(ErrorCode::config, "power=trace needs power-trace=<csv>");
    return PowerSource::trace(load_trace(p.trace));
  }
  if (p.source == "platform") {
    auto src = PowerSource::platform(p.counter_dir.empty() ? PowerSource::default_counter_dir()
                                                           : fs::path(p.counter_dir));
    if (!src.available()) {
      throw Error(ErrorCode::capability_unavailable,
                  "energy counter at '" + src.counter_dir().string() +
                      "' is not readable; use --power constant --watts <W> instead");
    }
    return src;
  }
  throw Error(ErrorCode::config,
              "power must be 'constant', 'platform' or 'trace', got '" + p.source + "'");
}

std::vector<std::size_t> parse_hidden(const std::string& text) {
  std::vector<std::size_t> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto comma = text.find(',', start);
    if (comma == std::string::npos) comma = text.size();
    std::size_t v = 0;
    const char* b = text.data() + start;
    const char* e = text.data() + comma;
    if (std::from_chars(b, e, v).ptr != e || b == e || v == 0) {
      throw Error(ErrorCode::config, "hidden must be a comma list of positive sizes, got '" +
                                         text + "'");
    }
    out.push_back(v);
    start = comma + 1;
  }
  return out;
}

std::vector<EncodedSample> encode_labeled(const Encoder& enc, const LabeledDataset& ds,
                                          unsigned threads) {
  auto hvs = encode_batch(enc, ds.samples, threads);
  std::vector<EncodedSample> out;
  out.reserve(hvs.size());
  for (std::size_t i = 0; i < hvs.size(); ++i) out.push_back({std::move(hvs[i]), ds.labels[i]});
  return out;
}

TrainConfig train_config(const HdcOptions& h, std::uint64_t root_seed) {
  TrainConfig cfg;
  cfg.learning_rate = h.lr;
  cfg.max_epochs = h.epochs;
  cfg.patience = h.patience;
  cfg.shuffle_seed = derive_seed(root_seed, "shuffle");
  cfg.validate();
  return cfg;
}

std::vector<std::string> channel_names(const Recording& rec) {
  std::vector<std::string> names;
  for (const auto& ch : rec.channels) names.push_back(ch.name);
  return names;
}

std::string class_counts_text(const LabeledDataset& ds) {
  const auto c = ds.class_counts();
  char buf[128];
  std::snprintf(buf, sizeof buf, "low %zu, average %zu, high %zu", c[0], c[1], c[2]);
  return buf;
}

}  // namespace

void run_synth(const CommonOptions& common, const SynthOptions& opt) {
  const auto data = gen_synthetic(synth_config(opt, common.seed));
  write_dataset(common.out, {data.recordings, data.deviations_mm});
  prepare_output(common);
  std::array<std::size_t, kQualityCount> counts{};
  for (Quality q : data.intended) ++counts[index_of(q)];
  std::printf("wrote %zu parts (low %zu, average %zu, high %zu), %zu channels x %zu samples to %s\n",
              data.recordings.size(), counts[0], counts[1], counts[2], opt.channels, opt.length,
              common.out.c_str());
}

void run_train(const CommonOptions& common, const DataOptions& d, const HdcOptions& h,
               const PowerOptions& p) {
  const unsigned threads = thread_count(common);
  const TrainConfig cfg = train_config(h, common.seed);
  const PowerSource src = make_power(p);
  const EncoderMode mode = parse_encoder_mode(h.mode);

  const auto files = load_data(d, common.seed);
  const auto prepared = prepare_dataset(files.recordings, files.deviations_mm, {d.window},
                                        d.train_fraction, common.seed, parse_std_kind(d.std_kind));
  const Encoder enc = generate_basis(prepared.train.feature_length(), h.dim, common.seed, mode);
  const fs::path out = prepare_output(common);

  auto trained = measure(src, [&] {
    return fit(encode_labeled(enc, prepared.train, threads), cfg, enc.fingerprint());
  });
  auto evaluated = measure(src, [&] { return evaluate(trained.result, enc, prepared.test, threads); });

  save_model(out / "model.hdq", EncoderSpec::of(enc), trained.result);
  write_text_file(out / "preprocess.json",
                  preprocess_to_json({{d.window}, channel_names(files.recordings.front()),
                                      prepared.scaler}));
  write_text_file(out / "metrics.json", metrics_to_json(evaluated.result));

  const double inferences = static_cast<double>(prepared.test.size());
  json energy = {{"format", "hdqual.energy"},
                 {"version", 1},
                 {"source", to_string(src.kind())},
                 {"train", json::parse(energy_report_to_json(trained.report))},
                 {"evaluate", json::parse(energy_report_to_json(evaluated.report))},
                 {"test_windows", prepared.test.size()},
                 {"energy_per_inference_j", energy_per_inference(evaluated.report, inferences)},
                 {"disclaimer", kEnergyDisclaimer}};
  if (src.kind() == PowerSourceKind::constant_power) energy["watts"] = src.watts();
  write_text_file(out / "energy.json", energy.dump(2) + "\n");

  std::printf("train %zu windows (%s), test %zu windows; D=%zu, %s encoder\n",
              prepared.train.size(), class_counts_text(prepared.train).c_str(),
              prepared.test.size(), h.dim, std::string(to_string(mode)).c_str());
  std::printf("retraining epochs: %zu\n", trained.result.epoch_log().size());
  std::fputs(metrics_table(evaluated.result).c_str(), stdout);
  std::printf("train %.3f s / %.3f J, evaluate %.3f s / %.3f J (%s)\n",
              trained.report.duration_s, trained.report.energy_j, evaluated.report.duration_s,
              evaluated.report.energy_j, std::string(to_string(src.kind())).c_str());
  std::printf("outputs in %s\n", common.out.c_str());
}

void run_predict(const CommonOptions& common, const PredictOptions& opt) {
  if (opt.data.empty() == opt.csv.empty()) {
    throw Error(ErrorCode::config, "predict needs exactly one of --data or --csv");
  }
  if (opt.evaluate && opt.data.empty()) {
    throw Error(ErrorCode::config, "--evaluate needs --data (labels come from the manifest)");
  }
  const fs::path preprocess_path =
      opt.preprocess.empty() ? fs::path(opt.model).parent_path() / "preprocess.json"
                             : fs::path(opt.preprocess);
  const Preprocess pre = preprocess_from_json(read_text_file(preprocess_path));
  const ModelFile mf = load_model(opt.model);
  const Encoder enc = mf.encoder.build();
  if (enc.fingerprint() != mf.model.encoder_fingerprint()) {
    throw Error(ErrorCode::model_encoder_mismatch,
                "model file encoder parameters do not reproduce its encoder");
  }

  DatasetFiles input;
  if (!opt.data.empty()) {
    input = read_dataset(opt.data);
  } else {
    Recording rec = recording_from_csv(read_text_file(opt.csv), opt.sample_rate);
    rec.part_id = fs::path(opt.csv).stem().string();
    input.recordings.push_back(std::move(rec));
  }

  std::vector<FeatureVector> samples;
  std::vector<Provenance> where;
  for (const auto& rec : input.recordings) {
    if (channel_names(rec) != pre.channel_names) {
      throw Error(ErrorCode::invalid_input,
                  "recording '" + rec.part_id + "' channels do not match the trained model");
    }
    auto windows = window(rec, pre.window);
    for (std::size_t k = 0; k < windows.size(); ++k) {
      pre.scaler.apply(windows[k]);
      samples.push_back(std::move(windows[k]));
      where.push_back({rec.part_id, rec.feature_id, k});
    }
  }
  const auto hvs = encode_batch(enc, samples, thread_count(common));

  std::string csv = "part_id,feature_id,window,predicted";
  for (Quality q : mf.model.labels()) csv += ",sim_" + std::string(to_string(q));
  csv += '\n';
  std::vector<Quality> predicted;
  for (std::size_t i = 0; i < hvs.size(); ++i) {
    const auto p = predict(mf.model, hvs[i]);
    predicted.push_back(p.label);
    csv += where[i].part_id + "," + where[i].feature_id + "," +
           std::to_string(where[i].window_index) + "," + std::string(to_string(p.label));
    for (const auto& [label, score] : p.scores) csv += "," + format_double(score);
    csv += '\n';
  }

  std::optional<Evaluation> ev;
  if (opt.evaluate) {
    const auto truth = build_dataset(input.recordings, input.deviations_mm, pre.window);
    const auto cm = confusion(truth.labels, predicted);
    ev = Evaluation{cm, compute_metrics(cm)};
  }

  if (common.out.empty()) {
    std::fputs(csv.c_str(), stdout);
    if (ev) std::fputs(metrics_table(*ev).c_str(), stderr);
    return;
  }
  const fs::path out = prepare_output(common);
  write_text_file(out / "predictions.csv", csv);
  if (ev) {
    write_text_file(out / "metrics.json", metrics_to_json(*ev));
    std::fputs(metrics_table(*ev).c_str(), stdout);
  }
  std::printf("%zu windows from %zu recordings classified; outputs in %s\n", hvs.size(),
              input.recordings.size(), common.out.c_str());
}

void run_bench(const CommonOptions& common, const DataOptions& d, const HdcOptions& h,
               const PowerOptions& p, const MlpOptions& m, std::size_t reps) {
  const unsigned threads = thread_count(common);
  const TrainConfig cfg = train_config(h, common.seed);
  const PowerSource src = make_power(p);
  const EncoderMode mode = parse_encoder_mode(h.mode);
  MlpTrainConfig mlp_cfg;
  mlp_cfg.hidden_sizes = parse_hidden(m.hidden);
  mlp_cfg.activation = parse_activation(m.activation);
  mlp_cfg.epochs = m.epochs;
  mlp_cfg.batch_size = m.batch;
  mlp_cfg.learning_rate = m.lr;
  mlp_cfg.seed = derive_seed(common.seed, "mlp");
  mlp_cfg.validate();
  if (reps < 1) throw Error(ErrorCode::config, "reps must be at least 1");

  const auto files = load_data(d, common.seed);
  const auto data = prepare_dataset(files.recordings, files.deviations_mm, {d.window},
                                    d.train_fraction, common.seed, parse_std_kind(d.std_kind));
  const Encoder enc = generate_basis(data.train.feature_length(), h.dim, common.seed, mode);
  const auto encoded = encode_labeled(enc, data.train, threads);

  std::optional<ClassModel> hdc_model;
  std::optional<MlpModel> mlp_model;
  const std::vector<Workload> workloads{
      {"hdc_fit", [&] { hdc_model = fit(encoded, cfg, enc.fingerprint()); }},
      {"hdc_encode_fit",
       [&] { fit(encode_labeled(enc, data.train, threads), cfg, enc.fingerprint()); }},
      {"mlp_fit", [&] { mlp_model = mlp_fit(data.train, mlp_cfg); }},
  };
  const Comparison cmp = compare(workloads, src, reps, "mlp_fit");

  // Accuracy and per-inference energy, outside the timed comparison.
  const auto hdc_eval = measure(src, [&] { return evaluate(*hdc_model, enc, data.test, threads); });
  const auto mlp_eval = measure(src, [&] { return mlp_evaluate(*mlp_model, data.test); });
  const double n_test = static_cast<double>(data.test.size());

  std::string jsonl = comparison_to_jsonl(cmp);
  const auto model_record = [&](const char* name, const Measured<Evaluation>& e) {
    return json{{"type", "model"},
                {"model", name},
                {"accuracy", e.result.metrics.accuracy},
                {"macro_f1", e.result.metrics.macro_f1},
                {"test_windows", data.test.size()},
                {"inference_energy_j", e.report.energy_j},
                {"energy_per_inference_j", energy_per_inference(e.report, n_test)}}
        .dump();
  };
  jsonl += model_record("hdc", hdc_eval) + "\n";
  jsonl += model_record("mlp", mlp_eval) + "\n";
  jsonl += json{{"type", "config"},
                {"seed", common.seed},
                {"hdc", {{"dim", h.dim}, {"mode", to_string(mode)}, {"lr", h.lr},
                         {"max_epochs", h.epochs}, {"patience", h.patience}}},
                {"mlp", {{"hidden", mlp_cfg.hidden_sizes}, {"activation", m.activation},
                         {"epochs", m.epochs}, {"batch", m.batch}, {"lr", m.lr}}},
                {"train_windows", data.train.size()},
                {"test_windows", data.test.size()}}
               .dump() +
           "\n";

  std::fputs(comparison_table(cmp).c_str(), stdout);
  std::printf("accuracy: hdc %.4f (macro-F1 %.4f), mlp %.4f (macro-F1 %.4f)\n",
              hdc_eval.result.metrics.accuracy, hdc_eval.result.metrics.macro_f1,
              mlp_eval.result.metrics.accuracy, mlp_eval.result.metrics.macro_f1);
  std::printf("energy per inference: hdc %.3e J, mlp %.3e J\n",
              energy_per_inference(hdc_eval.report, n_test),
              energy_per_inference(mlp_eval.report, n_test));
  if (!common.out.empty()) {
    const fs::path out = prepare_output(common);
    write_text_file(out / "bench.jsonl", jsonl);
    std::printf("outputs in %s\n", common.out.c_str());
  }
}

void run_project(const CommonOptions& common, const ProjectOptions& o) {
  Scenario s;
  if (!o.scenario.empty()) {
    s = scenario_from_json(read_text_file(o.scenario));
  } else if (!o.candidate_ei || !o.baseline_ei) {
    throw Error(ErrorCode::config,
                "project needs --scenario or both --candidate-ei and --baseline-ei");
  }
  const auto both = [&](const std::optional<double>& v, double ProjectionParams::*field) {
    if (!v) return;
    s.candidate.*field = *v;
    s.baseline.*field = *v;
  };
  if (o.candidate_ei) s.candidate.energy_per_inference_j = *o.candidate_ei;
  if (o.baseline_ei) s.baseline.energy_per_inference_j = *o.baseline_ei;
  both(o.rate, &ProjectionParams::inference_rate_hz);
  both(o.part_time, &ProjectionParams::part_time_s);
  both(o.parts_per_year, &ProjectionParams::parts_per_year);
  both(o.machines, &ProjectionParams::machines);
  both(o.processes, &ProjectionParams::processes);
  if (o.co2_factor) s.co2_factor_kg_per_kwh = *o.co2_factor;

  const auto r = savings(s.candidate, s.baseline, s.co2_factor_kg_per_kwh);
  std::fputs(savings_text(s, r).c_str(), stdout);
  if (!common.out.empty()) {
    const fs::path out = prepare_output(common);
    write_text_file(out / "savings.json", savings_to_json(s, r));
  }
}

}  // namespace hdqual::cli
