#include "hdqual/metering.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "hdqual/error.hpp"
#include "json.hpp"

namespace hdqual {

namespace fs = std::filesystem;

std::string_view to_string(PowerSourceKind kind) noexcept {
  switch (kind) {
    case PowerSourceKind::constant_power: return "constant_power";
    case PowerSourceKind::platform_counter: return "platform_counter";
    case PowerSourceKind::trace: return "trace";
  }
  return "?";
}

PowerSource PowerSource::constant(double watts) {
  if (!(watts >= 0.0) || !std::isfinite(watts)) {
    throw Error(ErrorCode::invalid_argument, "power must be a non-negative wattage");
  }
  PowerSource src;
  src.kind_ = PowerSourceKind::constant_power;
  src.watts_ = watts;
  return src;
}

PowerSource PowerSource::trace(std::vector<PowerSample> samples, double sampling_interval_s) {
  if (samples.empty()) throw Error(ErrorCode::insufficient_samples, "power trace is empty");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!(samples[i].watts >= 0.0) || !std::isfinite(samples[i].watts) ||
        !std::isfinite(samples[i].t_s)) {
      throw Error(ErrorCode::invalid_argument, "power trace has an invalid sample");
    }
    if (i > 0 && !(samples[i].t_s > samples[i - 1].t_s)) {
      throw Error(ErrorCode::invalid_argument, "power trace timestamps must strictly increase");
    }
  }
  PowerSource src;
  src.kind_ = PowerSourceKind::trace;
  src.samples_ = std::move(samples);
  src.interval_s_ = sampling_interval_s;
  return src;
}

fs::path PowerSource::default_counter_dir() { return "/sys/class/powercap/intel-rapl:0"; }

PowerSource PowerSource::platform(fs::path counter_dir) {
  PowerSource src;
  src.kind_ = PowerSourceKind::platform_counter;
  src.counter_dir_ = std::move(counter_dir);
  return src;
}

namespace {

bool read_counter(const fs::path& file, unsigned long long& value) {
  std::ifstream in(file);
  return static_cast<bool>(in >> value);
}

}  // namespace

bool PowerSource::available() const {
  if (kind_ != PowerSourceKind::platform_counter) return true;
  unsigned long long v = 0;
  return read_counter(counter_dir_ / "energy_uj", v);
}

double integrate_trace(std::span<const PowerSample> samples, double t0, double t1,
                       std::size_t* samples_used) {
  if (samples.empty() || !(t1 >= t0)) {
    throw Error(ErrorCode::insufficient_samples, "no power samples in the window");
  }
  const double lo = std::max(t0, samples.front().t_s);
  const double hi = std::min(t1, samples.back().t_s);
  if (!(hi > lo)) {
    throw Error(ErrorCode::insufficient_samples,
                "power trace does not overlap the measured interval");
  }
  const auto at = [&](std::size_t i, double t) {
    const auto& a = samples[i];
    const auto& b = samples[i + 1];
    return a.watts + (b.watts - a.watts) * (t - a.t_s) / (b.t_s - a.t_s);
  };
  double energy = 0.0;
  std::size_t used = 0;
  for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
    const double a = std::max(lo, samples[i].t_s);
    const double b = std::min(hi, samples[i + 1].t_s);
    if (!(b > a)) continue;
    energy += 0.5 * (at(i, a) + at(i, b)) * (b - a);
  }
  for (const auto& s : samples) {
    if (s.t_s >= lo && s.t_s <= hi) ++used;
  }
  if (samples_used) *samples_used = used;
  return energy;
}

namespace detail {

MeterStart begin_measure(const PowerSource& src) {
  MeterStart start;
  if (src.kind() == PowerSourceKind::platform_counter &&
      !read_counter(src.counter_dir() / "energy_uj", start.counter_uj)) {
    throw Error(ErrorCode::capability_unavailable,
                "platform energy counter unavailable at '" + src.counter_dir().string() + "'");
  }
  start.t0 = std::chrono::steady_clock::now();
  return start;
}

EnergyReport end_measure(const PowerSource& src, const MeterStart& start) {
  const auto t1 = std::chrono::steady_clock::now();
  EnergyReport r;
  r.source_kind = src.kind();
  r.duration_s = std::chrono::duration<double>(t1 - start.t0).count();
  switch (src.kind()) {
    case PowerSourceKind::constant_power:
      r.energy_j = src.watts() * r.duration_s;
      r.samples_used = 0;
      break;
    case PowerSourceKind::trace:
      r.energy_j = integrate_trace(src.samples(), 0.0, r.duration_s, &r.samples_used);
      break;
    case PowerSourceKind::platform_counter: {
      unsigned long long end_uj = 0;
      if (!read_counter(src.counter_dir() / "energy_uj", end_uj)) {
        throw Error(ErrorCode::capability_unavailable, "platform energy counter vanished");
      }
      unsigned long long delta = end_uj - start.counter_uj;
      if (end_uj < start.counter_uj) {
        unsigned long long range = 0;
        if (!read_counter(src.counter_dir() / "max_energy_range_uj", range)) {
          throw Error(ErrorCode::capability_unavailable,
                      "energy counter wrapped and its range is unknown");
        }
        delta = range - start.counter_uj + end_uj;
      }
      r.energy_j = static_cast<double>(delta) * 1e-6;
      r.samples_used = 2;
      break;
    }
  }
  r.mean_power_w = r.duration_s > 0.0 ? r.energy_j / r.duration_s : 0.0;
  return r;
}

}  // namespace detail

const WorkloadSummary& Comparison::summary(std::string_view name) const {
  for (const auto& s : summaries) {
    if (s.name == name) return s;
  }
  throw Error(ErrorCode::invalid_argument, "no workload named '" + std::string(name) + "'");
}

namespace {

void mean_std(const std::vector<double>& xs, double& mean, double& stddev) {
  mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  stddev = 0.0;
  if (xs.size() < 2) return;
  for (double x : xs) stddev += (x - mean) * (x - mean);
  stddev = std::sqrt(stddev / static_cast<double>(xs.size() - 1));
}

}  // namespace

Comparison compare(std::span<const Workload> workloads, const PowerSource& src,
                   std::size_t repetitions, std::string_view reference) {
  if (repetitions < 1) throw Error(ErrorCode::invalid_argument, "repetitions must be >= 1");
  const bool has_reference = std::any_of(workloads.begin(), workloads.end(),
                                         [&](const Workload& w) { return w.name == reference; });
  if (!has_reference) {
    throw Error(ErrorCode::invalid_argument,
                "reference workload '" + std::string(reference) + "' is not in the list");
  }

  Comparison out;
  out.reference = std::string(reference);
  out.source_kind = src.kind();
  for (const auto& w : workloads) {
    measure(src, w.run);  // warm-up, discarded
    std::vector<double> durations, energies;
    for (std::size_t rep = 0; rep < repetitions; ++rep) {
      const EnergyReport r = measure(src, w.run);
      out.records.push_back({w.name, rep, r});
      durations.push_back(r.duration_s);
      energies.push_back(r.energy_j);
    }
    WorkloadSummary s;
    s.name = w.name;
    s.repetitions = repetitions;
    s.std_defined = repetitions > 1;
    mean_std(durations, s.mean_duration_s, s.std_duration_s);
    mean_std(energies, s.mean_energy_j, s.std_energy_j);
    out.summaries.push_back(s);
  }

  const WorkloadSummary ref = out.summary(reference);
  for (auto& s : out.summaries) {
    s.speedup_vs_reference = s.mean_duration_s > 0.0 ? ref.mean_duration_s / s.mean_duration_s : 0.0;
    s.energy_ratio_vs_reference = s.mean_energy_j > 0.0 ? ref.mean_energy_j / s.mean_energy_j : 0.0;
  }
  return out;
}

namespace {

nlohmann::json report_json(const EnergyReport& r) {
  return {{"duration_s", r.duration_s},
          {"energy_j", r.energy_j},
          {"mean_power_w", r.mean_power_w},
          {"source", to_string(r.source_kind)},
          {"samples_used", r.samples_used}};
}

}  // namespace

std::string energy_report_to_json(const EnergyReport& r) { return report_json(r).dump(); }

std::string comparison_to_jsonl(const Comparison& c) {
  using nlohmann::json;
  std::string out;
  for (const auto& rec : c.records) {
    json j = report_json(rec.report);
    j["type"] = "repetition";
    j["workload"] = rec.workload;
    j["repetition"] = rec.repetition;
    out += j.dump() + "\n";
  }
  for (const auto& s : c.summaries) {
    json j = {{"type", "summary"},
              {"workload", s.name},
              {"repetitions", s.repetitions},
              {"mean_duration_s", s.mean_duration_s},
              {"std_duration_s", s.std_duration_s},
              {"mean_energy_j", s.mean_energy_j},
              {"std_energy_j", s.std_energy_j},
              {"std_defined", s.std_defined},
              {"speedup_vs_reference", s.speedup_vs_reference},
              {"energy_ratio_vs_reference", s.energy_ratio_vs_reference}};
    out += j.dump() + "\n";
  }
  json tail = {{"type", "comparison"},
               {"reference", c.reference},
               {"source", to_string(c.source_kind)},
               {"warmup_excluded", true},
               {"disclaimer", kEnergyDisclaimer}};
  out += tail.dump() + "\n";
  return out;
}

std::string comparison_table(const Comparison& c) {
  std::string out;
  char line[256];
  std::snprintf(line, sizeof line, "%-16s %5s %12s %12s %12s %12s %9s %9s\n", "workload", "reps",
                "time_s", "time_std", "energy_J", "energy_std", "speedup", "e_ratio");
  out += line;
  for (const auto& s : c.summaries) {
    std::snprintf(line, sizeof line, "%-16s %5zu %12.6f %11.6f%s %12.6f %11.6f%s %9.2f %9.2f\n",
                  s.name.c_str(), s.repetitions, s.mean_duration_s, s.std_duration_s,
                  s.std_defined ? " " : "!", s.mean_energy_j, s.std_energy_j,
                  s.std_defined ? " " : "!", s.speedup_vs_reference,
                  s.energy_ratio_vs_reference);
    out += line;
  }
  out += "ratios relative to '" + c.reference + "' (source: " +
         std::string(to_string(c.source_kind)) + ")\n";
  if (std::any_of(c.summaries.begin(), c.summaries.end(),
                  [](const WorkloadSummary& s) { return !s.std_defined; })) {
    out += "! single repetition, std not defined\n";
  }
  out += "note: " + std::string(kEnergyDisclaimer) + "\n";
  return out;
}

}  // namespace hdqual
