#pragma once

// Time and energy metering for benchmark workloads.
//
// Duration comes from the monotonic clock. Energy depends on the source:
//   constant_power    watts * duration
//   trace             trapezoidal integral of (t, watts) samples over
//                     [0, duration], t measured from workload start
//   platform_counter  difference of an OS cumulative energy counter
//                     (powercap energy_uj), wrap-around corrected
//
// Figures are CPU-side estimates for this host only.

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <vector>

namespace hdqual {

inline constexpr std::string_view kEnergyDisclaimer =
    "CPU-side estimate on this host; ratios are specific to this machine and baseline "
    "and are not comparable to GPU-board energy measurements of other model families";

enum class PowerSourceKind { constant_power, platform_counter, trace };
std::string_view to_string(PowerSourceKind kind) noexcept;

struct PowerSample {
  double t_s;
  double watts;
};

/// A power source serializes its users: measure() holds its lock for the
/// whole workload, so two benchmarked workloads never overlap on one source.
class PowerSource {
 public:
  static PowerSource constant(double watts);
  /// Timestamps must be strictly increasing and watts non-negative.
  static PowerSource trace(std::vector<PowerSample> samples, double sampling_interval_s = 0.0);
  /// Reads <dir>/energy_uj (and max_energy_range_uj for wrap-around).
  static PowerSource platform(std::filesystem::path counter_dir = default_counter_dir());
  static std::filesystem::path default_counter_dir();

  PowerSourceKind kind() const noexcept { return kind_; }
  double watts() const noexcept { return watts_; }
  std::span<const PowerSample> samples() const noexcept { return samples_; }
  double sampling_interval_s() const noexcept { return interval_s_; }
  const std::filesystem::path& counter_dir() const noexcept { return counter_dir_; }
  /// False for platform sources whose counter cannot be read.
  bool available() const;

  std::mutex& lock() const noexcept { return *mutex_; }

 private:
  PowerSource() : mutex_(std::make_unique<std::mutex>()) {}

  PowerSourceKind kind_ = PowerSourceKind::constant_power;
  double watts_ = 0.0;
  std::vector<PowerSample> samples_;
  double interval_s_ = 0.0;
  std::filesystem::path counter_dir_;
  std::unique_ptr<std::mutex> mutex_;
};

struct EnergyReport {
  double duration_s = 0.0;
  double energy_j = 0.0;
  double mean_power_w = 0.0;
  PowerSourceKind source_kind = PowerSourceKind::constant_power;
  std::size_t samples_used = 0;
};

/// Trapezoidal integral of a piecewise-linear power trace over [t0, t1],
/// interpolating at the clip points. Throws insufficient_samples when the
/// window does not overlap the trace.
double integrate_trace(std::span<const PowerSample> samples, double t0, double t1,
                       std::size_t* samples_used = nullptr);

namespace detail {

struct MeterStart {
  std::chrono::steady_clock::time_point t0;
  unsigned long long counter_uj = 0;
};

MeterStart begin_measure(const PowerSource& src);
EnergyReport end_measure(const PowerSource& src, const MeterStart& start);

}  // namespace detail

template <typename R>
struct Measured {
  R result;
  EnergyReport report;
};

/// Runs `workload` under `src`. Non-void results are passed through in a
/// Measured<R>; void workloads return the EnergyReport alone.
template <typename F>
auto measure(const PowerSource& src, F&& workload) {
  using R = std::invoke_result_t<F>;
  std::lock_guard guard(src.lock());
  const auto start = detail::begin_measure(src);
  if constexpr (std::is_void_v<R>) {
    std::invoke(std::forward<F>(workload));
    return detail::end_measure(src, start);
  } else {
    R result = std::invoke(std::forward<F>(workload));
    auto report = detail::end_measure(src, start);
    return Measured<R>{std::move(result), report};
  }
}

struct Workload {
  std::string name;
  std::function<void()> run;
};

struct RepetitionRecord {
  std::string workload;
  std::size_t repetition = 0;
  EnergyReport report;
};

struct WorkloadSummary {
  std::string name;
  std::size_t repetitions = 0;
  double mean_duration_s = 0.0;
  double std_duration_s = 0.0;
  double mean_energy_j = 0.0;
  double std_energy_j = 0.0;
  /// false when repetitions == 1; the std fields are then 0.
  bool std_defined = false;
  /// reference mean / this mean; > 1 means faster (or cheaper) than reference.
  double speedup_vs_reference = 1.0;
  double energy_ratio_vs_reference = 1.0;
};

struct Comparison {
  std::string reference;
  PowerSourceKind source_kind = PowerSourceKind::constant_power;
  std::vector<RepetitionRecord> records;
  std::vector<WorkloadSummary> summaries;

  const WorkloadSummary& summary(std::string_view name) const;
};

/// Each workload runs once as an excluded warm-up, then `repetitions` timed
/// times. `reference` must name one of the workloads.
Comparison compare(std::span<const Workload> workloads, const PowerSource& src,
                   std::size_t repetitions, std::string_view reference);

std::string energy_report_to_json(const EnergyReport& r);
/// One JSON object per line: every repetition, every workload summary, then
/// a closing record naming the reference and the disclaimer.
std::string comparison_to_jsonl(const Comparison& c);
std::string comparison_table(const Comparison& c);

}  // namespace hdqual
