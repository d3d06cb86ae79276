#pragma once

// Fleet-scale annual inference energy:
//
//   E = E_I * nu * tau * rho * N_M * N_P
//
// E_I joules per inference, nu inferences per second during fabrication,
// tau seconds per part, rho parts per machine-year, N_M machines, N_P
// process types.

#include <string>

#include "hdqual/metering.hpp"

namespace hdqual {

inline constexpr double kJoulesPerKwh = 3.6e6;
/// kg CO2e per kWh; 7000 t over 1e7 kWh.
inline constexpr double kDefaultCo2KgPerKwh = 0.7;

struct ProjectionParams {
  double energy_per_inference_j = 0.0;
  double inference_rate_hz = 1.0;
  double part_time_s = 3600.0;
  double parts_per_year = 1000.0;
  double machines = 1e6;
  double processes = 1.0;

  /// Throws invalid_argument on negative or non-finite values.
  void validate() const;
};

struct SavingsReport {
  double energy_a_j = 0.0;
  double energy_b_j = 0.0;
  double savings_j = 0.0;
  double savings_kwh = 0.0;
  double co2e_tons = 0.0;
  double co2_factor_kg_per_kwh = kDefaultCo2KgPerKwh;
};

double annual_energy(const ProjectionParams& p);

/// savings = annual_energy(b) - annual_energy(a); negative when a uses more.
SavingsReport savings(const ProjectionParams& a, const ProjectionParams& b,
                      double co2_factor_kg_per_kwh = kDefaultCo2KgPerKwh);

/// Energy per inference from a metered run of `inferences` predictions.
double energy_per_inference(const EnergyReport& report, double inferences);

/// Scenario JSON: {"candidate": {...}, "baseline": {...}, "co2_factor_kg_per_kwh": x}
/// where each side carries the six parameters (see docs/scenario_format.md).
/// Omitted parameters of a side fall back to a "shared" object, then to the
/// ProjectionParams defaults; energy_per_inference_j is required per side.
struct Scenario {
  ProjectionParams candidate;
  ProjectionParams baseline;
  double co2_factor_kg_per_kwh = kDefaultCo2KgPerKwh;
};

Scenario scenario_from_json(const std::string& text);
std::string savings_to_json(const Scenario& s, const SavingsReport& r);
std::string savings_text(const Scenario& s, const SavingsReport& r);

/// Rounds to two significant figures, as used for headline numbers.
double round_headline(double v);

}  // namespace hdqual
