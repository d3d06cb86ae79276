#include "hdqual/projection.hpp"

#include <cmath>
#include <cstdio>

#include "hdqual/error.hpp"
#include "json.hpp"

namespace hdqual {

using nlohmann::json;

void ProjectionParams::validate() const {
  const double fields[] = {energy_per_inference_j, inference_rate_hz, part_time_s,
                           parts_per_year, machines, processes};
  for (double v : fields) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw Error(ErrorCode::invalid_argument, "projection parameters must be finite and >= 0");
    }
  }
}

double annual_energy(const ProjectionParams& p) {
  p.validate();
  return p.energy_per_inference_j * p.inference_rate_hz * p.part_time_s * p.parts_per_year *
         p.machines * p.processes;
}

SavingsReport savings(const ProjectionParams& a, const ProjectionParams& b,
                      double co2_factor_kg_per_kwh) {
  if (!(co2_factor_kg_per_kwh >= 0.0) || !std::isfinite(co2_factor_kg_per_kwh)) {
    throw Error(ErrorCode::invalid_argument, "CO2 factor must be finite and >= 0");
  }
  SavingsReport r;
  r.energy_a_j = annual_energy(a);
  r.energy_b_j = annual_energy(b);
  r.savings_j = r.energy_b_j - r.energy_a_j;
  r.savings_kwh = r.savings_j / kJoulesPerKwh;
  r.co2_factor_kg_per_kwh = co2_factor_kg_per_kwh;
  r.co2e_tons = r.savings_kwh * co2_factor_kg_per_kwh / 1000.0;
  return r;
}

double energy_per_inference(const EnergyReport& report, double inferences) {
  if (!(inferences > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "inference count must be positive");
  }
  return report.energy_j / inferences;
}

double round_headline(double v) {
  if (v == 0.0 || !std::isfinite(v)) return v;
  const double mag = std::pow(10.0, std::floor(std::log10(std::abs(v))) - 1.0);
  return std::round(v / mag) * mag;
}

namespace {

constexpr const char* kParamNames[] = {"energy_per_inference_j", "inference_rate_hz",
                                       "part_time_s", "parts_per_year", "machines",
                                       "processes"};

double* param_slot(ProjectionParams& p, std::size_t i) {
  double* slots[] = {&p.energy_per_inference_j, &p.inference_rate_hz, &p.part_time_s,
                     &p.parts_per_year, &p.machines, &p.processes};
  return slots[i];
}

void read_params(const json& obj, const std::string& where, ProjectionParams& p) {
  if (!obj.is_object()) throw Error(ErrorCode::schema, "scenario: '" + where + "' must be an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (std::size_t i = 0; i < std::size(kParamNames); ++i) {
      if (it.key() != kParamNames[i]) continue;
      known = true;
      if (!it->is_number()) {
        throw Error(ErrorCode::schema, "scenario: field '" + where + "." + it.key() +
                                           "' must be a number");
      }
      const double v = it->get<double>();
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw Error(ErrorCode::schema, "scenario: field '" + where + "." + it.key() +
                                           "' must be finite and >= 0");
      }
      *param_slot(p, i) = v;
    }
    if (!known) {
      throw Error(ErrorCode::schema, "scenario: unknown field '" + where + "." + it.key() + "'");
    }
  }
}

json params_json(const ProjectionParams& p) {
  json j = json::object();
  ProjectionParams copy = p;
  for (std::size_t i = 0; i < std::size(kParamNames); ++i) j[kParamNames[i]] = *param_slot(copy, i);
  return j;
}

}  // namespace

Scenario scenario_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::schema, std::string("scenario: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::schema, "scenario: top level must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const auto& k = it.key();
    if (k != "candidate" && k != "baseline" && k != "shared" && k != "co2_factor_kg_per_kwh" &&
        k != "description") {
      throw Error(ErrorCode::schema, "scenario: unknown field '" + k + "'");
    }
  }
  Scenario s;
  ProjectionParams shared;
  if (j.contains("shared")) read_params(j["shared"], "shared", shared);
  for (const char* side : {"candidate", "baseline"}) {
    if (!j.contains(side)) {
      throw Error(ErrorCode::schema, std::string("scenario: missing field '") + side + "'");
    }
    if (!j[side].contains("energy_per_inference_j")) {
      throw Error(ErrorCode::schema,
                  std::string("scenario: missing field '") + side + ".energy_per_inference_j'");
    }
    ProjectionParams p = shared;
    read_params(j[side], side, p);
    (std::string(side) == "candidate" ? s.candidate : s.baseline) = p;
  }
  if (j.contains("co2_factor_kg_per_kwh")) {
    const auto& f = j["co2_factor_kg_per_kwh"];
    if (!f.is_number() || !(f.get<double>() >= 0.0)) {
      throw Error(ErrorCode::schema,
                  "scenario: field 'co2_factor_kg_per_kwh' must be a non-negative number");
    }
    s.co2_factor_kg_per_kwh = f.get<double>();
  }
  return s;
}

std::string savings_to_json(const Scenario& s, const SavingsReport& r) {
  json j = {{"format", "hdqual.savings"},
            {"version", 1},
            {"candidate", params_json(s.candidate)},
            {"baseline", params_json(s.baseline)},
            {"candidate_annual_energy_j", r.energy_a_j},
            {"baseline_annual_energy_j", r.energy_b_j},
            {"savings_j", r.savings_j},
            {"savings_kwh", r.savings_kwh},
            {"co2_factor_kg_per_kwh", r.co2_factor_kg_per_kwh},
            {"co2e_tons", r.co2e_tons},
            {"headline",
             {{"savings_j", round_headline(r.savings_j)},
              {"savings_kwh", round_headline(r.savings_kwh)},
              {"co2e_tons", round_headline(r.co2e_tons)}}}};
  return j.dump(2) + "\n";
}

std::string savings_text(const Scenario&, const SavingsReport& r) {
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "candidate annual energy : %.6e J\n"
                "baseline annual energy  : %.6e J\n"
                "savings                 : %.6e J  (~%.1e J)\n"
                "savings                 : %.6e kWh  (~%.1e kWh)\n"
                "CO2e                    : %.6g t  at %.4g kg/kWh\n",
                r.energy_a_j, r.energy_b_j, r.savings_j, round_headline(r.savings_j),
                r.savings_kwh, round_headline(r.savings_kwh), r.co2e_tons,
                r.co2_factor_kg_per_kwh);
  std::string out = buf;
  if (r.savings_j < 0.0) out += "note: negative savings, the candidate uses more energy\n";
  return out;
}

}  // namespace hdqual
