#pragma once

#include <array>
#include <cmath>

#include "hyperbell/analyzer.hpp"
#include "hyperbell/functionals.hpp"

namespace hyperbell {

// Calibrated wave-plate table for the four-setting functional, quarter-wave
// plates at zero. Chosen on the ideal apparatus model so that the maximally
// entangled input sits near the quoted working point and the dephasing scan
// crosses the local and qubit bounds inside their quoted windows.
struct ReferenceAngles {
  double hwp1_deg, hwp2_deg;
};

inline constexpr std::array<ReferenceAngles, 4> kReferenceA = {
    {{84.0, 38.0}, {3.0, 54.0}, {154.0, 153.0}, {18.0, 119.0}}};
inline constexpr std::array<ReferenceAngles, 4> kReferenceB = {
    {{82.0, 50.0}, {96.0, 128.0}, {69.0, 111.0}, {13.0, 65.0}}};

namespace detail {

inline MeasurementPlan plan_from_angles(const std::array<ReferenceAngles, 4>& table) {
  MeasurementPlan plan;
  plan.mode = OutcomeMode::detector1_vs_rest;
  plan.settings.resize(4);
  for (int i = 0; i < 4; ++i) {
    plan.settings[i].hwp1 = table[i].hwp1_deg * kDegree;
    plan.settings[i].hwp2 = table[i].hwp2_deg * kDegree;
  }
  return plan;
}

}

inline MeasurementPlan reference_plan_a() { return detail::plan_from_angles(kReferenceA); }
inline MeasurementPlan reference_plan_b() { return detail::plan_from_angles(kReferenceB); }

// Steering protocol settings, identical for both parties: the level basis is
// read out with all plates at zero; the superposition basis rotates both
// port half-wave plates by 22.5 degrees. Order: [X-type, Z-type].
inline MeasurementPlan steering_plan() {
  MeasurementPlan plan;
  plan.settings.resize(2);
  plan.settings[0].hwp2 = 22.5 * kDegree;
  plan.settings[0].hwp3 = 22.5 * kDegree;
  return plan;
}

// Polarization CHSH analysis angles, stored as the polarization direction
// each first-pair half-wave plate selects (direction = twice the plate
// angle). Outcomes group the two interferometer ports.
inline constexpr std::array<double, 2> kChshAnglesAdeg = {0.0, 45.0};
inline constexpr std::array<double, 2> kChshAnglesBdeg = {22.5, 67.5};

inline MeasurementPlan chsh_plan(const std::array<double, 2>& analysis_deg) {
  MeasurementPlan plan;
  plan.mode = OutcomeMode::portA_vs_portB;
  plan.settings.resize(2);
  for (int i = 0; i < 2; ++i)
    plan.settings[i].hwp1 = analysis_deg[i] * kDegree / 2.0;
  return plan;
}

inline MeasurementPlan chsh_plan_a() { return chsh_plan(kChshAnglesAdeg); }
inline MeasurementPlan chsh_plan_b() { return chsh_plan(kChshAnglesBdeg); }

}
