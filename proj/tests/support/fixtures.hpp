#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "amcomp/dataset.hpp"
#include "amcomp/design.hpp"
#include "amcomp/model.hpp"
#include "amcomp/synth.hpp"
#include "oracle_values.hpp"

namespace fixtures {

inline amcomp::CompensationDesign design_from(const std::array<int, 16>& levels, double unit, double r0) {
  amcomp::CompensationDesign d;
  d.levels.assign(levels.begin(), levels.end());
  d.unit_size = unit;
  d.nominal_radius = r0;
  return d;
}

/// The 14-unit dataset of the log-posterior oracle: radii 0.5 and 1 on
/// designs A and B with unit 0.03.
inline amcomp::DeformationDataset oracle_dataset() {
  amcomp::DeformationDataset data;
  data.designs[0.5] = design_from(oracle::kDesignA, 0.03, 0.5);
  data.designs[1.0] = design_from(oracle::kDesignB, 0.03, 1.0);
  std::size_t i = 0;
  for (double r0 : {0.5, 1.0}) {
    for (double t : oracle::kDataThetas) {
      amcomp::Observation obs;
      obs.theta = amcomp::Angle(t);
      obs.r0 = r0;
      obs.assigned_compensation = amcomp::assigned_compensation(data.designs.at(r0), obs.theta);
      obs.deformation = oracle::kDataDeformation[i++];
      data.observations.push_back(obs);
    }
  }
  return data;
}

/// Parameters matching the oracle log-posterior values for each variant.
inline amcomp::ModelParams oracle_params(amcomp::Variant v) {
  amcomp::ModelParams p;
  p.variant = v;
  p.baseline = amcomp::reference_baseline_params();
  p.baseline.sigma = 0.002;
  if (v == amcomp::Variant::kSimpleInterference || v == amcomp::Variant::kRefinedInterference) p.radii = {0.5, 1.0};
  if (v == amcomp::Variant::kSimpleInterference) p.lambda = {30.0, 60.0};
  if (v == amcomp::Variant::kRefinedInterference) {
    p.refined = {{40.0, 70.0, 0.02, {0.01, -0.005, 0.002}, {0.003, 0.004, -0.001}},
                 {25.0, 90.0, -0.01, {0.004, 0.0, -0.003}, {-0.002, 0.001, 0.005}}};
  }
  return p;
}

inline bool rel_close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

}  // namespace fixtures
