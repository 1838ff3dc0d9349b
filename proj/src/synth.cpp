#include "amcomp/synth.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "amcomp/random.hpp"

namespace amcomp {

BaselineParams<> reference_baseline_params() {
  return {-1.34e-2, 5.7e-3, 0.861, 1.13, 8.79e-3, 8.7e-4};
}

ModelParams reference_simple_interference_params() {
  ModelParams p;
  p.variant = Variant::kSimpleInterference;
  p.baseline = {-1.06e-2, 5.79e-3, 0.95, 1.12, 7.1e-3, 3.14e-3};
  p.radii = reference_radii();
  p.lambda = {32.66, 48.24, 76.83, 86.08};
  return p;
}

std::vector<double> reference_radii() { return {0.5, 1.0, 2.0, 3.0}; }
std::vector<std::size_t> reference_baseline_points() { return {749, 707, 700, 721}; }
std::vector<std::size_t> reference_experiment_points() { return {6159, 6022, 6206, 6056}; }

void ScenarioSpec::validate() const {
  if (radii.empty()) throw std::invalid_argument("scenario has no cylinders");
  if (points.size() != radii.size()) throw std::invalid_argument("need one point count per radius");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0)) throw std::invalid_argument("radii must be positive");
    if (points[i] == 0) throw std::invalid_argument("point counts must be positive");
  }
  for (const auto& h : roughness) {
    if (h.k < 3) {
      throw std::invalid_argument("roughness harmonic k=" + std::to_string(h.k) +
                                  " would alias the cos(2 theta) term; use k >= 3");
    }
  }
  if (scenario == Scenario::kExperiment) {
    for (double r : radii) {
      const auto it = designs.find(r);
      if (it == designs.end()) throw std::invalid_argument("no design for radius " + radius_label(r));
      if (it->second.nominal_radius != r) {
        throw std::invalid_argument("design radius does not match cylinder " + radius_label(r));
      }
      const auto violations = validate_design(it->second);
      if (!violations.empty()) {
        throw std::invalid_argument("design for radius " + radius_label(r) + " is invalid: " +
                                    violations.front().message);
      }
    }
  }
  if (params.variant == Variant::kSimpleInterference && params.lambda.size() != params.radii.size()) {
    throw std::invalid_argument("need one lambda per radius");
  }
}

ScenarioSpec ScenarioSpec::reference_baseline(std::uint64_t seed) {
  ScenarioSpec s;
  s.scenario = Scenario::kBaseline;
  s.params.variant = Variant::kBaseline;
  s.params.baseline = reference_baseline_params();
  s.seed = seed;
  return s;
}

ScenarioSpec ScenarioSpec::reference_experiment(std::uint64_t seed) {
  ScenarioSpec s;
  s.scenario = Scenario::kExperiment;
  s.points = reference_experiment_points();
  s.params = reference_simple_interference_params();
  s.seed = seed;
  for (std::size_t i = 0; i < s.radii.size(); ++i) {
    const double r = s.radii[i];
    s.designs[r] = generate_design(derive_seed(seed, 0x100 + i), SectionLayout(16), default_unit_size(r), r);
  }
  return s;
}

std::vector<Angle> unit_grid(std::size_t n) {
  std::vector<Angle> out;
  out.reserve(n);
  char buf[40];
  for (std::size_t i = 0; i < n; ++i) {
    const double theta = kTwoPi * static_cast<double>(i) / static_cast<double>(n);
    std::snprintf(buf, sizeof buf, "%.12g", theta);
    out.emplace_back(std::strtod(buf, nullptr));
  }
  return out;
}

double generator_mean(const ModelParams& params, const Observation& unit, const CompensationDesign* design) {
  const double theta = unit.theta.radians();
  const auto& bp = params.baseline;
  double g = 0.0;
  switch (params.variant) {
    case Variant::kBaseline:
      return baseline_mean(bp, theta, unit.r0);
    case Variant::kNoInterference:
      g = unit.assigned_compensation;
      break;
    case Variant::kSimpleInterference:
      if (!design) throw std::invalid_argument("interference generator needs a design");
      g = effective_treatment_simple(params.simple_view(), unit.theta, *design);
      break;
    case Variant::kRefinedInterference:
      if (!design) throw std::invalid_argument("interference generator needs a design");
      g = effective_treatment_refined(params.refined_view().for_radius(unit.r0), unit.theta, *design);
      break;
  }
  return taylor_compensated_mean(bp, theta, unit.r0, g);
}

DeformationDataset simulate(const ScenarioSpec& spec) {
  spec.validate();
  DeformationDataset out;
  const bool experiment = spec.scenario == Scenario::kExperiment;
  if (experiment) out.designs = spec.designs;
  ModelParams params = spec.params;
  if (!experiment) params.variant = Variant::kBaseline;
  for (std::size_t c = 0; c < spec.radii.size(); ++c) {
    const double r0 = spec.radii[c];
    const CompensationDesign* design = experiment ? &spec.designs.at(r0) : nullptr;
    Philox rng(derive_seed(spec.seed, 0x73796e74ull), c);
    for (const Angle theta : unit_grid(spec.points[c])) {
      Observation obs;
      obs.theta = theta;
      obs.r0 = r0;
      obs.assigned_compensation = design ? assigned_compensation(*design, theta) : 0.0;
      double y = generator_mean(params, obs, design);
      for (const auto& h : spec.roughness) y += h.amplitude * std::cos(h.k * theta.radians());
      y += params.baseline.sigma * standard_normal(rng);
      obs.deformation = y;
      out.observations.push_back(obs);
    }
  }
  return out;
}

}  // namespace amcomp
