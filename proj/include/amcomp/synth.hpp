#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <vector>

#include "amcomp/dataset.hpp"
#include "amcomp/design.hpp"
#include "amcomp/model.hpp"

namespace amcomp {

/// Posterior means reported for the uncompensated cylinders.
BaselineParams<> reference_baseline_params();

/// Posterior means reported for the simple interference fit to the
/// compensation experiment (radii 0.5, 1, 2, 3 inch).
ModelParams reference_simple_interference_params();

/// Cylinder radii of the reference experiment, inches.
std::vector<double> reference_radii();
/// Measured units per cylinder without compensation.
std::vector<std::size_t> reference_baseline_points();
/// Measured units per cylinder in the compensation experiment.
std::vector<std::size_t> reference_experiment_points();

/// Fixed surface-roughness harmonic added as amplitude * cos(k theta).
struct Harmonic {
  int k = 3;
  double amplitude = 0.0;
};

enum class Scenario { kBaseline, kExperiment };

struct ScenarioSpec {
  Scenario scenario = Scenario::kBaseline;
  std::vector<double> radii = reference_radii();
  std::vector<std::size_t> points = reference_baseline_points();
  /// Generating model. Baseline scenarios ignore any compensation.
  ModelParams params;
  /// Experiment scenarios: one design per radius.
  std::map<double, CompensationDesign> designs;
  std::vector<Harmonic> roughness;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument on a radius/point-count/design mismatch,
  /// a roughness harmonic below 3, or a design that fails validation.
  void validate() const;

  static ScenarioSpec reference_baseline(std::uint64_t seed);
  /// Experiment at the reference simple-interference parameters with
  /// designs drawn from the seed.
  static ScenarioSpec reference_experiment(std::uint64_t seed);
};

/// Equally spaced units 2 pi i / n, rounded to 12 significant digits so the
/// stored angle survives a text round trip unchanged.
std::vector<Angle> unit_grid(std::size_t n);

/// Deformation at every unit: the variant's mean with the design's effective
/// treatment, plus roughness harmonics, plus N(0, sigma^2) noise. Each
/// cylinder draws from its own stream of the seed.
DeformationDataset simulate(const ScenarioSpec& spec);

/// Mean deformation the generator uses for one unit (no noise, no roughness).
double generator_mean(const ModelParams& params, const Observation& unit, const CompensationDesign* design);

}  // namespace amcomp
