#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "amcomp/dataset.hpp"
#include "amcomp/model.hpp"
#include "amcomp/random.hpp"
#include "amcomp/sampler.hpp"

namespace amcomp {

/// Baseline parameter draws (constrained scale) from the first six columns
/// of any variant's draws.
std::vector<BaselineParams<>> baseline_draws(const PosteriorDraws& draws);

/// Central posterior predictive interval for one unit under a uniform
/// compensation.
struct PredictiveBand {
  Angle theta;
  double r0 = 0.0;
  double compensation = 0.0;  ///< inches, applied uniformly
  double mean = 0.0;          ///< posterior mean of the expected deformation
  double lower = 0.0;
  double upper = 0.0;
  double level = 0.99;
};

/// For each draw, simulates a deformation from the first-order compensation
/// model with g = compensation and the draw's sigma, then takes the central
/// quantiles at the requested level. Throws std::invalid_argument when draws
/// are empty or level is outside (0, 1).
PredictiveBand predictive_band(std::span<const BaselineParams<>> draws, Angle theta, double r0,
                               double compensation, double level, Philox& rng);

/// One band per experiment unit at its assigned compensation. Unit i uses
/// the Philox stream (seed, i).
std::vector<PredictiveBand> predictive_bands(std::span<const BaselineParams<>> draws,
                                             const DeformationDataset& experiment, double level,
                                             std::uint64_t seed);

enum class InterferenceClass { kNegligible, kSubstantial };

struct InterferenceVerdict {
  InterferenceClass verdict = InterferenceClass::kNegligible;
  /// 0 inside the band; otherwise observed - upper (above) or observed - lower (below).
  double excess = 0.0;
};

/// Inside the band is negligible, outside is substantial. The bands must be
/// on the experiment's grid (same theta, radius and compensation, in order);
/// throws std::invalid_argument otherwise.
std::vector<InterferenceVerdict> classify_interference(const DeformationDataset& experiment,
                                                       std::span<const PredictiveBand> bands);

double negligible_fraction(std::span<const InterferenceVerdict> verdicts);

/// Treatment inferred from one observation and one parameter draw by
/// inverting the first-order compensation model.
struct InferredTreatment {
  double value = 0.0;
  bool ill_conditioned = false;  ///< |1 + h| < 1e-6; value is NaN
};

InferredTreatment infer_effective_treatment(const Observation& obs, const BaselineParams<>& params);

/// Weight on the unit's own section implied by an effective treatment.
/// Empty when both sections received the same compensation.
std::optional<double> infer_weight(double effective, double x_own, double x_neighbor);

/// Across-draw summary of the inferred treatment for one unit.
struct EffectiveTreatmentEstimate {
  Angle theta;
  double r0 = 0.0;
  double assigned = 0.0;
  double x_own = 0.0;
  double x_neighbor = 0.0;
  double mean = 0.0;   ///< posterior mean of inferred g
  double lower = 0.0;  ///< central interval
  double upper = 0.0;
  std::optional<double> weight;  ///< from the mean; empty when x_own == x_neighbor
  std::size_t ill_conditioned_draws = 0;
};

/// Requires designs on the dataset for x_own / x_neighbor; without one the
/// neighbor compensation is taken equal to the assigned one.
std::vector<EffectiveTreatmentEstimate> estimate_effective_treatments(const DeformationDataset& data,
                                                                      std::span<const BaselineParams<>> draws,
                                                                      double interval = 0.95);

/// Observed deformation minus the across-draw mean of the variant's mean
/// function, per unit in dataset order.
Eigen::VectorXd residuals(const DeformationDataset& data, const PosteriorDraws& draws, Variant variant,
                          int harmonics = 3);

}  // namespace amcomp
