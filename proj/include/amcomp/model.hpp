#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "amcomp/dataset.hpp"
#include "amcomp/design.hpp"
#include "amcomp/geometry.hpp"

namespace amcomp {

enum class Variant { kBaseline, kNoInterference, kSimpleInterference, kRefinedInterference };

std::string_view to_string(Variant v);
/// Parses "baseline", "no-interference", "simple-interference", "refined-interference".
Variant parse_variant(std::string_view name);

/// Thrown when a power term would be evaluated at a non-positive base.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Cylinder deformation parameters shared by every variant.
template <typename Scalar = double>
struct BaselineParams {
  Scalar alpha{};
  Scalar beta{};
  Scalar a{};
  Scalar b{};
  Scalar x0{};     ///< overexposure, inches
  Scalar sigma{};  ///< noise SD, inches
};

namespace detail {
template <typename Scalar>
Scalar checked_base(const BaselineParams<Scalar>& p, Scalar r0, Scalar x) {
  const Scalar base = r0 + p.x0 + x;
  if (!(base > Scalar(0))) {
    throw DomainError("r0 + x0 + x must be positive (got " + std::to_string(double(base)) + ")");
  }
  return base;
}
}  // namespace detail

/// Expected deformation with no compensation:
/// x0 + alpha (r0+x0)^a + beta (r0+x0)^b cos(2 theta).
template <typename Scalar>
Scalar baseline_mean(const BaselineParams<Scalar>& p, Scalar theta, Scalar r0) {
  using std::cos;
  using std::pow;
  const Scalar rho = detail::checked_base(p, r0, Scalar(0));
  return p.x0 + p.alpha * pow(rho, p.a) + p.beta * pow(rho, p.b) * cos(2 * theta);
}

/// Derivative of the expected deformation with respect to a uniform radial
/// compensation, evaluated at zero compensation.
template <typename Scalar>
Scalar sensitivity(const BaselineParams<Scalar>& p, Scalar theta, Scalar r0) {
  using std::cos;
  using std::pow;
  const Scalar rho = detail::checked_base(p, r0, Scalar(0));
  return p.a * p.alpha * pow(rho, p.a - 1) + p.b * p.beta * pow(rho, p.b - 1) * cos(2 * theta);
}

/// Expected deformation when a uniform compensation x is applied: the
/// printer behaves as if the nominal radius were r0 + x, and x itself is
/// part of the measured deviation.
template <typename Scalar>
Scalar exact_compensated_mean(const BaselineParams<Scalar>& p, Scalar theta, Scalar r0, Scalar x) {
  using std::cos;
  using std::pow;
  const Scalar rho = detail::checked_base(p, r0, x);
  return p.x0 + x + p.alpha * pow(rho, p.a) + p.beta * pow(rho, p.b) * cos(2 * theta);
}

/// True when r0 + x0 + x is positive but within tol of the domain edge,
/// where powers with exponent below one lose precision.
template <typename Scalar>
bool near_domain_boundary(const BaselineParams<Scalar>& p, Scalar r0, Scalar x, Scalar tol = Scalar(1e-6)) {
  const Scalar base = r0 + p.x0 + x;
  return base > Scalar(0) && base < tol;
}

/// First-order expansion of exact_compensated_mean around zero compensation,
/// with g the (effective) treatment received by the unit.
template <typename Scalar>
Scalar taylor_compensated_mean(const BaselineParams<Scalar>& p, Scalar theta, Scalar r0, Scalar g) {
  return baseline_mean(p, theta, r0) + (Scalar(1) + sensitivity(p, theta, r0)) * g;
}

/// Weight on the unit's own section: {1 + exp(lambda (d_M - d_NM))}^{-1}.
template <typename Scalar>
Scalar interference_weight(Scalar lambda, Scalar dist_own, Scalar dist_neighbor) {
  using std::exp;
  return Scalar(1) / (Scalar(1) + exp(lambda * (dist_own - dist_neighbor)));
}

/// Where a unit sits relative to its own section and nearest neighbor.
struct NeighborGeometry {
  std::size_t section = 0;
  std::size_t neighbor = 0;
  double offset_own = 0.0;       ///< theta - theta_M along the short arc
  double offset_neighbor = 0.0;  ///< theta - theta_NM along the short arc
  Angle boundary;                ///< cyclic midpoint of theta_M and theta_NM
};

NeighborGeometry neighbor_geometry(const SectionLayout& layout, Angle theta);

/// Effective treatment of theta under a per-section plan (inches per section)
/// with a constant decay rate.
double effective_treatment(double lambda, Angle theta, const SectionLayout& layout,
                           std::span<const double> section_compensation);

struct SimpleInterferenceParams {
  BaselineParams<> baseline;
  std::vector<double> radii;   ///< ascending
  std::vector<double> lambda;  ///< one per radius, > 0

  double lambda_for(double r0) const;
};

/// Harmonic location shift and gap-dependent decay for one cylinder.
struct RefinedRadiusParams {
  double lambda1 = 1.0;  ///< decay when neighbors differ by one level
  double lambda2 = 1.0;  ///< decay when neighbors differ by two levels
  double delta0 = 0.0;
  std::vector<double> delta_cos;  ///< k = 1..K
  std::vector<double> delta_sin;  ///< k = 1..K

  /// delta0 + sum_k delta_cos[k] cos(k theta_B) + delta_sin[k] sin(k theta_B).
  double location_shift(Angle boundary) const;

  /// Decay rate for a neighbor level gap of 1 or 2; throws DomainError otherwise.
  double decay_for_gap(int level_gap) const;
};

struct RefinedInterferenceParams {
  BaselineParams<> baseline;
  std::vector<double> radii;
  std::vector<RefinedRadiusParams> per_radius;

  const RefinedRadiusParams& for_radius(double r0) const;
};

/// Weighted average of the containing and nearest neighboring sections'
/// compensations with a logistic weight in the distance difference.
double effective_treatment_simple(const SimpleInterferenceParams& p, Angle theta,
                                  const CompensationDesign& design);

/// Same form as the simple model with a gap-dependent decay and both
/// distances measured from midpoints shifted by the cylinder's location
/// shift at the shared section boundary.
double effective_treatment_refined(const RefinedRadiusParams& p, Angle theta,
                                   const CompensationDesign& design);

// ---------------------------------------------------------------------------
// Parameter vectors

struct ParameterInfo {
  std::string name;
  bool log_scale = false;  ///< sampled as log of the constrained value
};

/// Which model is fitted and to which cylinders.
struct ModelSpec {
  Variant variant = Variant::kBaseline;
  std::vector<double> radii;  ///< ascending, one interference block per radius
  int harmonics = 3;          ///< refined location-shift truncation order

  /// Unconstrained coordinates, in order: alpha, beta, a, b, log x0,
  /// log sigma, then per-radius interference blocks.
  std::vector<ParameterInfo> parameters() const;
  Eigen::Index dimension() const;
  Eigen::Index refined_block_size() const { return 3 + 2 * harmonics; }
};

/// Formats a radius as used in parameter names ("0.5", "1", ...).
std::string radius_label(double r0);

enum BaselineIndex : Eigen::Index { kAlpha = 0, kBeta, kA, kB, kLogX0, kLogSigma, kBaselineCount };

/// Constrained parameters for any variant.
struct ModelParams {
  Variant variant = Variant::kBaseline;
  BaselineParams<> baseline;
  std::vector<double> radii;
  std::vector<double> lambda;                  ///< simple interference
  std::vector<RefinedRadiusParams> refined;    ///< refined interference

  SimpleInterferenceParams simple_view() const { return {baseline, radii, lambda}; }
  RefinedInterferenceParams refined_view() const { return {baseline, radii, refined}; }

  /// Throws DomainError on non-positive x0, sigma, or lambda.
  Eigen::VectorXd to_unconstrained(const ModelSpec& spec) const;
  static ModelParams from_unconstrained(const ModelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& u);
};

/// Independent priors: a ~ N(1, 2^2), b ~ N(1, 1), log x0 ~ N(0, 1),
/// log lambda ~ N(0, 4^2); flat on alpha, beta, log sigma and on location
/// shift coefficients. Returns -inf when a positive parameter is not.
double log_prior(const ModelParams& params);

/// The same density on the unconstrained vector, with optional gradient.
double log_prior(const ModelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& u,
                 Eigen::VectorXd* grad = nullptr);

/// Log posterior and gradient over a dataset in unconstrained coordinates.
///
/// Observations are grouped by cylinder and all per-unit geometry (section,
/// neighbor, offsets, level gaps, boundaries) is precomputed, so an
/// evaluation costs a few array passes over the data.
class LogPosterior {
 public:
  LogPosterior(const DeformationDataset& data, ModelSpec spec);

  const ModelSpec& spec() const { return spec_; }
  Eigen::Index dimension() const { return spec_.dimension(); }
  std::size_t size() const { return n_; }

  /// log p(u | data) up to the normalizing constant of the posterior.
  double operator()(const Eigen::Ref<const Eigen::VectorXd>& u, Eigen::VectorXd* grad = nullptr) const;

  double log_likelihood(const Eigen::Ref<const Eigen::VectorXd>& u) const;

  /// Mean deformation of every unit (dataset order) under u.
  Eigen::VectorXd mean(const Eigen::Ref<const Eigen::VectorXd>& u) const;

  /// Treatment each unit effectively receives under u (dataset order).
  Eigen::VectorXd effective_treatment(const Eigen::Ref<const Eigen::VectorXd>& u) const;

 private:
  struct Block {
    double r0 = 0.0;
    Eigen::Index radius_index = 0;
    std::vector<Eigen::Index> rows;
    Eigen::ArrayXd y, cos2, assigned;
    // Interference geometry.
    Eigen::ArrayXd x_own, x_neighbor, offset_own, offset_neighbor;
    Eigen::ArrayXi gap, boundary;
    Eigen::ArrayXd boundary_angle;  ///< one entry per section boundary
  };

  Eigen::ArrayXd treatment(const Block& blk, const Eigen::Ref<const Eigen::VectorXd>& u,
                           Eigen::ArrayXd* dg_dlog_lambda1, Eigen::ArrayXd* dg_dlog_lambda2,
                           Eigen::ArrayXd* dg_ddelta) const;
  double evaluate(const Eigen::Ref<const Eigen::VectorXd>& u, Eigen::VectorXd* grad,
                  Eigen::VectorXd* mean_out, Eigen::VectorXd* g_out) const;

  ModelSpec spec_;
  std::vector<Block> blocks_;
  std::size_t n_ = 0;
};

/// Convenience wrappers over LogPosterior for one-off evaluations.
double log_posterior(const ModelParams& params, const DeformationDataset& data, int harmonics = 3);
Eigen::VectorXd grad_log_posterior(const ModelParams& params, const DeformationDataset& data,
                                   int harmonics = 3);

/// Spec whose radii are the dataset's radii.
ModelSpec spec_for(const DeformationDataset& data, Variant variant, int harmonics = 3);

}  // namespace amcomp
