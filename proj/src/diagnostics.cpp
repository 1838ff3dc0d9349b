#include "amcomp/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "amcomp/convergence.hpp"

namespace amcomp {
namespace {

constexpr double kIllConditioned = 1e-6;

void check_level(double level) {
  if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("band level must lie in (0, 1)");
}

}  // namespace

std::vector<BaselineParams<>> baseline_draws(const PosteriorDraws& draws) {
  if (draws.dimension() < kBaselineCount) throw std::invalid_argument("draws lack baseline parameters");
  const Eigen::MatrixXd& v = draws.values;
  std::vector<BaselineParams<>> out;
  out.reserve(static_cast<std::size_t>(v.rows()));
  for (Eigen::Index i = 0; i < v.rows(); ++i) {
    out.push_back({v(i, kAlpha), v(i, kBeta), v(i, kA), v(i, kB), std::exp(v(i, kLogX0)), std::exp(v(i, kLogSigma))});
  }
  return out;
}

namespace {

/// Per-draw coefficients of the first-order mean at one radius, so that
/// mean = level + aniso c + (1 + h_iso + h_aniso c) g with c = cos(2 theta).
struct DrawTerms {
  std::vector<double> level, aniso, h_iso, h_aniso, sigma;

  DrawTerms(std::span<const BaselineParams<>> draws, double r0) {
    for (const auto& p : draws) {
      const double rho = detail::checked_base(p, r0, 0.0);
      const double A = p.alpha * std::pow(rho, p.a);
      const double B = p.beta * std::pow(rho, p.b);
      level.push_back(p.x0 + A);
      aniso.push_back(B);
      h_iso.push_back(p.a * A / rho);
      h_aniso.push_back(p.b * B / rho);
      sigma.push_back(p.sigma);
    }
  }

  std::size_t size() const { return level.size(); }
  double baseline(std::size_t i, double c) const { return level[i] + aniso[i] * c; }
  double slope(std::size_t i, double c) const { return 1.0 + h_iso[i] + h_aniso[i] * c; }
};

PredictiveBand band_from_terms(const DrawTerms& terms, Angle theta, double r0, double compensation, double level,
                               Philox& rng, std::vector<double>& sims) {
  const double c = std::cos(2.0 * theta.radians());
  sims.resize(terms.size());
  double mean = 0.0;
  std::pair<double, double> z;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const double mu = terms.baseline(i, c) + terms.slope(i, c) * compensation;
    mean += mu;
    if (i % 2 == 0) z = standard_normal_pair(rng);
    sims[i] = mu + terms.sigma[i] * (i % 2 == 0 ? z.first : z.second);
  }
  PredictiveBand band;
  band.theta = theta;
  band.r0 = r0;
  band.compensation = compensation;
  band.level = level;
  band.mean = mean / static_cast<double>(terms.size());
  band.lower = quantile(sims, 0.5 * (1.0 - level));
  band.upper = quantile(sims, 0.5 * (1.0 + level));
  return band;
}

}  // namespace

PredictiveBand predictive_band(std::span<const BaselineParams<>> draws, Angle theta, double r0, double compensation,
                               double level, Philox& rng) {
  if (draws.empty()) throw std::invalid_argument("no posterior draws");
  check_level(level);
  std::vector<double> sims;
  return band_from_terms(DrawTerms(draws, r0), theta, r0, compensation, level, rng, sims);
}

std::vector<PredictiveBand> predictive_bands(std::span<const BaselineParams<>> draws,
                                             const DeformationDataset& experiment, double level, std::uint64_t seed) {
  if (draws.empty()) throw std::invalid_argument("no posterior draws");
  check_level(level);
  std::map<double, DrawTerms> terms;
  for (double r : experiment.radii()) terms.emplace(r, DrawTerms(draws, r));
  std::vector<PredictiveBand> out;
  out.reserve(experiment.size());
  std::vector<double> sims;
  for (std::size_t i = 0; i < experiment.size(); ++i) {
    const auto& obs = experiment.observations[i];
    Philox rng(seed, i);
    out.push_back(band_from_terms(terms.at(obs.r0), obs.theta, obs.r0, obs.assigned_compensation, level, rng, sims));
  }
  return out;
}

std::vector<InterferenceVerdict> classify_interference(const DeformationDataset& experiment,
                                                       std::span<const PredictiveBand> bands) {
  if (bands.size() != experiment.size()) {
    throw std::invalid_argument("band grid has " + std::to_string(bands.size()) + " units, experiment has " +
                                std::to_string(experiment.size()));
  }
  std::vector<InterferenceVerdict> out;
  out.reserve(bands.size());
  for (std::size_t i = 0; i < bands.size(); ++i) {
    const auto& obs = experiment.observations[i];
    const auto& band = bands[i];
    if (!(band.theta == obs.theta) || band.r0 != obs.r0 || band.compensation != obs.assigned_compensation) {
      throw std::invalid_argument("band grid does not match experiment at unit " + std::to_string(i));
    }
    InterferenceVerdict v;
    if (obs.deformation > band.upper) {
      v = {InterferenceClass::kSubstantial, obs.deformation - band.upper};
    } else if (obs.deformation < band.lower) {
      v = {InterferenceClass::kSubstantial, obs.deformation - band.lower};
    }
    out.push_back(v);
  }
  return out;
}

double negligible_fraction(std::span<const InterferenceVerdict> verdicts) {
  if (verdicts.empty()) return std::numeric_limits<double>::quiet_NaN();
  const auto n = std::ranges::count_if(verdicts, [](const auto& v) { return v.verdict == InterferenceClass::kNegligible; });
  return static_cast<double>(n) / static_cast<double>(verdicts.size());
}

InferredTreatment infer_effective_treatment(const Observation& obs, const BaselineParams<>& params) {
  const double theta = obs.theta.radians();
  const double denom = 1.0 + sensitivity(params, theta, obs.r0);
  if (std::abs(denom) < kIllConditioned) return {std::numeric_limits<double>::quiet_NaN(), true};
  return {(obs.deformation - baseline_mean(params, theta, obs.r0)) / denom, false};
}

std::optional<double> infer_weight(double effective, double x_own, double x_neighbor) {
  if (x_own == x_neighbor) return std::nullopt;
  return (effective - x_neighbor) / (x_own - x_neighbor);
}

std::vector<EffectiveTreatmentEstimate> estimate_effective_treatments(const DeformationDataset& data,
                                                                      std::span<const BaselineParams<>> draws,
                                                                      double interval) {
  if (draws.empty()) throw std::invalid_argument("no posterior draws");
  check_level(interval);
  std::vector<EffectiveTreatmentEstimate> out;
  out.reserve(data.size());
  std::map<double, DrawTerms> terms;
  for (double r : data.radii()) terms.emplace(r, DrawTerms(draws, r));
  std::vector<double> values;
  values.reserve(draws.size());
  for (const auto& obs : data.observations) {
    const DrawTerms& t = terms.at(obs.r0);
    const double c = std::cos(2.0 * obs.theta.radians());
    EffectiveTreatmentEstimate est;
    est.theta = obs.theta;
    est.r0 = obs.r0;
    est.assigned = obs.assigned_compensation;
    est.x_own = obs.assigned_compensation;
    est.x_neighbor = obs.assigned_compensation;
    if (const auto it = data.designs.find(obs.r0); it != data.designs.end()) {
      const auto geo = neighbor_geometry(it->second.layout, obs.theta);
      est.x_own = it->second.compensation(geo.section);
      est.x_neighbor = it->second.compensation(geo.neighbor);
    }
    values.clear();
    for (std::size_t k = 0; k < t.size(); ++k) {
      const double denom = t.slope(k, c);
      if (std::abs(denom) < kIllConditioned) {
        ++est.ill_conditioned_draws;
        continue;
      }
      values.push_back((obs.deformation - t.baseline(k, c)) / denom);
    }
    if (values.empty()) {
      est.mean = est.lower = est.upper = std::numeric_limits<double>::quiet_NaN();
    } else {
      double sum = 0.0;
      for (double v : values) sum += v;
      est.mean = sum / static_cast<double>(values.size());
      est.lower = quantile(values, 0.5 * (1.0 - interval));
      est.upper = quantile(values, 0.5 * (1.0 + interval));
      est.weight = infer_weight(est.mean, est.x_own, est.x_neighbor);
    }
    out.push_back(est);
  }
  return out;
}

Eigen::VectorXd residuals(const DeformationDataset& data, const PosteriorDraws& draws, Variant variant,
                          int harmonics) {
  if (draws.values.rows() == 0) throw std::invalid_argument("no posterior draws");
  const LogPosterior model(data, spec_for(data, variant, harmonics));
  if (model.dimension() != draws.dimension()) {
    throw std::invalid_argument("draws do not match the model's parameter count");
  }
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(data.size()));
  for (Eigen::Index i = 0; i < draws.values.rows(); ++i) mean += model.mean(draws.values.row(i).transpose());
  mean /= static_cast<double>(draws.values.rows());
  Eigen::VectorXd y(mean.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) y[i] = data.observations[static_cast<std::size_t>(i)].deformation;
  return y - mean;
}

}  // namespace amcomp
