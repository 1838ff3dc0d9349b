#include "amcomp/model.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <numbers>

namespace amcomp {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
const double kLogSqrtTwoPi = 0.5 * std::log(2.0 * std::numbers::pi);

// log N(x | mean, sd^2)
double normal_log_density(double x, double mean, double sd) {
  const double z = (x - mean) / sd;
  return -0.5 * z * z - std::log(sd) - kLogSqrtTwoPi;
}

constexpr double kSdA = 2.0;
constexpr double kSdB = 1.0;
constexpr double kSdLogX0 = 1.0;
constexpr double kSdLogLambda = 4.0;

std::size_t radius_index(const std::vector<double>& radii, double r0) {
  const auto it = std::ranges::find(radii, r0);
  if (it == radii.end()) {
    throw std::out_of_range("no parameters for radius " + radius_label(r0));
  }
  return static_cast<std::size_t>(it - radii.begin());
}

double sign(double x) { return (x > 0.0) - (x < 0.0); }

}  // namespace

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::kBaseline: return "baseline";
    case Variant::kNoInterference: return "no-interference";
    case Variant::kSimpleInterference: return "simple-interference";
    case Variant::kRefinedInterference: return "refined-interference";
  }
  return "unknown";
}

Variant parse_variant(std::string_view name) {
  for (Variant v : {Variant::kBaseline, Variant::kNoInterference, Variant::kSimpleInterference,
                    Variant::kRefinedInterference}) {
    if (to_string(v) == name) return v;
  }
  throw std::invalid_argument("unknown model variant '" + std::string(name) + "'");
}

std::string radius_label(double r0) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", r0);
  return buf;
}

// ---------------------------------------------------------------------------
// Effective treatment

NeighborGeometry neighbor_geometry(const SectionLayout& layout, Angle theta) {
  NeighborGeometry geo;
  geo.section = layout.section_of(theta);
  geo.neighbor = layout.nearest_neighbor_section(theta);
  const Angle own_mid = layout.midpoint(geo.section);
  const Angle nb_mid = layout.midpoint(geo.neighbor);
  geo.offset_own = signed_offset(theta, own_mid);
  geo.offset_neighbor = signed_offset(theta, nb_mid);
  geo.boundary = arc_midpoint(own_mid, nb_mid);
  return geo;
}

double effective_treatment(double lambda, Angle theta, const SectionLayout& layout,
                           std::span<const double> section_compensation) {
  if (section_compensation.size() != layout.section_count()) {
    throw std::invalid_argument("plan size does not match layout");
  }
  const auto geo = neighbor_geometry(layout, theta);
  const double w =
      interference_weight(lambda, std::abs(geo.offset_own), std::abs(geo.offset_neighbor));
  return w * section_compensation[geo.section] + (1.0 - w) * section_compensation[geo.neighbor];
}

double SimpleInterferenceParams::lambda_for(double r0) const { return lambda.at(radius_index(radii, r0)); }

double RefinedRadiusParams::location_shift(Angle boundary) const {
  double shift = delta0;
  const double tb = boundary.radians();
  for (std::size_t k = 0; k < delta_cos.size(); ++k) {
    shift += delta_cos[k] * std::cos(static_cast<double>(k + 1) * tb);
  }
  for (std::size_t k = 0; k < delta_sin.size(); ++k) {
    shift += delta_sin[k] * std::sin(static_cast<double>(k + 1) * tb);
  }
  return shift;
}

double RefinedRadiusParams::decay_for_gap(int level_gap) const {
  if (level_gap == 1) return lambda1;
  if (level_gap == 2) return lambda2;
  throw DomainError("refined decay is defined only for neighbor level gaps of 1 or 2, got " +
                    std::to_string(level_gap));
}

const RefinedRadiusParams& RefinedInterferenceParams::for_radius(double r0) const {
  return per_radius.at(radius_index(radii, r0));
}

double effective_treatment_simple(const SimpleInterferenceParams& p, Angle theta,
                                  const CompensationDesign& design) {
  std::vector<double> plan(design.layout.section_count());
  for (std::size_t s = 0; s < plan.size(); ++s) plan[s] = design.compensation(s);
  return effective_treatment(p.lambda_for(design.nominal_radius), theta, design.layout, plan);
}

double effective_treatment_refined(const RefinedRadiusParams& p, Angle theta,
                                   const CompensationDesign& design) {
  const auto geo = neighbor_geometry(design.layout, theta);
  const int gap = std::abs(design.level(geo.section) - design.level(geo.neighbor));
  const double lambda = p.decay_for_gap(gap);
  const double shift = p.location_shift(geo.boundary);
  const double w = interference_weight(lambda, std::abs(geo.offset_own - shift),
                                       std::abs(geo.offset_neighbor - shift));
  return w * design.compensation(geo.section) + (1.0 - w) * design.compensation(geo.neighbor);
}

// ---------------------------------------------------------------------------
// Parameters

std::vector<ParameterInfo> ModelSpec::parameters() const {
  std::vector<ParameterInfo> out{{"alpha", false}, {"beta", false}, {"a", false},
                                 {"b", false},     {"x0", true},    {"sigma", true}};
  for (double r : radii) {
    const std::string tag = "[" + radius_label(r) + "]";
    if (variant == Variant::kSimpleInterference) {
      out.push_back({"lambda" + tag, true});
    } else if (variant == Variant::kRefinedInterference) {
      out.push_back({"lambda1" + tag, true});
      out.push_back({"lambda2" + tag, true});
      out.push_back({"delta0" + tag, false});
      for (int k = 1; k <= harmonics; ++k) out.push_back({"delta_c" + std::to_string(k) + tag, false});
      for (int k = 1; k <= harmonics; ++k) out.push_back({"delta_s" + std::to_string(k) + tag, false});
    }
  }
  return out;
}

Eigen::Index ModelSpec::dimension() const {
  const auto r = static_cast<Eigen::Index>(radii.size());
  switch (variant) {
    case Variant::kSimpleInterference: return kBaselineCount + r;
    case Variant::kRefinedInterference: return kBaselineCount + r * refined_block_size();
    default: return kBaselineCount;
  }
}

Eigen::VectorXd ModelParams::to_unconstrained(const ModelSpec& spec) const {
  auto positive_log = [](double v, const char* what) {
    if (!(v > 0.0)) throw DomainError(std::string(what) + " must be positive");
    return std::log(v);
  };
  Eigen::VectorXd u(spec.dimension());
  u[kAlpha] = baseline.alpha;
  u[kBeta] = baseline.beta;
  u[kA] = baseline.a;
  u[kB] = baseline.b;
  u[kLogX0] = positive_log(baseline.x0, "x0");
  u[kLogSigma] = positive_log(baseline.sigma, "sigma");
  const auto nr = spec.radii.size();
  if (spec.variant == Variant::kSimpleInterference) {
    if (lambda.size() != nr) throw std::invalid_argument("expected one lambda per radius");
    for (std::size_t i = 0; i < nr; ++i) {
      u[kBaselineCount + static_cast<Eigen::Index>(i)] = positive_log(lambda[i], "lambda");
    }
  } else if (spec.variant == Variant::kRefinedInterference) {
    if (refined.size() != nr) throw std::invalid_argument("expected one refined block per radius");
    const Eigen::Index bs = spec.refined_block_size();
    for (std::size_t i = 0; i < nr; ++i) {
      const auto& rp = refined[i];
      if (rp.delta_cos.size() != static_cast<std::size_t>(spec.harmonics) ||
          rp.delta_sin.size() != static_cast<std::size_t>(spec.harmonics)) {
        throw std::invalid_argument("location shift harmonics do not match the model spec");
      }
      const Eigen::Index o = kBaselineCount + static_cast<Eigen::Index>(i) * bs;
      u[o] = positive_log(rp.lambda1, "lambda1");
      u[o + 1] = positive_log(rp.lambda2, "lambda2");
      u[o + 2] = rp.delta0;
      for (int k = 0; k < spec.harmonics; ++k) {
        u[o + 3 + k] = rp.delta_cos[static_cast<std::size_t>(k)];
        u[o + 3 + spec.harmonics + k] = rp.delta_sin[static_cast<std::size_t>(k)];
      }
    }
  }
  return u;
}

ModelParams ModelParams::from_unconstrained(const ModelSpec& spec,
                                            const Eigen::Ref<const Eigen::VectorXd>& u) {
  if (u.size() != spec.dimension()) throw std::invalid_argument("parameter vector has wrong dimension");
  ModelParams p;
  p.variant = spec.variant;
  p.radii = spec.radii;
  p.baseline = {u[kAlpha], u[kBeta], u[kA], u[kB], std::exp(u[kLogX0]), std::exp(u[kLogSigma])};
  const auto nr = spec.radii.size();
  if (spec.variant == Variant::kSimpleInterference) {
    for (std::size_t i = 0; i < nr; ++i) {
      p.lambda.push_back(std::exp(u[kBaselineCount + static_cast<Eigen::Index>(i)]));
    }
  } else if (spec.variant == Variant::kRefinedInterference) {
    const Eigen::Index bs = spec.refined_block_size();
    for (std::size_t i = 0; i < nr; ++i) {
      const Eigen::Index o = kBaselineCount + static_cast<Eigen::Index>(i) * bs;
      RefinedRadiusParams rp;
      rp.lambda1 = std::exp(u[o]);
      rp.lambda2 = std::exp(u[o + 1]);
      rp.delta0 = u[o + 2];
      for (int k = 0; k < spec.harmonics; ++k) {
        rp.delta_cos.push_back(u[o + 3 + k]);
        rp.delta_sin.push_back(u[o + 3 + spec.harmonics + k]);
      }
      p.refined.push_back(std::move(rp));
    }
  }
  return p;
}

// ---------------------------------------------------------------------------
// Priors

double log_prior(const ModelParams& params) {
  const auto& bp = params.baseline;
  if (!(bp.x0 > 0.0) || !(bp.sigma > 0.0)) return kNegInf;
  double lp = normal_log_density(bp.a, 1.0, kSdA) + normal_log_density(bp.b, 1.0, kSdB) +
              normal_log_density(std::log(bp.x0), 0.0, kSdLogX0);
  if (params.variant == Variant::kSimpleInterference) {
    for (double l : params.lambda) {
      if (!(l > 0.0)) return kNegInf;
      lp += normal_log_density(std::log(l), 0.0, kSdLogLambda);
    }
  } else if (params.variant == Variant::kRefinedInterference) {
    for (const auto& rp : params.refined) {
      if (!(rp.lambda1 > 0.0) || !(rp.lambda2 > 0.0)) return kNegInf;
      lp += normal_log_density(std::log(rp.lambda1), 0.0, kSdLogLambda) +
            normal_log_density(std::log(rp.lambda2), 0.0, kSdLogLambda);
    }
  }
  return lp;
}

double log_prior(const ModelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& u, Eigen::VectorXd* grad) {
  if (grad) grad->setZero(spec.dimension());
  auto term = [&](Eigen::Index i, double mean, double sd) {
    if (grad) (*grad)[i] += -(u[i] - mean) / (sd * sd);
    return normal_log_density(u[i], mean, sd);
  };
  double lp = term(kA, 1.0, kSdA) + term(kB, 1.0, kSdB) + term(kLogX0, 0.0, kSdLogX0);
  const auto nr = static_cast<Eigen::Index>(spec.radii.size());
  if (spec.variant == Variant::kSimpleInterference) {
    for (Eigen::Index i = 0; i < nr; ++i) lp += term(kBaselineCount + i, 0.0, kSdLogLambda);
  } else if (spec.variant == Variant::kRefinedInterference) {
    for (Eigen::Index i = 0; i < nr; ++i) {
      const Eigen::Index o = kBaselineCount + i * spec.refined_block_size();
      lp += term(o, 0.0, kSdLogLambda) + term(o + 1, 0.0, kSdLogLambda);
    }
  }
  return lp;
}

// ---------------------------------------------------------------------------
// Log posterior

ModelSpec spec_for(const DeformationDataset& data, Variant variant, int harmonics) {
  return ModelSpec{variant, data.radii(), harmonics};
}

LogPosterior::LogPosterior(const DeformationDataset& data, ModelSpec spec) : spec_(std::move(spec)) {
  if (data.empty()) throw std::invalid_argument("dataset is empty");
  const bool interference = spec_.variant == Variant::kSimpleInterference ||
                            spec_.variant == Variant::kRefinedInterference;
  blocks_.resize(spec_.radii.size());
  for (std::size_t i = 0; i < spec_.radii.size(); ++i) {
    blocks_[i].r0 = spec_.radii[i];
    blocks_[i].radius_index = static_cast<Eigen::Index>(i);
  }
  for (std::size_t row = 0; row < data.observations.size(); ++row) {
    const auto& obs = data.observations[row];
    if (!(obs.r0 > 0.0)) throw std::invalid_argument("observation radius must be positive");
    blocks_[radius_index(spec_.radii, obs.r0)].rows.push_back(static_cast<Eigen::Index>(row));
  }
  n_ = data.observations.size();

  for (auto& blk : blocks_) {
    const auto n = static_cast<Eigen::Index>(blk.rows.size());
    blk.y.resize(n);
    blk.cos2.resize(n);
    blk.assigned.resize(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto& obs = data.observations[static_cast<std::size_t>(blk.rows[static_cast<std::size_t>(j)])];
      blk.y[j] = obs.deformation;
      blk.cos2[j] = std::cos(2.0 * obs.theta.radians());
      blk.assigned[j] = obs.assigned_compensation;
    }
    if (!interference || n == 0) continue;

    const CompensationDesign& design = data.design_for(blk.r0);
    const auto& layout = design.layout;
    blk.x_own.resize(n);
    blk.x_neighbor.resize(n);
    blk.offset_own.resize(n);
    blk.offset_neighbor.resize(n);
    blk.gap.resize(n);
    blk.boundary.resize(n);
    const auto ns = static_cast<Eigen::Index>(layout.section_count());
    blk.boundary_angle.resize(ns);
    for (Eigen::Index s = 0; s < ns; ++s) blk.boundary_angle[s] = static_cast<double>(s) * layout.section_width();
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto& obs = data.observations[static_cast<std::size_t>(blk.rows[static_cast<std::size_t>(j)])];
      const auto geo = neighbor_geometry(layout, obs.theta);
      blk.x_own[j] = design.compensation(geo.section);
      blk.x_neighbor[j] = design.compensation(geo.neighbor);
      blk.offset_own[j] = geo.offset_own;
      blk.offset_neighbor[j] = geo.offset_neighbor;
      blk.gap[j] = std::abs(design.level(geo.section) - design.level(geo.neighbor));
      // Boundary between sections s-1 and s sits at s * width.
      const std::size_t upper = layout.next(geo.section) == geo.neighbor ? geo.neighbor : geo.section;
      blk.boundary[j] = static_cast<int>(upper);
      if (spec_.variant == Variant::kRefinedInterference && blk.gap[j] != 1 && blk.gap[j] != 2) {
        throw DomainError("refined decay is undefined for neighbor level gap " + std::to_string(blk.gap[j]) +
                          " (radius " + radius_label(blk.r0) + ")");
      }
    }
  }
}

Eigen::ArrayXd LogPosterior::treatment(const Block& blk, const Eigen::Ref<const Eigen::VectorXd>& u,
                                       Eigen::ArrayXd* dg_dl1, Eigen::ArrayXd* dg_dl2,
                                       Eigen::ArrayXd* dg_ddelta) const {
  const Eigen::Index n = blk.y.size();
  switch (spec_.variant) {
    case Variant::kBaseline:
      return Eigen::ArrayXd::Zero(n);
    case Variant::kNoInterference:
      return blk.assigned;
    case Variant::kSimpleInterference: {
      const double lambda = std::exp(u[kBaselineCount + blk.radius_index]);
      const Eigen::ArrayXd diff = blk.offset_neighbor.abs() - blk.offset_own.abs();
      const Eigen::ArrayXd w = 1.0 / (1.0 + (-lambda * diff).exp());
      const Eigen::ArrayXd span = blk.x_own - blk.x_neighbor;
      if (dg_dl1) *dg_dl1 = lambda * span * w * (1.0 - w) * diff;
      return blk.x_neighbor + w * span;
    }
    case Variant::kRefinedInterference: {
      const Eigen::Index o = kBaselineCount + blk.radius_index * spec_.refined_block_size();
      const int K = spec_.harmonics;
      const double lambda1 = std::exp(u[o]);
      const double lambda2 = std::exp(u[o + 1]);
      Eigen::ArrayXd shift = Eigen::ArrayXd::Constant(blk.boundary_angle.size(), u[o + 2]);
      for (int k = 1; k <= K; ++k) {
        shift += u[o + 2 + k] * (static_cast<double>(k) * blk.boundary_angle).cos() + u[o + 2 + K + k] * (static_cast<double>(k) * blk.boundary_angle).sin();
      }
      Eigen::ArrayXd delta(n), lambda(n);
      for (Eigen::Index j = 0; j < n; ++j) {
        delta[j] = shift[blk.boundary[j]];
        lambda[j] = blk.gap[j] == 1 ? lambda1 : lambda2;
      }
      const Eigen::ArrayXd own = blk.offset_own - delta;
      const Eigen::ArrayXd nb = blk.offset_neighbor - delta;
      const Eigen::ArrayXd diff = nb.abs() - own.abs();
      const Eigen::ArrayXd w = 1.0 / (1.0 + (-lambda * diff).exp());
      const Eigen::ArrayXd span = blk.x_own - blk.x_neighbor;
      const Eigen::ArrayXd slope = span * w * (1.0 - w);
      if (dg_dl1 || dg_dl2) {
        const Eigen::ArrayXd dl = lambda * slope * diff;
        if (dg_dl1) *dg_dl1 = (blk.gap == 1).select(dl, 0.0);
        if (dg_dl2) *dg_dl2 = (blk.gap == 2).select(dl, 0.0);
      }
      if (dg_ddelta) {
        *dg_ddelta = lambda * slope * (own.unaryExpr(&sign) - nb.unaryExpr(&sign));
      }
      return blk.x_neighbor + w * span;
    }
  }
  return Eigen::ArrayXd::Zero(n);
}

double LogPosterior::evaluate(const Eigen::Ref<const Eigen::VectorXd>& u, Eigen::VectorXd* grad,
                              Eigen::VectorXd* mean_out, Eigen::VectorXd* g_out) const {
  if (u.size() != dimension()) throw std::invalid_argument("parameter vector has wrong dimension");
  const double alpha = u[kAlpha], beta = u[kBeta], a = u[kA], b = u[kB];
  const double x0 = std::exp(u[kLogX0]);
  const double sigma = std::exp(u[kLogSigma]);
  const double inv_var = 1.0 / (sigma * sigma);
  const bool want_grad = grad != nullptr;
  if (want_grad) grad->setZero(dimension());
  if (mean_out) mean_out->resize(static_cast<Eigen::Index>(n_));
  if (g_out) g_out->resize(static_cast<Eigen::Index>(n_));

  double ssr = 0.0;
  Eigen::ArrayXd dl1, dl2, dd;
  for (const auto& blk : blocks_) {
    if (blk.y.size() == 0) continue;
    const double rho = blk.r0 + x0;
    const double log_rho = std::log(rho);
    const double pa = std::exp(a * log_rho);
    const double pb = std::exp(b * log_rho);
    const double h0 = a * alpha * pa / rho;
    const double h1 = b * beta * pb / rho;

    const bool interference = spec_.variant == Variant::kSimpleInterference ||
                              spec_.variant == Variant::kRefinedInterference;
    const Eigen::ArrayXd g = treatment(blk, u, want_grad && interference ? &dl1 : nullptr,
                                       want_grad && spec_.variant == Variant::kRefinedInterference ? &dl2 : nullptr,
                                       want_grad && spec_.variant == Variant::kRefinedInterference ? &dd : nullptr);
    const Eigen::ArrayXd one_plus_h = 1.0 + h0 + h1 * blk.cos2;
    const Eigen::ArrayXd mu = x0 + alpha * pa + beta * pb * blk.cos2 + one_plus_h * g;
    if (mean_out || g_out) {
      for (std::size_t j = 0; j < blk.rows.size(); ++j) {
        if (mean_out) (*mean_out)[blk.rows[j]] = mu[static_cast<Eigen::Index>(j)];
        if (g_out) (*g_out)[blk.rows[j]] = g[static_cast<Eigen::Index>(j)];
      }
    }
    const Eigen::ArrayXd r = blk.y - mu;
    ssr += r.square().sum();
    if (!want_grad) continue;

    const double s_r = r.sum();
    const double s_rc = (r * blk.cos2).sum();
    const double s_rg = (r * g).sum();
    const double s_rcg = (r * blk.cos2 * g).sum();
    auto& gr = *grad;
    gr[kAlpha] += inv_var * (pa * s_r + a * pa / rho * s_rg);
    gr[kBeta] += inv_var * (pb * s_rc + b * pb / rho * s_rcg);
    gr[kA] += inv_var * (alpha * pa * log_rho * s_r + alpha * pa / rho * (1.0 + a * log_rho) * s_rg);
    gr[kB] += inv_var * (beta * pb * log_rho * s_rc + beta * pb / rho * (1.0 + b * log_rho) * s_rcg);
    const double dh0 = a * alpha * (a - 1.0) * pa / (rho * rho);
    const double dh1 = b * beta * (b - 1.0) * pb / (rho * rho);
    gr[kLogX0] += inv_var * x0 * ((1.0 + h0) * s_r + h1 * s_rc + dh0 * s_rg + dh1 * s_rcg);

    if (!interference) continue;
    const Eigen::ArrayXd rh = r * one_plus_h * inv_var;
    if (spec_.variant == Variant::kSimpleInterference) {
      gr[kBaselineCount + blk.radius_index] += (rh * dl1).sum();
    } else {
      const Eigen::Index o = kBaselineCount + blk.radius_index * spec_.refined_block_size();
      gr[o] += (rh * dl1).sum();
      gr[o + 1] += (rh * dl2).sum();
      Eigen::ArrayXd per_boundary = Eigen::ArrayXd::Zero(blk.boundary_angle.size());
      const Eigen::ArrayXd t = rh * dd;
      for (Eigen::Index j = 0; j < t.size(); ++j) per_boundary[blk.boundary[j]] += t[j];
      gr[o + 2] += per_boundary.sum();
      const int K = spec_.harmonics;
      for (int k = 1; k <= K; ++k) {
        gr[o + 2 + k] += (per_boundary * (static_cast<double>(k) * blk.boundary_angle).cos()).sum();
        gr[o + 2 + K + k] += (per_boundary * (static_cast<double>(k) * blk.boundary_angle).sin()).sum();
      }
    }
  }

  const auto n = static_cast<double>(n_);
  const double loglik = -n * (std::log(sigma) + kLogSqrtTwoPi) - 0.5 * ssr * inv_var;
  if (want_grad) {
    (*grad)[kLogSigma] += -n + ssr * inv_var;
    Eigen::VectorXd prior_grad;
    const double lp = log_prior(spec_, u, &prior_grad);
    *grad += prior_grad;
    return loglik + lp;
  }
  return loglik + log_prior(spec_, u);
}

double LogPosterior::operator()(const Eigen::Ref<const Eigen::VectorXd>& u, Eigen::VectorXd* grad) const {
  return evaluate(u, grad, nullptr, nullptr);
}

double LogPosterior::log_likelihood(const Eigen::Ref<const Eigen::VectorXd>& u) const {
  return evaluate(u, nullptr, nullptr, nullptr) - log_prior(spec_, u);
}

Eigen::VectorXd LogPosterior::mean(const Eigen::Ref<const Eigen::VectorXd>& u) const {
  Eigen::VectorXd out;
  evaluate(u, nullptr, &out, nullptr);
  return out;
}

Eigen::VectorXd LogPosterior::effective_treatment(const Eigen::Ref<const Eigen::VectorXd>& u) const {
  Eigen::VectorXd out;
  evaluate(u, nullptr, nullptr, &out);
  return out;
}

double log_posterior(const ModelParams& params, const DeformationDataset& data, int harmonics) {
  if (log_prior(params) == kNegInf) return kNegInf;
  const auto spec = spec_for(data, params.variant, harmonics);
  const LogPosterior lp(data, spec);
  return lp(params.to_unconstrained(spec));
}

Eigen::VectorXd grad_log_posterior(const ModelParams& params, const DeformationDataset& data, int harmonics) {
  const auto spec = spec_for(data, params.variant, harmonics);
  const LogPosterior lp(data, spec);
  Eigen::VectorXd grad;
  lp(params.to_unconstrained(spec), &grad);
  return grad;
}

}  // namespace amcomp
