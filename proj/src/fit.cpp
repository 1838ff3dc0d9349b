#include "amcomp/fit.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <map>

#include "amcomp/random.hpp"

namespace amcomp {
namespace {

/// Per-cylinder moments of g, c = cos(2 theta) and z = y - g, enough to
/// evaluate the alpha/beta least-squares fit for any (x0, a, b) in O(1).
struct Moments {
  double r0 = 0.0;
  double n = 0, g = 0, gg = 0, c = 0, cg = 0, cgg = 0, cc = 0, ccg = 0, ccgg = 0;
  double z = 0, zz = 0, zg = 0, zc = 0, zcg = 0;
};

struct Profile {
  double rss = std::numeric_limits<double>::infinity();
  double alpha = 0.0, beta = 0.0;
};

Profile profile(const std::vector<Moments>& moments, double x0, double a, double b) {
  double s00 = 0, s01 = 0, s11 = 0, s0y = 0, s1y = 0, syy = 0;
  for (const auto& m : moments) {
    const double rho = m.r0 + x0;
    const double A = std::pow(rho, a), Ad = A * a / rho;
    const double B = std::pow(rho, b), Bd = B * b / rho;
    s00 += A * A * m.n + 2 * A * Ad * m.g + Ad * Ad * m.gg;
    s11 += B * B * m.cc + 2 * B * Bd * m.ccg + Bd * Bd * m.ccgg;
    s01 += A * B * m.c + (A * Bd + Ad * B) * m.cg + Ad * Bd * m.cgg;
    s0y += A * m.z + Ad * m.zg - x0 * (A * m.n + Ad * m.g);
    s1y += B * m.zc + Bd * m.zcg - x0 * (B * m.c + Bd * m.cg);
    syy += m.zz - 2 * x0 * m.z + x0 * x0 * m.n;
  }
  const double det = s00 * s11 - s01 * s01;
  Profile p;
  if (!(std::abs(det) > 1e-300)) return p;
  p.alpha = (s11 * s0y - s01 * s1y) / det;
  p.beta = (s00 * s1y - s01 * s0y) / det;
  p.rss = std::max(syy - p.alpha * s0y - p.beta * s1y, 0.0);
  return p;
}

}  // namespace

Eigen::VectorXd initial_estimate(const DeformationDataset& data, const ModelSpec& spec) {
  constexpr double kInitialDecay = 50.0;
  ModelParams p;
  p.variant = spec.variant;
  p.radii = spec.radii;
  p.baseline = {0.0, 0.0, 1.0, 1.0, 1.0, 1.0};
  if (spec.variant == Variant::kSimpleInterference) p.lambda.assign(spec.radii.size(), kInitialDecay);
  if (spec.variant == Variant::kRefinedInterference) {
    RefinedRadiusParams rp;
    rp.lambda1 = rp.lambda2 = kInitialDecay;
    rp.delta_cos.assign(static_cast<std::size_t>(spec.harmonics), 0.0);
    rp.delta_sin.assign(static_cast<std::size_t>(spec.harmonics), 0.0);
    p.refined.assign(spec.radii.size(), rp);
  }
  Eigen::VectorXd u = p.to_unconstrained(spec);

  const LogPosterior model(data, spec);
  const Eigen::VectorXd g = model.effective_treatment(u);
  std::map<double, Moments> by_radius;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& obs = data.observations[i];
    auto& m = by_radius[obs.r0];
    m.r0 = obs.r0;
    const double gi = g[static_cast<Eigen::Index>(i)];
    const double c = std::cos(2.0 * obs.theta.radians());
    const double z = obs.deformation - gi;
    m.n += 1;
    m.g += gi;
    m.gg += gi * gi;
    m.c += c;
    m.cg += c * gi;
    m.cgg += c * gi * gi;
    m.cc += c * c;
    m.ccg += c * c * gi;
    m.ccgg += c * c * gi * gi;
    m.z += z;
    m.zz += z * z;
    m.zg += z * gi;
    m.zc += z * c;
    m.zcg += z * c * gi;
  }
  std::vector<Moments> moments;
  for (const auto& [r, m] : by_radius) moments.push_back(m);

  // Profile posterior over (log x0, a, b) with alpha, beta at least squares
  // and sigma^2 at RSS / n.
  const double n = static_cast<double>(data.size());
  double best = -std::numeric_limits<double>::infinity();
  std::array<double, 5> arg{};
  for (double lx = -10.0; lx <= 1.0 + 1e-9; lx += 0.1) {
    const double x0 = std::exp(lx);
    for (double a = -1.0; a <= 3.0 + 1e-9; a += 0.05) {
      for (double b = -1.0; b <= 3.0 + 1e-9; b += 0.05) {
        const Profile pr = profile(moments, x0, a, b);
        if (!(pr.rss > 0.0) || !std::isfinite(pr.rss)) continue;
        const double score = -0.5 * n * std::log(pr.rss / n) - 0.5 * lx * lx - 0.125 * (a - 1) * (a - 1) -
                             0.5 * (b - 1) * (b - 1);
        if (score > best) {
          best = score;
          arg = {lx, a, b, pr.alpha, pr.beta};
        }
      }
    }
  }
  if (std::isfinite(best)) {
    const Profile pr = profile(moments, std::exp(arg[0]), arg[1], arg[2]);
    u[kLogX0] = arg[0];
    u[kA] = arg[1];
    u[kB] = arg[2];
    u[kAlpha] = arg[3];
    u[kBeta] = arg[4];
    u[kLogSigma] = 0.5 * std::log(std::max(pr.rss / std::max(n, 1.0), 1e-24));
  }
  return u;
}

FitResult fit(const LogPosterior& posterior, const Eigen::VectorXd& start, const ChainConfig& config) {
  config.validate();
  const LogDensity target = [&posterior](const Eigen::Ref<const Eigen::VectorXd>& u, Eigen::VectorXd* grad) {
    return posterior(u, grad);
  };
  FitResult out;
  out.laplace = find_mode(target, start);
  Philox rng(derive_seed(config.seed, 0x696e6974ull), 0);
  std::vector<Eigen::VectorXd> inits;
  const Eigen::Index d = start.size();
  for (std::size_t c = 0; c < config.n_chains; ++c) {
    Eigen::VectorXd z(d);
    for (Eigen::Index i = 0; i < d; ++i) z[i] = standard_normal(rng);
    inits.push_back(out.laplace.mode + 2.0 * (out.laplace.chol * z));
  }
  out.draws = run_chains(config, target, inits, posterior.spec().parameters(), out.laplace.chol);
  return out;
}

FitResult fit(const DeformationDataset& data, const ModelSpec& spec, const ChainConfig& config) {
  const LogPosterior posterior(data, spec);
  return fit(posterior, initial_estimate(data, spec), config);
}

}  // namespace amcomp
