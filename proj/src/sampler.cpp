#include "amcomp/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

#include "amcomp/random.hpp"

namespace amcomp {
namespace {

bool finite_vector(const Eigen::VectorXd& v) { return v.allFinite(); }

// Target in whitened coordinates z, x = L z.
class WhitenedTarget {
 public:
  WhitenedTarget(const LogDensity& target, const Eigen::MatrixXd& chol, Eigen::Index dim)
      : target_(target), identity_(chol.size() == 0), chol_(chol) {
    if (!identity_ && (chol.rows() != dim || chol.cols() != dim)) {
      throw std::invalid_argument("metric factor has wrong shape");
    }
  }

  Eigen::VectorXd to_x(const Eigen::VectorXd& z) const {
    if (identity_) return z;
    return chol_.triangularView<Eigen::Lower>() * z;
  }

  Eigen::VectorXd to_z(const Eigen::VectorXd& x) const {
    if (identity_) return x;
    return chol_.triangularView<Eigen::Lower>().solve(x);
  }

  double operator()(const Eigen::VectorXd& z, Eigen::VectorXd* grad_z) const {
    if (!grad_z) return target_(to_x(z), nullptr);
    Eigen::VectorXd grad_x;
    const double lp = target_(to_x(z), &grad_x);
    *grad_z = identity_ ? grad_x : Eigen::VectorXd(chol_.transpose() * grad_x);
    return lp;
  }

 private:
  const LogDensity& target_;
  bool identity_;
  Eigen::MatrixXd chol_;
};

// Step-size adaptation from Hoffman & Gelman (2014), section 3.2.1.
class DualAveraging {
 public:
  DualAveraging(double initial_step, double target) : mu_(std::log(10.0 * initial_step)), target_(target) {}

  double update(double accept_prob) {
    ++t_;
    const double t = static_cast<double>(t_);
    h_bar_ = (1.0 - 1.0 / (t + kT0)) * h_bar_ + (target_ - accept_prob) / (t + kT0);
    const double log_step = mu_ - std::sqrt(t) / kGamma * h_bar_;
    const double eta = std::pow(t, -kKappa);
    log_step_bar_ = eta * log_step + (1.0 - eta) * log_step_bar_;
    return std::exp(log_step);
  }

  double final_step() const { return std::exp(log_step_bar_); }

 private:
  static constexpr double kGamma = 0.05;
  static constexpr double kT0 = 10.0;
  static constexpr double kKappa = 0.75;
  double mu_;
  double target_;
  double h_bar_ = 0.0;
  double log_step_bar_ = 0.0;
  int t_ = 0;
};

struct State {
  Eigen::VectorXd z;
  double log_density = 0.0;
  Eigen::VectorXd grad;
};

// Energy error beyond which a trajectory is abandoned as divergent.
constexpr double kMaxEnergyError = 1000.0;

// One leapfrog trajectory. Returns false when it diverged: the density became
// non-finite or the potential energy rose more than kMaxEnergyError above the
// starting Hamiltonian.
bool leapfrog(const WhitenedTarget& target, State& s, Eigen::VectorXd& p, double step, std::size_t n_steps) {
  const double h0 = -s.log_density + 0.5 * p.squaredNorm();
  p += 0.5 * step * s.grad;
  for (std::size_t i = 0; i < n_steps; ++i) {
    s.z += step * p;
    s.log_density = target(s.z, &s.grad);
    if (!std::isfinite(s.log_density) || -s.log_density - h0 > kMaxEnergyError) return false;
    if (!finite_vector(s.grad)) {
      throw NumericalError("non-finite gradient at finite log density during leapfrog integration");
    }
    p += (i + 1 == n_steps ? 0.5 : 1.0) * step * s.grad;
  }
  return true;
}

Eigen::VectorXd normal_vector(Philox& rng, Eigen::Index n) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = standard_normal(rng);
  return v;
}

double acceptance_probability(double log_ratio) {
  if (std::isnan(log_ratio)) return 0.0;
  return log_ratio >= 0.0 ? 1.0 : std::exp(log_ratio);
}

// Starting step for dual averaging: double or halve until a single leapfrog
// step crosses acceptance probability 1/2.
double initial_step(const WhitenedTarget& target, const State& start, double step, Philox& rng) {
  const Eigen::Index d = start.z.size();
  auto accept_at = [&](double eps) {
    State s = start;
    Eigen::VectorXd p = normal_vector(rng, d);
    const double h0 = -s.log_density + 0.5 * p.squaredNorm();
    if (!leapfrog(target, s, p, eps, 1)) return 0.0;
    return acceptance_probability(h0 - (-s.log_density + 0.5 * p.squaredNorm()));
  };
  const bool grow = accept_at(step) > 0.5;
  for (int i = 0; i < 50; ++i) {
    const double next = grow ? step * 2.0 : step * 0.5;
    const double a = accept_at(next);
    if (grow ? a < 0.5 : a > 0.5) return grow ? step : next;
    step = next;
  }
  return step;
}

}  // namespace

std::string_view to_string(Algorithm a) { return a == Algorithm::kHmc ? "hmc" : "rwm"; }

Algorithm parse_algorithm(std::string_view name) {
  if (name == "hmc") return Algorithm::kHmc;
  if (name == "rwm") return Algorithm::kRwm;
  throw std::invalid_argument("unknown algorithm '" + std::string(name) + "' (expected hmc or rwm)");
}

void ChainConfig::validate() const {
  if (n_draws == 0) throw std::invalid_argument("n_draws must be positive");
  if (n_chains == 0) throw std::invalid_argument("n_chains must be positive");
  if (!(step_size > 0.0)) throw std::invalid_argument("step_size must be positive");
  if (algorithm == Algorithm::kHmc && leapfrog_steps == 0) {
    throw std::invalid_argument("leapfrog_steps must be positive");
  }
  if (proposal_scale.size() > 0 && (proposal_scale.array() <= 0.0).any()) {
    throw std::invalid_argument("proposal scales must be positive");
  }
}

ChainResult run_chain(const ChainConfig& config, const LogDensity& target, const Eigen::VectorXd& initial,
                      std::size_t chain_index, const Eigen::MatrixXd& metric_chol) {
  config.validate();
  const Eigen::Index d = initial.size();
  const WhitenedTarget whitened(target, metric_chol, d);
  Philox rng(config.seed, chain_index);

  State cur;
  cur.z = whitened.to_z(initial);
  cur.log_density = whitened(cur.z, &cur.grad);
  if (!std::isfinite(cur.log_density)) {
    throw NumericalError("initial point of chain " + std::to_string(chain_index) + " has non-finite log density");
  }
  if (config.algorithm == Algorithm::kHmc && !finite_vector(cur.grad)) {
    throw NumericalError("initial point of chain " + std::to_string(chain_index) + " has non-finite gradient");
  }

  ChainResult result;
  result.draws.resize(static_cast<Eigen::Index>(config.n_draws), d);
  std::size_t accepted = 0;
  double energy_error_sum = 0.0;
  const std::size_t total = config.burn_in + config.n_draws;

  if (config.algorithm == Algorithm::kHmc) {
    double step = config.step_size;
    if (config.adapt && config.burn_in > 0) step = initial_step(whitened, cur, step, rng);
    DualAveraging adapter(step, config.hmc_target_accept);
    for (std::size_t iter = 0; iter < total; ++iter) {
      const bool warmup = iter < config.burn_in;
      const double jitter = config.step_jitter > 0.0
                                ? 1.0 + config.step_jitter * (2.0 * uniform01(rng) - 1.0)
                                : 1.0;
      Eigen::VectorXd p = normal_vector(rng, d);
      const double h0 = -cur.log_density + 0.5 * p.squaredNorm();
      State prop = cur;
      double accept_prob = 0.0;
      double energy_error = std::numeric_limits<double>::infinity();
      if (leapfrog(whitened, prop, p, step * jitter, config.leapfrog_steps)) {
        const double h1 = -prop.log_density + 0.5 * p.squaredNorm();
        energy_error = h1 - h0;
        accept_prob = acceptance_probability(-energy_error);
      } else if (!warmup) {
        ++result.divergences;
      }
      const bool accept = uniform01(rng) < accept_prob;
      if (accept) cur = std::move(prop);
      if (warmup) {
        if (config.adapt) {
          step = adapter.update(accept_prob);
          if (iter + 1 == config.burn_in) step = adapter.final_step();
        }
        continue;
      }
      accepted += accept ? 1 : 0;
      energy_error_sum += std::abs(energy_error);
      result.draws.row(static_cast<Eigen::Index>(iter - config.burn_in)) = whitened.to_x(cur.z).transpose();
    }
    result.step_size = step;
  } else {
    Eigen::VectorXd scale = config.proposal_scale.size() > 0
                                ? config.proposal_scale
                                : Eigen::VectorXd::Constant(d, 2.38 / std::sqrt(static_cast<double>(d)));
    if (scale.size() != d) throw std::invalid_argument("proposal_scale has wrong dimension");
    double log_multiplier = 0.0;
    for (std::size_t iter = 0; iter < total; ++iter) {
      const bool warmup = iter < config.burn_in;
      State prop;
      prop.z = cur.z + std::exp(log_multiplier) * scale.cwiseProduct(normal_vector(rng, d));
      prop.log_density = whitened(prop.z, nullptr);
      double accept_prob = 0.0;
      if (std::isfinite(prop.log_density)) {
        accept_prob = acceptance_probability(prop.log_density - cur.log_density);
      } else if (!warmup) {
        ++result.divergences;
      }
      const bool accept = uniform01(rng) < accept_prob;
      if (accept) cur = std::move(prop);
      if (warmup) {
        if (config.adapt) {
          log_multiplier += (accept_prob - config.rwm_target_accept) / std::pow(static_cast<double>(iter + 1), 0.6);
        }
        continue;
      }
      accepted += accept ? 1 : 0;
      result.draws.row(static_cast<Eigen::Index>(iter - config.burn_in)) = whitened.to_x(cur.z).transpose();
    }
    result.step_size = std::exp(log_multiplier);
  }
  result.acceptance_rate = static_cast<double>(accepted) / static_cast<double>(config.n_draws);
  result.mean_abs_energy_error = energy_error_sum / static_cast<double>(config.n_draws);
  return result;
}

PosteriorDraws run_chains(const ChainConfig& config, const LogDensity& target,
                          const std::vector<Eigen::VectorXd>& initial, std::vector<ParameterInfo> parameters,
                          const Eigen::MatrixXd& metric_chol) {
  config.validate();
  if (initial.size() != config.n_chains) {
    throw std::invalid_argument("expected one starting point per chain");
  }
  const Eigen::Index d = initial.front().size();
  if (!parameters.empty() && static_cast<Eigen::Index>(parameters.size()) != d) {
    throw std::invalid_argument("parameter names do not match dimension");
  }
  std::vector<ChainResult> results(config.n_chains);
  std::vector<std::exception_ptr> errors(config.n_chains);
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(config.n_chains, std::thread::hardware_concurrency()));
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t c = w; c < config.n_chains; c += workers) {
          try {
            results[c] = run_chain(config, target, initial[c], c, metric_chol);
          } catch (...) {
            errors[c] = std::current_exception();
          }
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  PosteriorDraws out;
  out.parameters = std::move(parameters);
  if (out.parameters.empty()) {
    for (Eigen::Index i = 0; i < d; ++i) out.parameters.push_back({"x" + std::to_string(i), false});
  }
  out.n_chains = config.n_chains;
  out.n_draws = config.n_draws;
  const auto n = static_cast<Eigen::Index>(config.n_draws);
  out.values.resize(n * static_cast<Eigen::Index>(config.n_chains), d);
  for (std::size_t c = 0; c < config.n_chains; ++c) {
    out.values.middleRows(static_cast<Eigen::Index>(c) * n, n) = results[c].draws;
    out.acceptance.push_back(results[c].acceptance_rate);
    out.step_size.push_back(results[c].step_size);
    out.divergences.push_back(results[c].divergences);
  }
  return out;
}

Eigen::MatrixXd PosteriorDraws::chain_matrix(Eigen::Index parameter) const {
  const auto n = static_cast<Eigen::Index>(n_draws);
  Eigen::MatrixXd m(n, static_cast<Eigen::Index>(n_chains));
  for (Eigen::Index c = 0; c < m.cols(); ++c) m.col(c) = values.col(parameter).segment(c * n, n);
  return m;
}

Eigen::MatrixXd PosteriorDraws::constrained() const {
  Eigen::MatrixXd out = values;
  for (std::size_t j = 0; j < parameters.size(); ++j) {
    if (parameters[j].log_scale) out.col(static_cast<Eigen::Index>(j)) = out.col(static_cast<Eigen::Index>(j)).array().exp();
  }
  return out;
}

Eigen::Index PosteriorDraws::index_of(const std::string& name) const {
  for (std::size_t j = 0; j < parameters.size(); ++j) {
    if (parameters[j].name == name) return static_cast<Eigen::Index>(j);
  }
  throw std::out_of_range("no parameter named " + name);
}

// ---------------------------------------------------------------------------
// Mode and Laplace approximation

Eigen::MatrixXd numerical_hessian(const LogDensity& target, const Eigen::VectorXd& at) {
  const Eigen::Index d = at.size();
  Eigen::MatrixXd h(d, d);
  Eigen::VectorXd gp, gm;
  for (Eigen::Index j = 0; j < d; ++j) {
    const double step = 1e-4 * std::max(std::abs(at[j]), 1e-2);
    Eigen::VectorXd xp = at, xm = at;
    xp[j] += step;
    xm[j] -= step;
    target(xp, &gp);
    target(xm, &gm);
    h.col(j) = (gp - gm) / (2.0 * step);
  }
  return 0.5 * (h + h.transpose());
}

namespace {

// Covariance from a negated Hessian, with eigenvalues floored so the
// result is positive definite even away from a strict maximum.
Eigen::MatrixXd covariance_from_precision(const Eigen::MatrixXd& precision) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(precision);
  Eigen::VectorXd vals = eig.eigenvalues();
  const double floor = std::max(vals.cwiseAbs().maxCoeff() * 1e-12, 1e-300);
  vals = vals.cwiseMax(floor);
  return eig.eigenvectors() * vals.cwiseInverse().asDiagonal() * eig.eigenvectors().transpose();
}

}  // namespace

LaplaceApproximation find_mode(const LogDensity& target, const Eigen::VectorXd& start, const ModeOptions& options) {
  LaplaceApproximation out;
  Eigen::VectorXd x = start;
  Eigen::VectorXd g;
  double f = target(x, &g);
  if (!std::isfinite(f) || !g.allFinite()) throw NumericalError("mode search started at a non-finite density");

  double damping = 1e-3;
  int it = 0;
  for (; it < options.max_iterations; ++it) {
    const Eigen::MatrixXd precision = -numerical_hessian(target, x);
    // Undamped Newton decrement as the convergence test.
    Eigen::LLT<Eigen::MatrixXd> plain(precision);
    if (plain.info() == Eigen::Success) {
      const double decrement = 0.5 * g.dot(plain.solve(g));
      if (decrement < options.tolerance) {
        out.converged = true;
        break;
      }
    }
    const Eigen::VectorXd diag = precision.diagonal().cwiseAbs().cwiseMax(1e-12);
    bool moved = false;
    while (damping < 1e16) {
      Eigen::MatrixXd damped = precision;
      damped.diagonal() += damping * diag;
      Eigen::LLT<Eigen::MatrixXd> llt(damped);
      if (llt.info() != Eigen::Success) {
        damping *= 10.0;
        continue;
      }
      const Eigen::VectorXd step = llt.solve(g);
      Eigen::VectorXd xn = x + step;
      Eigen::VectorXd gn;
      const double fn = target(xn, &gn);
      if (std::isfinite(fn) && gn.allFinite() && fn >= f) {
        moved = fn > f || step.norm() == 0.0;
        x = std::move(xn);
        g = std::move(gn);
        f = fn;
        damping = std::max(damping * 0.1, 1e-10);
        break;
      }
      damping *= 10.0;
    }
    if (!moved) {
      // No ascent direction left at double precision.
      out.converged = g.cwiseAbs().maxCoeff() < 1e-3 * std::max(1.0, std::abs(f));
      break;
    }
  }
  out.iterations = it;
  out.mode = x;
  out.log_density = f;
  out.covariance = covariance_from_precision(-numerical_hessian(target, x));
  Eigen::LLT<Eigen::MatrixXd> llt(out.covariance);
  out.chol = llt.matrixL();
  return out;
}

}  // namespace amcomp
