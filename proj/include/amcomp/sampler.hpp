#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "amcomp/model.hpp"

namespace amcomp {

/// Log density with optional gradient output.
using LogDensity = std::function<double(const Eigen::Ref<const Eigen::VectorXd>&, Eigen::VectorXd*)>;

/// Raised when the sampler meets a non-finite density or gradient it cannot
/// treat as an ordinary rejection.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Algorithm { kRwm, kHmc };

struct ChainConfig {
  std::size_t n_draws = 1000;
  std::size_t burn_in = 500;
  std::size_t n_chains = 10;
  std::uint64_t seed = 0;
  Algorithm algorithm = Algorithm::kHmc;
  double step_size = 0.25;           ///< HMC initial (or fixed) leapfrog step
  std::size_t leapfrog_steps = 3;    ///< HMC
  Eigen::VectorXd proposal_scale;    ///< RWM per-coordinate SD; empty means 2.38/sqrt(d)
  bool adapt = true;                 ///< tune step size / proposal scale during burn-in
  double hmc_target_accept = 0.8;
  double rwm_target_accept = 0.234;
  double step_jitter = 0.1;          ///< HMC step drawn from step * U(1 - j, 1 + j)

  /// Throws std::invalid_argument on n_draws == 0, n_chains == 0, or a
  /// non-positive step size.
  void validate() const;
};

std::string_view to_string(Algorithm a);
Algorithm parse_algorithm(std::string_view name);

/// Draws from a single chain, in the target's coordinates.
struct ChainResult {
  Eigen::MatrixXd draws;  ///< n_draws x dimension, burn-in removed
  double acceptance_rate = 0.0;  ///< post burn-in
  double step_size = 0.0;        ///< final HMC step or RWM scale multiplier
  std::size_t divergences = 0;   ///< post burn-in trajectories abandoned (non-finite density or energy error > 1000)
  double mean_abs_energy_error = 0.0;  ///< HMC, post burn-in
};

/// Runs one chain.
///
/// When metric_chol (lower triangular L) is given the chain moves in
/// whitened coordinates z with x = L z, which for HMC is the same as a dense
/// mass matrix (L L^T)^{-1}. Chain c of seed s always consumes the Philox
/// stream (s, c), so results do not depend on scheduling.
ChainResult run_chain(const ChainConfig& config, const LogDensity& target, const Eigen::VectorXd& initial,
                      std::size_t chain_index, const Eigen::MatrixXd& metric_chol = Eigen::MatrixXd());

/// Draws from several chains stacked chain-major.
struct PosteriorDraws {
  std::vector<ParameterInfo> parameters;
  Eigen::MatrixXd values;           ///< (n_chains * n_draws) x dimension, unconstrained
  std::size_t n_chains = 0;
  std::size_t n_draws = 0;
  std::vector<double> acceptance;   ///< per chain
  std::vector<double> step_size;    ///< per chain
  std::vector<std::size_t> divergences;

  Eigen::Index dimension() const { return values.cols(); }
  int chain_of(Eigen::Index row) const { return static_cast<int>(row / static_cast<Eigen::Index>(n_draws)); }
  int iteration_of(Eigen::Index row) const { return static_cast<int>(row % static_cast<Eigen::Index>(n_draws)); }

  /// n_draws x n_chains matrix of one parameter (unconstrained scale).
  Eigen::MatrixXd chain_matrix(Eigen::Index parameter) const;

  /// Values with log-scale parameters exponentiated.
  Eigen::MatrixXd constrained() const;

  Eigen::Index index_of(const std::string& name) const;
};

/// Runs config.n_chains chains from the given starting points (one per chain)
/// on worker threads.
PosteriorDraws run_chains(const ChainConfig& config, const LogDensity& target,
                          const std::vector<Eigen::VectorXd>& initial, std::vector<ParameterInfo> parameters,
                          const Eigen::MatrixXd& metric_chol = Eigen::MatrixXd());

/// Gaussian approximation at the posterior mode.
struct LaplaceApproximation {
  Eigen::VectorXd mode;
  Eigen::MatrixXd covariance;
  Eigen::MatrixXd chol;  ///< lower Cholesky factor of covariance
  double log_density = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct ModeOptions {
  int max_iterations = 500;
  double tolerance = 1e-9;  ///< on the Newton decrement g^T H^{-1} g / 2
};

/// Damped Newton ascent with a finite-difference Hessian of the analytic
/// gradient. Throws NumericalError if the start has a non-finite density.
LaplaceApproximation find_mode(const LogDensity& target, const Eigen::VectorXd& start,
                               const ModeOptions& options = {});

/// Symmetric finite-difference Hessian of the gradient.
Eigen::MatrixXd numerical_hessian(const LogDensity& target, const Eigen::VectorXd& at);

}  // namespace amcomp
