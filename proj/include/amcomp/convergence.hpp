#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "amcomp/sampler.hpp"

namespace amcomp {

/// A diagnostic value plus a flag for degenerate input (e.g. a constant chain).
struct Diagnostic {
  double value = 0.0;
  bool degenerate = false;
};

struct Autocorrelation {
  Eigen::VectorXd rho;  ///< lags 0..max_lag, rho[0] == 1
  bool degenerate = false;
};

// All chain-matrix functions take one column per chain, equal lengths.

/// Pooled sample autocorrelation: per-chain autocovariances (1/n
/// normalization, chain-centered) averaged across chains, over the average
/// lag-0 autocovariance. Throws std::invalid_argument if max_lag >= n.
Autocorrelation autocorrelation(const Eigen::Ref<const Eigen::MatrixXd>& chains, Eigen::Index max_lag);

/// Multi-chain effective sample size n_total / (1 + 2 sum rho_k), where the
/// combined autocorrelation uses the between/within variance estimate and
/// the sum stops at the first non-positive pair rho_{2k} + rho_{2k+1}
/// (Geyer's initial positive sequence, made monotone). The integrated time is
/// floored at 1/log10(n_total), so strongly anticorrelated chains report
/// ESS above n_total. A constant input returns n_total flagged degenerate.
Diagnostic effective_sample_size(const Eigen::Ref<const Eigen::MatrixXd>& chains);

/// Potential scale reduction sqrt(((n-1)/n W + B/n) / W). Needs at least two
/// chains of length two; zero within-chain variance is flagged degenerate.
Diagnostic gelman_rubin(const Eigen::Ref<const Eigen::MatrixXd>& chains);

Diagnostic effective_sample_size(const PosteriorDraws& draws, Eigen::Index parameter);
Diagnostic gelman_rubin(const PosteriorDraws& draws, Eigen::Index parameter);
Autocorrelation autocorrelation(const PosteriorDraws& draws, Eigen::Index parameter, Eigen::Index max_lag);

/// Linear-interpolation quantile (type 7) of unsorted values.
double quantile(std::span<const double> values, double p);

struct ParameterSummary {
  std::string name;
  double mean = 0.0;
  double sd = 0.0;
  double median = 0.0;
  double lower = 0.0;  ///< central interval
  double upper = 0.0;
  double ess = 0.0;
  double rhat = 1.0;
  bool degenerate = false;
};

/// Per-parameter summaries on the constrained scale. rhat is NaN for a
/// single chain.
std::vector<ParameterSummary> summarize(const PosteriorDraws& draws, double interval = 0.95);

}  // namespace amcomp
