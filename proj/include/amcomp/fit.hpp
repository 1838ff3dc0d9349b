#pragma once

#include "amcomp/dataset.hpp"
#include "amcomp/model.hpp"
#include "amcomp/sampler.hpp"

namespace amcomp {

/// Starting point for the mode search. Decay rates start at 50 and location
/// shifts at zero; a, b and log x0 come from a grid search of the
/// prior-penalized profile likelihood, with alpha and beta solved by least
/// squares at each grid point and sigma from the residual RMS.
Eigen::VectorXd initial_estimate(const DeformationDataset& data, const ModelSpec& spec);

struct FitResult {
  PosteriorDraws draws;
  LaplaceApproximation laplace;
};

/// Mode search, dense whitening metric from the Laplace covariance, and
/// config.n_chains chains started at independent draws from the Laplace
/// approximation with its scale doubled.
FitResult fit(const DeformationDataset& data, const ModelSpec& spec, const ChainConfig& config);

/// Same, over an already-built posterior.
FitResult fit(const LogPosterior& posterior, const Eigen::VectorXd& start, const ChainConfig& config);

}  // namespace amcomp
