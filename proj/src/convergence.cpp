#include "amcomp/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace amcomp {
namespace {

void require_chains(const Eigen::Ref<const Eigen::MatrixXd>& chains, Eigen::Index min_chains,
                    Eigen::Index min_length) {
  if (chains.cols() < min_chains || chains.rows() < min_length) {
    throw std::invalid_argument("need at least " + std::to_string(min_chains) + " chain(s) of length " +
                                std::to_string(min_length));
  }
}

// Autocovariance at lags 0..max_lag with 1/n normalization.
Eigen::VectorXd autocovariance(const Eigen::Ref<const Eigen::VectorXd>& x, Eigen::Index max_lag) {
  const Eigen::Index n = x.size();
  const Eigen::VectorXd c = x.array() - x.mean();
  Eigen::VectorXd out(max_lag + 1);
  for (Eigen::Index k = 0; k <= max_lag; ++k) {
    out[k] = c.head(n - k).dot(c.tail(n - k)) / static_cast<double>(n);
  }
  return out;
}

double sample_variance(const Eigen::Ref<const Eigen::VectorXd>& x) {
  return (x.array() - x.mean()).square().sum() / static_cast<double>(x.size() - 1);
}

}  // namespace

Autocorrelation autocorrelation(const Eigen::Ref<const Eigen::MatrixXd>& chains, Eigen::Index max_lag) {
  require_chains(chains, 1, 2);
  if (max_lag < 0 || max_lag >= chains.rows()) {
    throw std::invalid_argument("max_lag must be below the chain length");
  }
  Eigen::VectorXd acov = Eigen::VectorXd::Zero(max_lag + 1);
  for (Eigen::Index c = 0; c < chains.cols(); ++c) acov += autocovariance(chains.col(c), max_lag);
  Autocorrelation out;
  if (!(acov[0] > 0.0)) {
    out.rho = Eigen::VectorXd::Constant(max_lag + 1, std::numeric_limits<double>::quiet_NaN());
    out.rho[0] = 1.0;
    out.degenerate = true;
    return out;
  }
  out.rho = acov / acov[0];
  return out;
}

Diagnostic effective_sample_size(const Eigen::Ref<const Eigen::MatrixXd>& chains) {
  require_chains(chains, 1, 2);
  const Eigen::Index n = chains.rows();
  const Eigen::Index m = chains.cols();
  const double total = static_cast<double>(n * m);

  Eigen::MatrixXd acov(n, m);
  Eigen::VectorXd means(m), vars(m);
  for (Eigen::Index c = 0; c < m; ++c) {
    acov.col(c) = autocovariance(chains.col(c), n - 1);
    means[c] = chains.col(c).mean();
    vars[c] = sample_variance(chains.col(c));
  }
  const double w = vars.mean();
  if (!(w > 0.0)) return {total, true};
  const double nd = static_cast<double>(n);
  double var_plus = (nd - 1.0) / nd * w;
  if (m > 1) var_plus += (means.array() - means.mean()).square().sum() / static_cast<double>(m - 1);
  const Eigen::VectorXd mean_acov = acov.rowwise().mean();

  auto rho = [&](Eigen::Index t) { return 1.0 - (w - mean_acov[t]) / var_plus; };
  // Pair sums Gamma_k = rho_{2k} + rho_{2k+1}, rho_0 taken as 1.
  std::vector<double> pairs;
  for (Eigen::Index t = 0; t + 1 < n; t += 2) {
    const double gamma = (t == 0 ? 1.0 : rho(t)) + rho(t + 1);
    if (!(gamma > 0.0)) break;
    pairs.push_back(gamma);
  }
  for (std::size_t k = 1; k < pairs.size(); ++k) pairs[k] = std::min(pairs[k], pairs[k - 1]);
  double tau = -1.0;
  for (double gamma : pairs) tau += 2.0 * gamma;
  tau = std::max(tau, 1.0 / std::log10(total));
  return {total / tau, false};
}

Diagnostic gelman_rubin(const Eigen::Ref<const Eigen::MatrixXd>& chains) {
  require_chains(chains, 2, 2);
  const Eigen::Index n = chains.rows();
  const Eigen::Index m = chains.cols();
  Eigen::VectorXd means(m), vars(m);
  for (Eigen::Index c = 0; c < m; ++c) {
    means[c] = chains.col(c).mean();
    vars[c] = sample_variance(chains.col(c));
  }
  const double nd = static_cast<double>(n);
  const double w = vars.mean();
  const double b = nd * (means.array() - means.mean()).square().sum() / static_cast<double>(m - 1);
  if (!(w > 0.0)) {
    return {b > 0.0 ? std::numeric_limits<double>::infinity() : 1.0, true};
  }
  return {std::sqrt(((nd - 1.0) / nd * w + b / nd) / w), false};
}

Diagnostic effective_sample_size(const PosteriorDraws& draws, Eigen::Index parameter) {
  return effective_sample_size(draws.chain_matrix(parameter));
}

Diagnostic gelman_rubin(const PosteriorDraws& draws, Eigen::Index parameter) {
  return gelman_rubin(draws.chain_matrix(parameter));
}

Autocorrelation autocorrelation(const PosteriorDraws& draws, Eigen::Index parameter, Eigen::Index max_lag) {
  return autocorrelation(draws.chain_matrix(parameter), max_lag);
}

double quantile(std::span<const double> values, double p) {
  if (values.empty()) throw std::invalid_argument("quantile of an empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("quantile level must lie in [0, 1]");
  std::vector<double> v(values.begin(), values.end());
  const double h = p * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(lo), v.end());
  const double x_lo = v[lo];
  if (lo + 1 >= v.size()) return x_lo;
  const double x_hi = *std::min_element(v.begin() + static_cast<std::ptrdiff_t>(lo) + 1, v.end());
  return x_lo + (h - static_cast<double>(lo)) * (x_hi - x_lo);
}

std::vector<ParameterSummary> summarize(const PosteriorDraws& draws, double interval) {
  if (draws.values.rows() == 0) throw std::invalid_argument("no draws to summarize");
  if (!(interval > 0.0 && interval < 1.0)) throw std::invalid_argument("interval must lie in (0, 1)");
  const Eigen::MatrixXd values = draws.constrained();
  const auto n = static_cast<Eigen::Index>(draws.n_draws);
  const auto m = static_cast<Eigen::Index>(draws.n_chains);
  std::vector<ParameterSummary> out;
  for (Eigen::Index j = 0; j < values.cols(); ++j) {
    ParameterSummary s;
    s.name = draws.parameters[static_cast<std::size_t>(j)].name;
    const Eigen::VectorXd col = values.col(j);
    s.mean = col.mean();
    s.sd = col.size() > 1 ? std::sqrt(sample_variance(col)) : 0.0;
    const std::span<const double> span(col.data(), static_cast<std::size_t>(col.size()));
    s.median = quantile(span, 0.5);
    s.lower = quantile(span, 0.5 * (1.0 - interval));
    s.upper = quantile(span, 0.5 * (1.0 + interval));
    Eigen::MatrixXd chains(n, m);
    for (Eigen::Index c = 0; c < m; ++c) chains.col(c) = col.segment(c * n, n);
    if (n >= 2) {
      const auto ess = effective_sample_size(chains);
      s.ess = ess.value;
      s.degenerate = ess.degenerate;
    } else {
      s.ess = static_cast<double>(col.size());
    }
    s.rhat = (m >= 2 && n >= 2) ? gelman_rubin(chains).value : std::numeric_limits<double>::quiet_NaN();
    // Constant draws: report the formula's B = 0 limit instead of 0/0.
    if (s.sd == 0.0) s.rhat = 1.0;
    out.push_back(s);
  }
  return out;
}

}  // namespace amcomp
