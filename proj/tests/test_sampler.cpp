#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "amcomp/sampler.hpp"

using namespace amcomp;

namespace {

// N(mu, S) with S = [[1, 0.8], [0.8, 1]].
struct Gaussian2 {
  Eigen::Vector2d mu{1.0, -2.0};
  Eigen::Matrix2d precision = (Eigen::Matrix2d() << 1.0, 0.8, 0.8, 1.0).finished().inverse();

  double operator()(const Eigen::Ref<const Eigen::VectorXd>& x, Eigen::VectorXd* grad) const {
    const Eigen::Vector2d d = x - mu;
    if (grad) *grad = -precision * d;
    return -0.5 * d.dot(precision * d);
  }
};

std::vector<ParameterInfo> names2() { return {{"x", false}, {"y", false}}; }

std::vector<Eigen::VectorXd> starts(std::size_t n) {
  std::vector<Eigen::VectorXd> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(Eigen::Vector2d(0.5 * i, -1.0));
  return out;
}

ChainConfig config(Algorithm alg) {
  ChainConfig c;
  c.algorithm = alg;
  c.n_chains = 4;
  c.n_draws = 4000;
  c.burn_in = 1000;
  c.seed = 17;
  return c;
}

}  // namespace

TEST_SUITE("sampler") {
  TEST_CASE("hmc recovers a correlated gaussian") {
    const auto draws = run_chains(config(Algorithm::kHmc), Gaussian2{}, starts(4), names2());
    const Eigen::RowVectorXd mean = draws.values.colwise().mean();
    CHECK(mean[0] == doctest::Approx(1.0).epsilon(0.05));
    CHECK(mean[1] == doctest::Approx(-2.0).epsilon(0.03));
    const Eigen::MatrixXd centered = draws.values.rowwise() - mean;
    const Eigen::MatrixXd cov = centered.transpose() * centered / double(draws.values.rows() - 1);
    CHECK(cov(0, 0) == doctest::Approx(1.0).epsilon(0.08));
    CHECK(cov(1, 1) == doctest::Approx(1.0).epsilon(0.08));
    CHECK(cov(0, 1) == doctest::Approx(0.8).epsilon(0.08));
    for (double a : draws.acceptance) CHECK(a > 0.6);
  }

  TEST_CASE("rwm recovers a correlated gaussian") {
    auto c = config(Algorithm::kRwm);
    c.n_draws = 20000;
    const auto draws = run_chains(c, Gaussian2{}, starts(4), names2());
    const Eigen::RowVectorXd mean = draws.values.colwise().mean();
    CHECK(mean[0] == doctest::Approx(1.0).epsilon(0.1));
    CHECK(mean[1] == doctest::Approx(-2.0).epsilon(0.05));
    for (double a : draws.acceptance) {
      CHECK(a > 0.15);
      CHECK(a < 0.45);
    }
  }

  TEST_CASE("whitening metric") {
    Gaussian2 target;
    const Eigen::MatrixXd chol = Eigen::Matrix2d(target.precision.inverse()).llt().matrixL();
    const auto draws = run_chains(config(Algorithm::kHmc), target, starts(4), names2(), chol);
    const Eigen::RowVectorXd mean = draws.values.colwise().mean();
    CHECK(mean[0] == doctest::Approx(1.0).epsilon(0.05));
    CHECK(mean[1] == doctest::Approx(-2.0).epsilon(0.03));
    CHECK_THROWS_AS(run_chains(config(Algorithm::kHmc), target, starts(4), names2(), Eigen::MatrixXd::Identity(3, 3)),
                    std::invalid_argument);
  }

  TEST_CASE("results depend only on seed and chain index") {
    auto c = config(Algorithm::kHmc);
    c.n_draws = 300;
    c.burn_in = 100;
    const auto a = run_chains(c, Gaussian2{}, starts(4), names2());
    const auto b = run_chains(c, Gaussian2{}, starts(4), names2());
    CHECK(a.values == b.values);
    const auto single = run_chain(c, Gaussian2{}, starts(4)[2], 2);
    CHECK(single.draws == a.values.middleRows(2 * 300, 300));
    c.seed = 18;
    CHECK(run_chains(c, Gaussian2{}, starts(4), names2()).values != a.values);
  }

  TEST_CASE("vanishing step accepts everything") {
    auto c = config(Algorithm::kHmc);
    c.adapt = false;
    c.step_size = 1e-4;
    c.step_jitter = 0.0;
    c.n_chains = 1;
    c.n_draws = 500;
    c.burn_in = 0;
    CHECK(run_chain(c, Gaussian2{}, starts(1)[0], 0).acceptance_rate > 0.999);
    c.algorithm = Algorithm::kRwm;
    c.proposal_scale = Eigen::Vector2d(1e-5, 1e-5);
    CHECK(run_chain(c, Gaussian2{}, starts(1)[0], 0).acceptance_rate > 0.99);
  }

  TEST_CASE("rejections outside the support") {
    // Half-normal on x > 0.
    const LogDensity half = [](const Eigen::Ref<const Eigen::VectorXd>& x, Eigen::VectorXd* g) {
      if (g) *g = -x;
      return x[0] > 0 ? -0.5 * x.squaredNorm() : -std::numeric_limits<double>::infinity();
    };
    auto c = config(Algorithm::kHmc);
    c.n_chains = 1;
    c.n_draws = 4000;
    const auto r = run_chain(c, half, Eigen::VectorXd::Constant(1, 1.0), 0);
    CHECK(r.draws.minCoeff() > 0.0);
    CHECK(r.draws.mean() == doctest::Approx(std::sqrt(2.0 / M_PI)).epsilon(0.1));
  }

  TEST_CASE("configuration errors") {
    ChainConfig c;
    c.n_draws = 0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = {};
    c.n_chains = 0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = {};
    c.step_size = -1;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    CHECK(parse_algorithm("rwm") == Algorithm::kRwm);
    CHECK(to_string(Algorithm::kHmc) == "hmc");
    CHECK_THROWS_AS(parse_algorithm("nuts"), std::invalid_argument);
    CHECK_THROWS_AS(run_chains(config(Algorithm::kHmc), Gaussian2{}, starts(3), names2()), std::invalid_argument);
  }

  TEST_CASE("non-finite starts are numerical failures") {
    const LogDensity bad = [](const Eigen::Ref<const Eigen::VectorXd>&, Eigen::VectorXd* g) {
      if (g) *g = Eigen::VectorXd::Zero(1);
      return std::numeric_limits<double>::quiet_NaN();
    };
    CHECK_THROWS_AS(run_chain(ChainConfig{}, bad, Eigen::VectorXd::Zero(1), 0), NumericalError);
    CHECK_THROWS_AS(find_mode(bad, Eigen::VectorXd::Zero(1)), NumericalError);
  }

  TEST_CASE("mode and laplace covariance of a gaussian") {
    Gaussian2 target;
    const auto loose = find_mode(target, Eigen::Vector2d(5.0, 5.0));
    CHECK(loose.converged);
    CHECK((loose.mode - target.mu).norm() < 1e-3);
    const auto lap = find_mode(target, Eigen::Vector2d(5.0, 5.0), {500, 1e-18});
    CHECK(lap.converged);
    CHECK((lap.mode - target.mu).norm() < 1e-7);
    CHECK((lap.covariance - target.precision.inverse()).norm() < 1e-5);
    CHECK((lap.chol * lap.chol.transpose() - lap.covariance).norm() < 1e-10);
    const Eigen::MatrixXd h = numerical_hessian(target, Eigen::Vector2d(0.0, 0.0));
    CHECK((h + target.precision).norm() < 1e-6);
  }

  TEST_CASE("draw bookkeeping") {
    auto c = config(Algorithm::kHmc);
    c.n_draws = 50;
    c.burn_in = 20;
    const auto d = run_chains(c, Gaussian2{}, starts(4), {{"x", false}, {"log_y", true}});
    CHECK(d.values.rows() == 200);
    CHECK(d.chain_of(120) == 2);
    CHECK(d.iteration_of(120) == 20);
    CHECK(d.chain_matrix(1).rows() == 50);
    CHECK(d.chain_matrix(1)(3, 2) == d.values(103, 1));
    CHECK(d.constrained()(7, 1) == doctest::Approx(std::exp(d.values(7, 1))));
    CHECK(d.constrained()(7, 0) == d.values(7, 0));
    CHECK(d.index_of("log_y") == 1);
    CHECK_THROWS_AS(d.index_of("z"), std::out_of_range);
  }
}
