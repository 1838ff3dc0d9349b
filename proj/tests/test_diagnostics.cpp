#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "amcomp/diagnostics.hpp"
#include "amcomp/synth.hpp"
#include "fixtures.hpp"

using namespace amcomp;

namespace {

std::vector<BaselineParams<>> repeated(const BaselineParams<>& p, std::size_t n) { return {n, p}; }

PosteriorDraws draws_at(const ModelParams& p, const ModelSpec& spec, std::size_t n) {
  PosteriorDraws d;
  d.parameters = spec.parameters();
  d.n_chains = 1;
  d.n_draws = n;
  const Eigen::VectorXd u = p.to_unconstrained(spec);
  d.values = u.transpose().replicate(static_cast<Eigen::Index>(n), 1);
  return d;
}

}  // namespace

TEST_SUITE("diagnostics") {
  TEST_CASE("inverting the compensation model") {
    const auto p = reference_baseline_params();
    for (double r0 : {0.5, 1.0, 2.0, 3.0}) {
      for (double g : {-0.03, 0.0, 0.004, 0.06}) {
        for (double t : {0.1, 1.0, 2.5}) {
          Observation obs{Angle(t), r0, 0.0, taylor_compensated_mean(p, t, r0, g)};
          const auto inferred = infer_effective_treatment(obs, p);
          CHECK_FALSE(inferred.ill_conditioned);
          CHECK(std::abs(inferred.value - g) <= 1e-12);
        }
      }
    }
  }

  TEST_CASE("zero slope is ill-conditioned") {
    BaselineParams<> p{0.0, 0.0, 1.0, 1.0, 0.01, 0.001};
    p.alpha = -1.0;  // 1 + h = 1 + a alpha = 0
    const auto inferred = infer_effective_treatment({Angle(0.3), 1.0, 0.0, 0.02}, p);
    CHECK(inferred.ill_conditioned);
    CHECK(std::isnan(inferred.value));
  }

  TEST_CASE("weights") {
    CHECK(*infer_weight(0.25 * 0.03 + 0.75 * -0.01, 0.03, -0.01) == doctest::Approx(0.25));
    CHECK(*infer_weight(0.03, 0.03, 0.0) == doctest::Approx(1.0));
    CHECK_FALSE(infer_weight(0.01, 0.02, 0.02).has_value());
  }

  TEST_CASE("predictive band") {
    const auto p = reference_baseline_params();
    const auto draws = repeated(p, 20000);
    Philox rng(1, 0);
    const auto band = predictive_band(draws, Angle(0.4), 2.0, 0.016, 0.99, rng);
    const double mu = taylor_compensated_mean(p, 0.4, 2.0, 0.016);
    CHECK(band.mean == doctest::Approx(mu).epsilon(1e-12));
    CHECK(band.upper - mu == doctest::Approx(2.5758 * p.sigma).epsilon(0.05));
    CHECK(mu - band.lower == doctest::Approx(2.5758 * p.sigma).epsilon(0.05));
    CHECK(band.level == 0.99);

    Philox a(2, 0), b(2, 0);
    const auto wide = predictive_band(draws, Angle(0.4), 2.0, 0.0, 0.99, a);
    const auto narrow = predictive_band(draws, Angle(0.4), 2.0, 0.0, 0.9, b);
    CHECK(wide.lower < narrow.lower);
    CHECK(wide.upper > narrow.upper);
    CHECK_THROWS_AS(predictive_band(draws, Angle(0.4), 2.0, 0.0, 1.0, a), std::invalid_argument);
    CHECK_THROWS_AS(predictive_band(std::vector<BaselineParams<>>{}, Angle(0.4), 2.0, 0.0, 0.9, a),
                    std::invalid_argument);
  }

  TEST_CASE("bands are calibrated without interference") {
    auto spec = ScenarioSpec::reference_experiment(8);
    spec.params.variant = Variant::kNoInterference;
    spec.points = {1500, 1500, 1500, 1500};
    const auto data = simulate(spec);
    const auto draws = repeated(spec.params.baseline, 1000);
    const auto bands = predictive_bands(draws, data, 0.99, 3);
    const auto verdicts = classify_interference(data, bands);
    CHECK(negligible_fraction(verdicts) == doctest::Approx(0.99).epsilon(0.006));
  }

  TEST_CASE("classification") {
    DeformationDataset data;
    data.observations = {{Angle(0.1), 1.0, 0.0, 0.5}, {Angle(0.2), 1.0, 0.0, 2.5}, {Angle(0.3), 1.0, 0.0, -1.0}};
    std::vector<PredictiveBand> bands;
    for (const auto& obs : data.observations) bands.push_back({obs.theta, 1.0, 0.0, 0.5, 0.0, 1.0});
    const auto v = classify_interference(data, bands);
    CHECK(v[0].verdict == InterferenceClass::kNegligible);
    CHECK(v[0].excess == 0.0);
    CHECK(v[1].verdict == InterferenceClass::kSubstantial);
    CHECK(v[1].excess == doctest::Approx(1.5));
    CHECK(v[2].excess == doctest::Approx(-1.0));
    CHECK(negligible_fraction(v) == doctest::Approx(1.0 / 3));
    bands[1].theta = Angle(0.25);
    CHECK_THROWS_AS(classify_interference(data, bands), std::invalid_argument);
    bands.pop_back();
    CHECK_THROWS_AS(classify_interference(data, bands), std::invalid_argument);
  }

  TEST_CASE("band seeds are per unit") {
    auto spec = ScenarioSpec::reference_experiment(2);
    spec.points = {32, 32, 32, 32};
    const auto data = simulate(spec);
    const auto draws = repeated(reference_baseline_params(), 200);
    const auto a = predictive_bands(draws, data, 0.99, 11);
    const auto b = predictive_bands(draws, data, 0.99, 11);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].upper == b[i].upper);
    Philox rng(11, 5);
    const auto one = predictive_band(draws, data.observations[5].theta, data.observations[5].r0,
                                     data.observations[5].assigned_compensation, 0.99, rng);
    CHECK(one.lower == a[5].lower);
  }

  TEST_CASE("effective treatment estimates") {
    auto spec = ScenarioSpec::reference_experiment(4);
    spec.points = {64, 64, 64, 64};
    spec.params.baseline.sigma = 0.0;
    const auto data = simulate(spec);
    const auto draws = repeated(spec.params.baseline, 50);
    const auto est = estimate_effective_treatments(data, draws);
    REQUIRE(est.size() == data.size());
    for (std::size_t i = 0; i < est.size(); ++i) {
      const auto& obs = data.observations[i];
      const auto& design = data.designs.at(obs.r0);
      const double g = effective_treatment_simple(spec.params.simple_view(), obs.theta, design);
      CHECK(est[i].mean == doctest::Approx(g).epsilon(1e-9));
      CHECK(est[i].lower == doctest::Approx(est[i].upper));
      CHECK(est[i].assigned == obs.assigned_compensation);
      CHECK(est[i].weight.has_value() == (est[i].x_own != est[i].x_neighbor));
      if (est[i].weight) {
        CHECK(*est[i].weight >= -1e-6);
        CHECK(*est[i].weight <= 1 + 1e-6);
      }
    }
  }

  TEST_CASE("residuals at the generating parameters") {
    auto spec = ScenarioSpec::reference_experiment(6);
    spec.points = {400, 400, 400, 400};
    const auto data = simulate(spec);
    const auto ms = spec_for(data, Variant::kSimpleInterference);
    const auto r = residuals(data, draws_at(spec.params, ms, 5), Variant::kSimpleInterference);
    REQUIRE(r.size() == static_cast<Eigen::Index>(data.size()));
    const double sd = std::sqrt((r.array() - r.mean()).square().sum() / double(r.size() - 1));
    CHECK(sd == doctest::Approx(spec.params.baseline.sigma).epsilon(0.06));
    const auto bd = baseline_draws(draws_at(spec.params, ms, 3));
    CHECK(bd.size() == 3);
    CHECK(bd[2].x0 == doctest::Approx(spec.params.baseline.x0).epsilon(1e-14));
    CHECK_THROWS_AS(residuals(data, draws_at(spec.params, ms, 3), Variant::kRefinedInterference),
                    std::invalid_argument);
  }
}
