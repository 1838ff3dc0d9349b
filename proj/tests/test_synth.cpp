#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <cstdio>
#include <numeric>
#include <stdexcept>

#include "amcomp/synth.hpp"

using namespace amcomp;

namespace {

double residual_sd(const DeformationDataset& data, const ModelParams& p) {
  double s = 0, s2 = 0;
  for (const auto& obs : data.observations) {
    const auto it = data.designs.find(obs.r0);
    const double e = obs.deformation - generator_mean(p, obs, it == data.designs.end() ? nullptr : &it->second);
    s += e;
    s2 += e * e;
  }
  const double n = static_cast<double>(data.size());
  return std::sqrt((s2 - s * s / n) / (n - 1));
}

}  // namespace

TEST_SUITE("synth") {
  TEST_CASE("reference scenarios") {
    const auto base = simulate(ScenarioSpec::reference_baseline(1));
    CHECK(base.size() == 2877);
    CHECK(base.designs.empty());
    CHECK(base.radii() == std::vector<double>{0.5, 1.0, 2.0, 3.0});
    for (const auto& obs : base.observations) CHECK(obs.assigned_compensation == 0.0);

    const auto spec = ScenarioSpec::reference_experiment(1);
    const auto exp = simulate(spec);
    CHECK(exp.size() == 24443);
    CHECK(exp.designs.size() == 4);
    for (const auto& [r, d] : exp.designs) {
      CHECK(validate_design(d).empty());
      CHECK(d.unit_size == default_unit_size(r));
    }
    CHECK(residual_sd(exp, spec.params) == doctest::Approx(3.14e-3).epsilon(0.03));
  }

  TEST_CASE("seeded determinism") {
    const auto a = simulate(ScenarioSpec::reference_baseline(5));
    const auto b = simulate(ScenarioSpec::reference_baseline(5));
    const auto c = simulate(ScenarioSpec::reference_baseline(6));
    bool same = true, differ = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
      same = same && a.observations[i].deformation == b.observations[i].deformation;
      differ = differ || a.observations[i].deformation != c.observations[i].deformation;
    }
    CHECK(same);
    CHECK(differ);
    CHECK(ScenarioSpec::reference_experiment(5).designs == ScenarioSpec::reference_experiment(5).designs);
  }

  TEST_CASE("noise level") {
    auto spec = ScenarioSpec::reference_baseline(2);
    const auto data = simulate(spec);
    CHECK(residual_sd(data, spec.params) == doctest::Approx(8.7e-4).epsilon(0.05));
    spec.params.baseline.sigma = 0.0;
    const auto clean = simulate(spec);
    for (const auto& obs : clean.observations) {
      CHECK(obs.deformation == baseline_mean(spec.params.baseline, obs.theta.radians(), obs.r0));
    }
  }

  TEST_CASE("section midpoints receive their own compensation") {
    auto spec = ScenarioSpec::reference_experiment(3);
    spec.points = {64, 64, 64, 64};
    spec.params.baseline.sigma = 0.0;
    const auto data = simulate(spec);
    const SectionLayout layout(16);
    std::size_t midpoints = 0;
    for (const auto& obs : data.observations) {
      const std::size_t s = layout.section_of(obs.theta);
      if (std::abs(obs.theta.radians() - layout.midpoint(s).radians()) > 1e-9) continue;
      ++midpoints;
      const auto& bp = spec.params.baseline;
      const double h = sensitivity(bp, obs.theta.radians(), obs.r0);
      const double g = (obs.deformation - baseline_mean(bp, obs.theta.radians(), obs.r0)) / (1 + h);
      CHECK(g == doctest::Approx(obs.assigned_compensation).epsilon(1e-4));
    }
    CHECK(midpoints == 64);
  }

  TEST_CASE("roughness harmonics") {
    auto spec = ScenarioSpec::reference_baseline(4);
    spec.params.baseline.sigma = 0.0;
    spec.roughness = {{4, 1e-3}};
    const auto data = simulate(spec);
    const auto& obs = data.observations[10];
    CHECK(obs.deformation == doctest::Approx(baseline_mean(spec.params.baseline, obs.theta.radians(), obs.r0) +
                                             1e-3 * std::cos(4 * obs.theta.radians())));
    spec.roughness = {{2, 1e-3}};
    CHECK_THROWS_AS(simulate(spec), std::invalid_argument);
  }

  TEST_CASE("scenario errors") {
    auto spec = ScenarioSpec::reference_experiment(0);
    spec.designs.erase(2.0);
    CHECK_THROWS_AS(simulate(spec), std::invalid_argument);
    spec = ScenarioSpec::reference_experiment(0);
    spec.designs[1.0].levels[0] = 7;
    CHECK_THROWS_AS(simulate(spec), std::invalid_argument);
    spec = ScenarioSpec::reference_baseline(0);
    spec.points.pop_back();
    CHECK_THROWS_AS(simulate(spec), std::invalid_argument);
    spec = ScenarioSpec::reference_experiment(0);
    spec.params.lambda.pop_back();
    CHECK_THROWS_AS(simulate(spec), std::invalid_argument);
  }

  TEST_CASE("unit grid survives text") {
    char buf[40];
    for (const Angle t : unit_grid(707)) {
      std::snprintf(buf, sizeof buf, "%.12g", t.radians());
      CHECK(std::strtod(buf, nullptr) == t.radians());
    }
    CHECK(unit_grid(4)[1].radians() == doctest::Approx(M_PI / 2));
  }
}
