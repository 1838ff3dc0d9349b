#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "amcomp/geometry.hpp"
#include "amcomp/random.hpp"

using namespace amcomp;
using std::numbers::pi;

TEST_SUITE("geometry") {
  TEST_CASE("angles are canonical") {
    CHECK(Angle(0.0).radians() == 0.0);
    CHECK(Angle(2 * pi).radians() == doctest::Approx(0.0));
    CHECK(Angle(-0.1).radians() == doctest::Approx(2 * pi - 0.1));
    CHECK(Angle(7 * pi).radians() == doctest::Approx(pi));
    CHECK(Angle(-1e-18).radians() < 2 * pi);
    CHECK(wrap_signed(pi) == doctest::Approx(pi));
    CHECK(wrap_signed(-pi) == doctest::Approx(pi));
    CHECK(wrap_signed(1.5 * pi) == doctest::Approx(-0.5 * pi));
  }

  TEST_CASE("section_of") {
    const SectionLayout layout(16);
    CHECK(layout.section_width() == doctest::Approx(pi / 8));
    CHECK(layout.section_of(Angle(0.0)) == 0);
    CHECK(layout.section_of(Angle(pi / 16)) == 0);
    CHECK(layout.section_of(Angle(15.99 * pi / 8)) == 15);
    CHECK(layout.section_of(Angle(pi / 8)) == 1);
  }

  TEST_CASE("sections tile the circle") {
    const SectionLayout layout(16);
    for (int k = 0; k < 20000; ++k) {
      const Angle t(2 * pi * k / 20000.0);
      const auto s = layout.section_of(t);
      REQUIRE(s < 16);
      CHECK(t.radians() >= s * layout.section_width() - 1e-12);
      CHECK(t.radians() < (s + 1) * layout.section_width() + 1e-12);
    }
  }

  TEST_CASE("midpoint") {
    const SectionLayout layout(16);
    CHECK(layout.midpoint(0).radians() == doctest::Approx(pi / 16));
    CHECK(layout.midpoint(8).radians() == doctest::Approx(17 * pi / 16));
    CHECK(layout.midpoint(15).radians() == doctest::Approx(31 * pi / 16));
    CHECK_THROWS_AS(layout.midpoint(16), std::out_of_range);
  }

  TEST_CASE("nearest neighbor") {
    const SectionLayout layout(16);
    CHECK(layout.nearest_neighbor_section(Angle(pi / 8 - 0.001)) == 1);
    CHECK(layout.nearest_neighbor_section(Angle(0.001)) == 15);
    CHECK(layout.nearest_neighbor_section(Angle(pi / 16)) == 1);
    CHECK(layout.nearest_neighbor_section(Angle(31 * pi / 16)) == 0);
    for (int k = 0; k < 5000; ++k) {
      const Angle t(2 * pi * (k + 0.37) / 5000.0);
      CHECK(layout.adjacent(layout.section_of(t), layout.nearest_neighbor_section(t)));
    }
  }

  TEST_CASE("angular distance") {
    CHECK(angular_distance(Angle(0.0), Angle(2 * pi - 0.1)) == doctest::Approx(0.1));
    CHECK(angular_distance(Angle(pi / 2), Angle(pi / 2)) == 0.0);
    CHECK(angular_distance(Angle(0.0), Angle(pi)) == doctest::Approx(pi));
    Philox rng(11, 0);
    for (int i = 0; i < 2000; ++i) {
      const double x = 20 * uniform01(rng) - 10, y = 20 * uniform01(rng) - 10, z = 20 * uniform01(rng) - 10;
      const Angle a(x), b(y), c(z);
      const double ab = angular_distance(a, b);
      CHECK(ab >= 0.0);
      CHECK(ab <= pi + 1e-15);
      CHECK(ab == doctest::Approx(angular_distance(b, a)).epsilon(1e-12));
      CHECK(ab <= angular_distance(a, c) + angular_distance(c, b) + 1e-12);
      CHECK(angular_distance(Angle(x + 2 * pi), b) == doctest::Approx(ab).epsilon(1e-9));
    }
  }

  TEST_CASE("arc midpoint wraps") {
    CHECK(arc_midpoint(Angle(pi / 16), Angle(31 * pi / 16)).radians() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(arc_midpoint(Angle(pi / 16), Angle(3 * pi / 16)).radians() == doctest::Approx(pi / 8));
    CHECK(signed_offset(Angle(0.1), Angle(2 * pi - 0.1)) == doctest::Approx(0.2));
  }

  TEST_CASE("layout validation") {
    CHECK_THROWS_AS(SectionLayout(6), std::invalid_argument);
    CHECK_THROWS_AS(SectionLayout(0), std::invalid_argument);
    CHECK_NOTHROW(SectionLayout(128));
    const SectionLayout layout(16);
    CHECK(layout.next(15) == 0);
    CHECK(layout.previous(0) == 15);
    CHECK(layout.adjacent(0, 15));
    CHECK_FALSE(layout.adjacent(0, 2));
  }
}
