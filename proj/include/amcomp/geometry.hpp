#pragma once

#include <cstddef>
#include <numbers>

namespace amcomp {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Wraps an angle into [0, 2pi).
double wrap_angle(double radians);

/// Wraps an angle difference into (-pi, pi].
double wrap_signed(double radians);

/// A position on the product boundary. Always stored in [0, 2pi).
class Angle {
 public:
  constexpr Angle() = default;
  explicit Angle(double radians) : radians_(wrap_angle(radians)) {}

  double radians() const { return radians_; }

  friend bool operator==(Angle, Angle) = default;

 private:
  double radians_ = 0.0;
};

/// Shortest arc length between two boundary positions, in [0, pi].
double angular_distance(Angle a, Angle b);

/// Signed offset a - b taken along the shorter arc, in (-pi, pi].
double signed_offset(Angle a, Angle b);

/// Midpoint of the shorter arc joining a and b.
Angle arc_midpoint(Angle a, Angle b);

/// Equal-width partition of the circle into sections with cyclic neighbors.
///
/// Section k covers [k w, (k+1) w) with w = 2pi / section_count. The count
/// must be at least 4 and divisible by 4 so that quadrant blocking is defined.
class SectionLayout {
 public:
  explicit SectionLayout(std::size_t section_count = 16);

  std::size_t section_count() const { return count_; }
  double section_width() const { return width_; }

  std::size_t next(std::size_t section) const;
  std::size_t previous(std::size_t section) const;
  bool adjacent(std::size_t a, std::size_t b) const;

  /// Section containing theta.
  std::size_t section_of(Angle theta) const;

  /// Center of a section. Throws std::out_of_range for a bad index.
  Angle midpoint(std::size_t section) const;

  /// Neighbor of section_of(theta) whose midpoint is closest to theta.
  /// A unit exactly at its section midpoint resolves to the next
  /// (counter-clockwise) section.
  std::size_t nearest_neighbor_section(Angle theta) const;

  friend bool operator==(const SectionLayout&, const SectionLayout&) = default;

 private:
  std::size_t count_;
  double width_;
};

}  // namespace amcomp
