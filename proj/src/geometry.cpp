#include "amcomp/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace amcomp {

double wrap_angle(double radians) {
  double r = std::fmod(radians, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  // fmod of a tiny negative value can round up to exactly 2pi.
  if (r >= kTwoPi) r = 0.0;
  return r;
}

double wrap_signed(double radians) {
  double r = wrap_angle(radians);
  return r > std::numbers::pi ? r - kTwoPi : r;
}

double angular_distance(Angle a, Angle b) {
  const double d = std::abs(a.radians() - b.radians());
  return std::min(d, kTwoPi - d);
}

double signed_offset(Angle a, Angle b) { return wrap_signed(a.radians() - b.radians()); }

Angle arc_midpoint(Angle a, Angle b) { return Angle(a.radians() + 0.5 * signed_offset(b, a)); }

SectionLayout::SectionLayout(std::size_t section_count)
    : count_(section_count), width_(kTwoPi / static_cast<double>(section_count)) {
  if (section_count < 4 || section_count % 4 != 0) {
    throw std::invalid_argument("section count must be a positive multiple of 4, got " +
                                std::to_string(section_count));
  }
}

std::size_t SectionLayout::next(std::size_t section) const { return (section + 1) % count_; }

std::size_t SectionLayout::previous(std::size_t section) const {
  return (section + count_ - 1) % count_;
}

bool SectionLayout::adjacent(std::size_t a, std::size_t b) const {
  return next(a) == b || previous(a) == b;
}

std::size_t SectionLayout::section_of(Angle theta) const {
  auto k = static_cast<std::size_t>(theta.radians() / width_);
  // Guard against theta/width rounding up at the top edge or past a boundary.
  if (k >= count_) k = count_ - 1;
  if (static_cast<double>(k) * width_ > theta.radians()) --k;
  return k;
}

Angle SectionLayout::midpoint(std::size_t section) const {
  if (section >= count_) {
    throw std::out_of_range("section " + std::to_string(section) + " outside layout of " +
                            std::to_string(count_));
  }
  return Angle((static_cast<double>(section) + 0.5) * width_);
}

std::size_t SectionLayout::nearest_neighbor_section(Angle theta) const {
  const std::size_t k = section_of(theta);
  return theta.radians() < midpoint(k).radians() ? previous(k) : next(k);
}

}  // namespace amcomp
