#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "amcomp/geometry.hpp"

namespace amcomp {

/// Compensation levels available to the restricted Latin square design.
inline constexpr std::array<int, 4> kCompensationLevels{-1, 0, 1, 2};

/// Largest allowed level difference between neighboring sections.
inline constexpr int kMaxNeighborGap = 2;

/// Quadrant (row) and symmetry group (column) of each section.
///
/// The symmetry group collects the sections whose midpoints are the axis
/// reflections theta, pi - theta, pi + theta, 2pi - theta of each other.
struct BlockingMap {
  std::vector<int> quadrant;
  std::vector<int> symmetry_group;

  /// Blocking for a 16-section layout.
  static BlockingMap for_layout(const SectionLayout& layout);

  /// Section in the given (quadrant, symmetry group) cell.
  std::size_t section(int quadrant, int group) const;
};

/// Per-section compensation levels for one cylinder.
struct CompensationDesign {
  SectionLayout layout{16};
  std::vector<int> levels = std::vector<int>(16, 0);
  double unit_size = 0.0;       ///< inches per level
  double nominal_radius = 0.0;  ///< inches

  int level(std::size_t section) const { return levels.at(section); }
  double compensation(std::size_t section) const { return levels.at(section) * unit_size; }

  friend bool operator==(const CompensationDesign&, const CompensationDesign&) = default;
};

struct DesignViolation {
  enum class Kind { kQuadrantRepeat, kGroupRepeat, kNeighborGap, kBadLevel, kBadUnitSize, kShape };
  Kind kind;
  std::size_t first = 0;   ///< quadrant, group, or section depending on kind
  std::size_t second = 0;  ///< neighbor section for kNeighborGap
  std::string message;
};

/// Every Latin, adjacency, and shape violation in the design. Empty when valid.
std::vector<DesignViolation> validate_design(const CompensationDesign& design);

/// Uniform draw from the valid restricted Latin square designs.
///
/// Draws uniformly over all 4x4 Latin squares on the (quadrant, group) table
/// and rejects those with a neighbor gap above two, including the wraparound
/// pair. Throws std::invalid_argument unless the layout has 16 sections.
CompensationDesign generate_design(std::uint64_t seed, const SectionLayout& layout = SectionLayout{16},
                                   double unit_size = 1.0, double nominal_radius = 1.0);

/// Physical compensation (inches) assigned to the section containing theta.
double assigned_compensation(const CompensationDesign& design, Angle theta);

/// Compensation unit used for a cylinder of the given radius in the
/// reference experiment (0.004, 0.008, 0.016, 0.03 inch).
/// Throws std::invalid_argument for other radii.
double default_unit_size(double nominal_radius);

}  // namespace amcomp
