#include "amcomp/design.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "amcomp/random.hpp"

namespace amcomp {
namespace {

using Square = std::array<std::array<int, 4>, 4>;

// The four reduced 4x4 Latin squares (first row and column in natural order).
std::vector<Square> reduced_squares() {
  std::vector<Square> out;
  Square sq{};
  for (int j = 0; j < 4; ++j) sq[0][j] = j;
  for (int i = 0; i < 4; ++i) sq[i][0] = i;
  // Fill cells (1..3, 1..3) by backtracking.
  auto ok = [&](int r, int c, int v) {
    for (int k = 0; k < c; ++k)
      if (sq[r][k] == v) return false;
    for (int k = 0; k < r; ++k)
      if (sq[k][c] == v) return false;
    return true;
  };
  auto fill = [&](auto&& self, int cell) -> void {
    if (cell == 9) {
      out.push_back(sq);
      return;
    }
    const int r = 1 + cell / 3;
    const int c = 1 + cell % 3;
    for (int v = 0; v < 4; ++v) {
      if (v == sq[r][0] || !ok(r, c, v)) continue;
      sq[r][c] = v;
      self(self, cell + 1);
    }
  };
  fill(fill, 0);
  return out;
}

template <std::size_t N>
void shuffle(std::array<int, N>& a, std::size_t first, Philox& rng) {
  for (std::size_t i = N - 1; i > first; --i) {
    const std::size_t span = i - first + 1;
    const std::size_t j = first + static_cast<std::size_t>(rng() % span);
    std::swap(a[i], a[j]);
  }
}

}  // namespace

BlockingMap BlockingMap::for_layout(const SectionLayout& layout) {
  if (layout.section_count() != 16) {
    throw std::invalid_argument("blocking structure is defined only for 16 sections");
  }
  BlockingMap map;
  map.quadrant.resize(16);
  map.symmetry_group.resize(16);
  for (int s = 0; s < 16; ++s) {
    const int q = s / 4;
    map.quadrant[s] = q;
    // Odd quadrants run mirrored: section 7 reflects section 0 about the y axis.
    map.symmetry_group[s] = (q % 2 == 0) ? s % 4 : 3 - s % 4;
  }
  return map;
}

std::size_t BlockingMap::section(int q, int group) const {
  for (std::size_t s = 0; s < quadrant.size(); ++s) {
    if (quadrant[s] == q && symmetry_group[s] == group) return s;
  }
  throw std::out_of_range("no section for blocking cell");
}

std::vector<DesignViolation> validate_design(const CompensationDesign& design) {
  using Kind = DesignViolation::Kind;
  std::vector<DesignViolation> out;
  const std::size_t n = design.layout.section_count();
  if (design.levels.size() != n) {
    out.push_back({Kind::kShape, design.levels.size(), n,
                   "expected " + std::to_string(n) + " levels, got " +
                       std::to_string(design.levels.size())});
    return out;
  }
  if (!(design.unit_size > 0.0)) {
    out.push_back({Kind::kBadUnitSize, 0, 0, "unit size must be positive"});
  }
  for (std::size_t s = 0; s < n; ++s) {
    if (std::ranges::find(kCompensationLevels, design.levels[s]) == kCompensationLevels.end()) {
      out.push_back({Kind::kBadLevel, s, 0,
                     "section " + std::to_string(s) + " has level " + std::to_string(design.levels[s])});
    }
  }
  if (n == 16) {
    const auto map = BlockingMap::for_layout(design.layout);
    for (int block = 0; block < 4; ++block) {
      std::array<int, 4> in_quadrant{}, in_group{};
      for (std::size_t s = 0; s < n; ++s) {
        const int lv = design.levels[s];
        const auto it = std::ranges::find(kCompensationLevels, lv);
        if (it == kCompensationLevels.end()) continue;
        const auto idx = static_cast<std::size_t>(it - kCompensationLevels.begin());
        if (map.quadrant[s] == block) ++in_quadrant[idx];
        if (map.symmetry_group[s] == block) ++in_group[idx];
      }
      for (std::size_t idx = 0; idx < 4; ++idx) {
        const std::string lv = std::to_string(kCompensationLevels[idx]);
        if (in_quadrant[idx] != 1) {
          out.push_back({Kind::kQuadrantRepeat, static_cast<std::size_t>(block), idx,
                         "level " + lv + " appears " + std::to_string(in_quadrant[idx]) +
                             " times in quadrant " + std::to_string(block)});
        }
        if (in_group[idx] != 1) {
          out.push_back({Kind::kGroupRepeat, static_cast<std::size_t>(block), idx,
                         "level " + lv + " appears " + std::to_string(in_group[idx]) +
                             " times in symmetry group " + std::to_string(block)});
        }
      }
    }
  }
  for (std::size_t s = 0; s < n; ++s) {
    const std::size_t t = design.layout.next(s);
    const int gap = std::abs(design.levels[s] - design.levels[t]);
    if (gap > kMaxNeighborGap) {
      out.push_back({Kind::kNeighborGap, s, t,
                     "sections " + std::to_string(s) + " and " + std::to_string(t) +
                         " differ by " + std::to_string(gap) + " levels"});
    }
  }
  return out;
}

CompensationDesign generate_design(std::uint64_t seed, const SectionLayout& layout, double unit_size,
                                   double nominal_radius) {
  if (layout.section_count() != 16) {
    throw std::invalid_argument("design generation requires a 16-section layout");
  }
  static const std::vector<Square> reduced = reduced_squares();
  const auto map = BlockingMap::for_layout(layout);
  Philox rng(derive_seed(seed, 0x64657369676eull), 0);

  CompensationDesign design{layout, std::vector<int>(16), unit_size, nominal_radius};
  // Reduced square x column permutation x permutation of rows 2..4 is a
  // bijection onto all 576 Latin squares of order 4, so this is uniform.
  for (;;) {
    const Square& base = reduced[rng() % reduced.size()];
    std::array<int, 4> cols{0, 1, 2, 3}, rows{0, 1, 2, 3};
    shuffle(cols, 0, rng);
    shuffle(rows, 1, rng);
    for (int q = 0; q < 4; ++q) {
      for (int g = 0; g < 4; ++g) {
        design.levels[map.section(q, g)] = kCompensationLevels[base[rows[q]][cols[g]]];
      }
    }
    bool adjacent_ok = true;
    for (std::size_t s = 0; s < 16 && adjacent_ok; ++s) {
      adjacent_ok = std::abs(design.levels[s] - design.levels[layout.next(s)]) <= kMaxNeighborGap;
    }
    if (adjacent_ok) return design;
  }
}

double assigned_compensation(const CompensationDesign& design, Angle theta) {
  return design.compensation(design.layout.section_of(theta));
}

double default_unit_size(double nominal_radius) {
  constexpr std::array<std::pair<double, double>, 4> table{
      {{0.5, 0.004}, {1.0, 0.008}, {2.0, 0.016}, {3.0, 0.03}}};
  for (const auto& [r, u] : table) {
    if (std::abs(nominal_radius - r) < 1e-9) return u;
  }
  throw std::invalid_argument("no default compensation unit for radius " + std::to_string(nominal_radius));
}

}  // namespace amcomp
