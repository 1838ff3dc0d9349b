#include "amcomp/dataset.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "amcomp/model.hpp"

namespace amcomp {

std::vector<double> DeformationDataset::radii() const {
  std::vector<double> r;
  for (const auto& obs : observations) r.push_back(obs.r0);
  std::ranges::sort(r);
  const auto dup = std::ranges::unique(r);
  r.erase(dup.begin(), dup.end());
  return r;
}

const CompensationDesign& DeformationDataset::design_for(double r0) const {
  const auto it = designs.find(r0);
  if (it == designs.end()) {
    throw std::out_of_range("no compensation design attached for radius " + radius_label(r0));
  }
  return it->second;
}

}  // namespace amcomp
