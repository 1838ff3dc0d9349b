#pragma once

#include <map>
#include <vector>

#include "amcomp/design.hpp"
#include "amcomp/geometry.hpp"

namespace amcomp {

/// One measured unit: the deformation observed at theta on a cylinder of
/// nominal radius r0 that was assigned a compensation (inches).
struct Observation {
  Angle theta;
  double r0 = 0.0;
  double assigned_compensation = 0.0;
  double deformation = 0.0;
};

/// Observations for one or more cylinders. Interference models also need the
/// compensation design of each cylinder, keyed by nominal radius.
struct DeformationDataset {
  std::vector<Observation> observations;
  std::map<double, CompensationDesign> designs;

  /// Distinct radii in ascending order.
  std::vector<double> radii() const;

  std::size_t size() const { return observations.size(); }
  bool empty() const { return observations.empty(); }

  /// Design for a cylinder; throws std::out_of_range if none is attached.
  const CompensationDesign& design_for(double r0) const;
};

}  // namespace amcomp
