#pragma once

#include "solo/core/design.hpp"
#include "solo/opt/objective.hpp"

#include <array>
#include <span>

namespace solo::opt {

/// h(rho) = f(rho) + c (w.rho - V0)^2
Objective penalize_volume(Objective f, VolumeConstraint c, double penalty_c);

/// h = W (1 + sum_{|s|>s0} (|s| - s0)/s0 + sum_{|u|inf>d0} (|u|inf - d0)/d0)^2
/// Only violating bars and nodes contribute; with no violation h = W.
double penalize_truss(double weight, std::span<const double> stresses,
                      std::span<const std::array<double, 3>> displacements, double stress_limit,
                      double displacement_limit);

} // namespace solo::opt
