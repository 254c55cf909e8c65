#include "solo/opt/penalty.hpp"

#include "solo/core/error.hpp"

#include <cmath>

namespace solo::opt {

Objective penalize_volume(Objective f, VolumeConstraint c, double penalty_c)
{
    require(penalty_c > 0.0, "penalize_volume: penalty constant must be positive");
    return [f = std::move(f), c = std::move(c), penalty_c](std::span<const double> x) {
        const double r = c.residual(x);
        return f(x) + penalty_c * r * r;
    };
}

double penalize_truss(double weight, std::span<const double> stresses, std::span<const std::array<double, 3>> displacements,
                      double stress_limit, double displacement_limit)
{
    require(stress_limit > 0.0 && displacement_limit > 0.0, "penalize_truss: limits must be positive");
    double factor = 1.0;
    for (double s : stresses) {
        const double a = std::abs(s);
        if (a > stress_limit) factor += (a - stress_limit) / stress_limit;
    }
    for (const auto& u : displacements) {
        const double m = std::max({std::abs(u[0]), std::abs(u[1]), std::abs(u[2])});
        if (m > displacement_limit) factor += (m - displacement_limit) / displacement_limit;
    }
    return weight * factor * factor;
}

} // namespace solo::opt
