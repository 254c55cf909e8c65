#pragma once

#include "solo/core/rng.hpp"
#include "solo/opt/objective.hpp"
#include "solo/opt/trace.hpp"

#include <cstddef>
#include <vector>

namespace solo::opt {

struct BaConfig {
    std::size_t population = 40;
    double q_min = 0.0;
    double q_max = 2.0;
    std::size_t t_max = 500;
    double alpha = 0.9;   ///< loudness decay A(t) = alpha^t A0
    double gamma = 0.9;   ///< pulse rate r(t) = r0 (1 - e^(-gamma t))
    double r0 = 0.5;
    double a0 = 1.0;
    double w_init = 0.9;
    double w_final = 0.4;
    std::size_t max_evaluations = 0; ///< 0 = unbounded
    std::size_t top_k = 10;
    /// Starting positions for the first bats; the rest start at random.
    std::vector<std::vector<double>> seeds;

    void validate() const;
};

struct BbaConfig {
    std::size_t population = 40;
    double q_min = 0.0;
    double q_max = 2.0;
    std::size_t t_max = 500;
    double alpha = 0.9;
    double gamma = 0.9;
    double r0 = 0.5;
    double a0 = 1.0;
    std::size_t max_evaluations = 0;
    std::size_t top_k = 10;

    void validate() const;
};

/// w(t) = (1 - t/t_max)^2 (w_init - w_final) + w_final
double ba_inertia(std::size_t t, const BaConfig& cfg);

/// Continuous box [0,1]^n, or a sorted list of admissible coordinate values
/// (candidates are snapped to the nearest one before evaluation).
struct SearchSpace {
    std::vector<double> levels; ///< empty = continuous

    static SearchSpace continuous() { return {}; }
    static SearchSpace discrete(std::vector<double> levels);
    bool is_discrete() const noexcept { return !levels.empty(); }
    double snap(double x) const;
};

SearchResult ba_minimize(const Objective& h, std::size_t n, const BaConfig& cfg, const SearchSpace& space,
                         RngStream& rng);

/// V = |(2/pi) atan((pi/2) v)| + 1/N
double bba_transfer(double v, std::size_t n);

SearchResult bba_minimize(const Objective& h, std::size_t n, const BbaConfig& cfg, RngStream& rng);

} // namespace solo::opt
