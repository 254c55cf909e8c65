#pragma once

#include "solo/core/rng.hpp"
#include "solo/opt/objective.hpp"
#include "solo/opt/trace.hpp"

#include <cstddef>
#include <vector>

namespace solo::opt {

/// Generalized simulated annealing parameters. Defaults are the usual
/// dual-annealing library defaults.
struct GsaConfig {
    double initial_temperature = 5230.0;
    std::size_t t_max = 1000;          ///< temperature steps
    double qv = 2.62;                  ///< visiting parameter, 1 < qv < 3
    double qa = -5.0;                  ///< acceptance parameter
    bool local_search = true;
    double restart_ratio = 2e-5;       ///< restart when T < ratio * T0
    std::size_t max_evaluations = 0;   ///< 0 = unbounded
    std::size_t top_k = 10;

    void validate() const;
};

/// T(t) = T0 (2^(qv-1) - 1) / ((1 + t)^(qv-1) - 1), t >= 1.
double gsa_temperature(std::size_t t, const GsaConfig& cfg);

/// Acceptance probability min{1, [1 - (1-qa) (t/T) dE]^(1/(1-qa))},
/// zero when the bracket is not positive.
double gsa_acceptance_probability(double delta_e, std::size_t t, double temperature, double qa);

/// Draws against gsa_acceptance_probability; improvements always pass.
bool gsa_acceptance(double delta_e, std::size_t t, double temperature, double qa, RngStream& rng);

/// N-vector from the Tsallis visiting distribution at temperature T: a
/// scaled Gaussian over a power of an independent |Gaussian|. Widths scale
/// as T^(1/(3-qv)).
std::vector<double> tsallis_visit_sample(double temperature, double qv, std::size_t n, RngStream& rng);

/// Reflect a coordinate into [0, 1].
double reflect_unit(double x);

/// Anneals over [0,1]^n, then refines the incumbent with a coordinate
/// pattern search (step 0.1 halving down to 1e-4).
/// Throws SearchError when h returns a non-finite value.
SearchResult gsa_minimize(const Objective& h, std::size_t n, const GsaConfig& cfg, RngStream& rng);

} // namespace solo::opt
