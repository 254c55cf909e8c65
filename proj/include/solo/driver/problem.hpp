#pragma once

#include "solo/core/design.hpp"
#include "solo/nn/mlp.hpp"
#include "solo/sampling/sampling.hpp"

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace solo::driver {

enum class OptimizerKind { gsa, ba, bba };

std::string_view to_string(OptimizerKind k) noexcept;
OptimizerKind optimizer_from_string(std::string_view text);

/// One expensive evaluation. `objective` is what the surrogate learns and the
/// searches minimize (the penalized weight for trusses); for feasible
/// designs it equals the plain objective.
struct Evaluation {
    double objective = 0.0;
    bool feasible = true;
};

using Evaluator = std::function<Evaluation(const DesignVector&)>;

/// Everything the driver needs to know about a benchmark.
struct Problem {
    std::string id;
    std::size_t dim = 0;
    sampling::GridShape shape;
    sampling::SampleSpace space;
    /// Sampling target (equality) and feasibility bound (inequality).
    std::optional<VolumeConstraint> volume;
    sampling::DisturbanceTable table;
    OptimizerKind optimizer = OptimizerKind::gsa;
    /// Objective of the uniform reference design; scales the volume penalty.
    double reference_objective = 1.0;
    Evaluator evaluate; ///< must be safe to call concurrently

    /// Default surrogate and loop sizes.
    std::vector<std::size_t> hidden;
    double dropout = 0.1;
    bool batchnorm = true;
    std::size_t initial_batch = 100;
    std::size_t per_loop = 100;

    /// Maps a point found by a search in [0,1]^N (or on the level set) to a
    /// valid design of this problem's space.
    DesignVector design_from_search(std::span<const double> x) const;
    /// Search-space coordinates of a stored design.
    std::vector<double> search_point(const DesignVector& v) const;
    bool is_discrete() const noexcept { return space.kind == DesignKind::discrete; }
};

/// Known ids: compliance-5, compliance-11, truss-72, truss-432, truss-1008,
/// analytic-smoke, analytic-binary.
Problem make_problem(std::string_view id);
std::vector<std::string> problem_ids();

/// Optimizers whose search space matches the problem's design kind.
bool optimizer_compatible(const Problem& p, OptimizerKind k) noexcept;

} // namespace solo::driver
