#include "solo/driver/problem.hpp"

#include "solo/core/error.hpp"
#include "solo/fem/compliance.hpp"
#include "solo/fem/truss.hpp"

#include <algorithm>
#include <memory>

namespace solo::driver {

std::string_view to_string(OptimizerKind k) noexcept
{
    switch (k) {
    case OptimizerKind::gsa: return "gsa";
    case OptimizerKind::ba: return "ba";
    case OptimizerKind::bba: return "bba";
    }
    return "gsa";
}

OptimizerKind optimizer_from_string(std::string_view text)
{
    if (text == "gsa") return OptimizerKind::gsa;
    if (text == "ba") return OptimizerKind::ba;
    if (text == "bba") return OptimizerKind::bba;
    throw ContractViolation("unknown optimizer '" + std::string(text) + "'");
}

DesignVector Problem::design_from_search(std::span<const double> x) const
{
    require(x.size() == dim, "design_from_search: wrong length");
    std::vector<double> v(x.begin(), x.end());
    switch (space.kind) {
    case DesignKind::continuous:
        for (auto& e : v) e = std::clamp(e, 0.0, 1.0);
        // searches only penalize the volume; project back when over the bound
        if (volume && volume->residual(v) > 0.0) v = enforce_volume_constraint(v, *volume);
        return DesignVector::continuous(std::move(v));
    case DesignKind::binary:
        for (auto& e : v) e = e >= 0.5 ? 1.0 : 0.0;
        return DesignVector::binary(std::move(v));
    case DesignKind::discrete:
        for (auto& e : v) e = space.catalog[nearest_catalog_index(space.catalog, e)];
        return DesignVector::discrete(std::move(v), space.catalog);
    }
    throw ContractViolation("unknown design kind");
}

std::vector<double> Problem::search_point(const DesignVector& v) const { return v.data(); }

bool optimizer_compatible(const Problem& p, OptimizerKind k) noexcept
{
    switch (p.space.kind) {
    case DesignKind::continuous: return k == OptimizerKind::gsa || k == OptimizerKind::ba;
    case DesignKind::binary: return k == OptimizerKind::bba;
    case DesignKind::discrete: return k == OptimizerKind::ba;
    }
    return false;
}

namespace {

Problem compliance_problem(std::size_t n)
{
    auto ev = std::make_shared<const compliance::ComplianceEvaluator>(compliance::ComplianceProblem::square(n));
    Problem p;
    p.id = "compliance-" + std::to_string(n);
    p.dim = n * n;
    p.shape = sampling::GridShape::grid(n, n);
    p.space.kind = DesignKind::continuous;
    p.volume = compliance::volume_weights(ev->problem());
    p.table = sampling::DisturbanceTable::compliance();
    p.optimizer = OptimizerKind::gsa;
    p.reference_objective = 1.0;
    const VolumeConstraint bound = *p.volume;
    p.evaluate = [ev, bound](const DesignVector& v) {
        return Evaluation{ev->solve(v).ratio, bound.satisfied(v.values())};
    };
    p.hidden = {256, 512, 256};
    p.initial_batch = 100;
    p.per_loop = 100;
    return p;
}

Problem truss_problem(std::size_t bars, std::size_t initial)
{
    auto tower = truss::build_tower(bars / 18);
    truss::scale_loads_to_margin(tower, 0.5);
    auto model = std::make_shared<const truss::TrussModel>(std::move(tower));
    Problem p;
    p.id = "truss-" + std::to_string(bars);
    p.dim = bars;
    p.shape = sampling::GridShape::flat(bars);
    p.space.kind = DesignKind::discrete;
    p.space.catalog = truss::normalized_catalog(model->catalog.size());
    p.table = sampling::DisturbanceTable::truss();
    p.optimizer = OptimizerKind::ba;
    p.reference_objective = 1.0;
    p.evaluate = [model](const DesignVector& v) {
        const auto r = truss::solve_truss(*model, truss::areas_from_normalized(*model, v.values()));
        return Evaluation{r.penalized, r.feasible};
    };
    p.hidden = {256, bars >= 1008 ? std::size_t{1024} : std::size_t{512}, 256};
    p.initial_batch = initial;
    p.per_loop = initial / 10;
    return p;
}

Problem analytic_smoke()
{
    Problem p;
    p.id = "analytic-smoke";
    p.dim = 5;
    p.shape = sampling::GridShape::grid(5, 1);
    p.space.kind = DesignKind::continuous;
    p.table = {{{sampling::Operator::mutation, 1, 0.5},
                {sampling::Operator::crossover, 0, 0.2},
                {sampling::Operator::random, 0, 0.3}}};
    p.optimizer = OptimizerKind::gsa;
    p.evaluate = [](const DesignVector& v) {
        double s = 1.0;
        for (double x : v.values()) s += (x - 0.3) * (x - 0.3);
        return Evaluation{s, true};
    };
    p.reference_objective = 1.0;
    p.hidden = {64, 64};
    p.batchnorm = false;
    p.initial_batch = 100;
    p.per_loop = 50;
    return p;
}

// 4x4 binary grid; F = 1 + Hamming distance to a fixed target pattern
Problem analytic_binary()
{
    Problem p;
    p.id = "analytic-binary";
    p.dim = 16;
    p.shape = sampling::GridShape::grid(4, 4);
    p.space.kind = DesignKind::binary;
    p.space.binary_init = sampling::BinaryInit::one_hot;
    p.table = sampling::DisturbanceTable::compliance();
    p.optimizer = OptimizerKind::bba;
    static const std::vector<double> target{1, 0, 0, 1, 0, 1, 1, 0, 0, 1, 1, 0, 1, 0, 0, 1};
    p.evaluate = [](const DesignVector& v) {
        double s = 1.0;
        for (std::size_t i = 0; i < v.size(); ++i) s += (v[i] - target[i]) * (v[i] - target[i]);
        return Evaluation{s, true};
    };
    p.reference_objective = 1.0;
    p.hidden = {64, 64};
    p.initial_batch = 17;
    p.per_loop = 10;
    return p;
}

} // namespace

Problem make_problem(std::string_view id)
{
    if (id == "compliance-5") return compliance_problem(5);
    if (id == "compliance-11") return compliance_problem(11);
    if (id == "truss-72") return truss_problem(72, 100);
    if (id == "truss-432") return truss_problem(432, 500);
    if (id == "truss-1008") return truss_problem(1008, 1000);
    if (id == "analytic-smoke") return analytic_smoke();
    if (id == "analytic-binary") return analytic_binary();
    throw ContractViolation("unknown problem '" + std::string(id) + "'");
}

std::vector<std::string> problem_ids()
{
    return {"compliance-5", "compliance-11", "truss-72", "truss-432", "truss-1008", "analytic-smoke", "analytic-binary"};
}

} // namespace solo::driver
