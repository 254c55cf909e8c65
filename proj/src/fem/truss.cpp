#include "solo/fem/truss.hpp"

#include "solo/core/error.hpp"
#include "solo/opt/penalty.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

namespace solo::truss {

double TrussModel::bar_length(std::size_t b) const
{
    const Vec3& p = nodes[bars[b].i];
    const Vec3& q = nodes[bars[b].j];
    return std::sqrt((q[0] - p[0]) * (q[0] - p[0]) + (q[1] - p[1]) * (q[1] - p[1]) + (q[2] - p[2]) * (q[2] - p[2]));
}

void TrussModel::validate() const
{
    require(!nodes.empty() && !bars.empty(), "truss needs nodes and bars");
    require(fixed.size() == nodes.size() && loads.size() == nodes.size(), "truss support/load arrays must match nodes");
    require(unit_weight.size() == bars.size(), "truss needs one unit weight per bar");
    require(elastic_modulus > 0.0, "elastic modulus must be positive");
    require(stress_limit > 0.0 && displacement_limit > 0.0, "truss limits must be positive");
    require(!catalog.empty() && catalog.front() > 0.0, "catalog areas must be positive");
    for (std::size_t k = 1; k < catalog.size(); ++k)
        require(catalog[k] > catalog[k - 1], "catalog must be strictly increasing");
    for (std::size_t b = 0; b < bars.size(); ++b) {
        require(bars[b].i < nodes.size() && bars[b].j < nodes.size(), "bar references a missing node");
        require(bar_length(b) > 0.0, "zero-length bar " + std::to_string(b));
    }
    std::size_t restrained = 0;
    for (const auto& f : fixed) restrained += static_cast<std::size_t>(f[0]) + f[1] + f[2];
    require(restrained >= 6, "supports must remove the six rigid-body modes");
}

TrussModel build_tower(std::size_t n_blocks, const TowerParams& params)
{
    require(n_blocks >= 1, "tower needs at least one block");
    TrussModel m;
    const double w = params.bay_width;
    const std::array<std::array<double, 2>, 4> corners{{{0.0, 0.0}, {w, 0.0}, {w, w}, {0.0, w}}};
    for (std::size_t level = 0; level <= n_blocks; ++level)
        for (const auto& c : corners) m.nodes.push_back({c[0], c[1], params.story_height * static_cast<double>(level)});

    auto id = [](std::size_t level, std::size_t corner) { return 4 * level + corner; };
    for (std::size_t s = 0; s < n_blocks; ++s) {
        for (std::size_t c = 0; c < 4; ++c) m.bars.push_back({id(s, c), id(s + 1, c)}); // columns
        for (std::size_t c = 0; c < 4; ++c) {                                          // face X-bracing
            const std::size_t d = (c + 1) % 4;
            m.bars.push_back({id(s, c), id(s + 1, d)});
            m.bars.push_back({id(s, d), id(s + 1, c)});
        }
        for (std::size_t c = 0; c < 4; ++c) m.bars.push_back({id(s + 1, c), id(s + 1, (c + 1) % 4)}); // horizontals
        m.bars.push_back({id(s + 1, 0), id(s + 1, 2)}); // plan diagonals
        m.bars.push_back({id(s + 1, 1), id(s + 1, 3)});
    }

    m.fixed.assign(m.nodes.size(), {false, false, false});
    m.loads.assign(m.nodes.size(), {0.0, 0.0, 0.0});
    for (std::size_t c = 0; c < 4; ++c) {
        m.fixed[id(0, c)] = {true, true, true};
        m.loads[id(n_blocks, c)] = params.top_load;
    }
    m.elastic_modulus = params.elastic_modulus;
    m.unit_weight.assign(m.bars.size(), params.unit_weight);
    m.stress_limit = params.stress_limit;
    m.displacement_limit = params.displacement_limit;
    require(params.catalog_size >= 2 && params.area_max > params.area_min && params.area_min > 0.0,
            "tower catalog needs two or more increasing positive areas");
    for (std::size_t k = 0; k < params.catalog_size; ++k)
        m.catalog.push_back(params.area_min + (params.area_max - params.area_min) * static_cast<double>(k)
                                                  / static_cast<double>(params.catalog_size - 1));
    m.catalog.back() = params.area_max;
    return m;
}

double scale_loads_to_margin(TrussModel& model, double margin)
{
    require(margin > 0.0, "load margin must be positive");
    const auto r = solve_truss(model, std::vector<double>(model.bar_count(), model.catalog.back()));
    const double worst = std::max(r.max_stress_ratio, r.max_displacement_ratio);
    if (!(worst > 0.0)) throw AnalysisError("tower carries no load to scale");
    // the response is linear in the loads
    const double factor = margin / worst;
    for (auto& l : model.loads)
        for (double& x : l) x *= factor;
    return factor;
}

double truss_weight(const TrussModel& model, std::span<const double> areas)
{
    require(areas.size() == model.bar_count(), "one area per bar required");
    double w = 0.0;
    for (std::size_t b = 0; b < areas.size(); ++b) w += areas[b] * model.bar_length(b) * model.unit_weight[b];
    return w;
}

Eigen::MatrixXd assemble_stiffness(const TrussModel& model, std::span<const double> areas)
{
    require(areas.size() == model.bar_count(), "one area per bar required");
    const auto ndof = static_cast<Eigen::Index>(3 * model.node_count());
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(ndof, ndof);
    for (std::size_t b = 0; b < model.bar_count(); ++b) {
        const Vec3& p = model.nodes[model.bars[b].i];
        const Vec3& q = model.nodes[model.bars[b].j];
        const double len = model.bar_length(b);
        const Eigen::Vector3d dir((q[0] - p[0]) / len, (q[1] - p[1]) / len, (q[2] - p[2]) / len);
        const Eigen::Matrix3d kb = (model.elastic_modulus * areas[b] / len) * (dir * dir.transpose());
        const auto i0 = static_cast<Eigen::Index>(3 * model.bars[b].i);
        const auto j0 = static_cast<Eigen::Index>(3 * model.bars[b].j);
        k.block<3, 3>(i0, i0) += kb;
        k.block<3, 3>(j0, j0) += kb;
        k.block<3, 3>(i0, j0) -= kb;
        k.block<3, 3>(j0, i0) -= kb;
    }
    return k;
}

namespace {

std::string dof_name(std::size_t dof)
{
    static const char* axis[] = {"x", "y", "z"};
    return "node " + std::to_string(dof / 3) + " " + axis[dof % 3];
}

} // namespace

TrussResult solve_truss(const TrussModel& model, std::span<const double> areas)
{
    require(areas.size() == model.bar_count(), "one area per bar required");
    const Eigen::MatrixXd k = assemble_stiffness(model, areas);

    std::vector<std::size_t> free;
    for (std::size_t n = 0; n < model.node_count(); ++n)
        for (std::size_t a = 0; a < 3; ++a)
            if (!model.fixed[n][a]) free.push_back(3 * n + a);
    const auto nf = static_cast<Eigen::Index>(free.size());

    Eigen::MatrixXd kff(nf, nf);
    Eigen::VectorXd f(nf);
    for (Eigen::Index r = 0; r < nf; ++r) {
        const std::size_t dr = free[static_cast<std::size_t>(r)];
        f(r) = model.loads[dr / 3][dr % 3];
        for (Eigen::Index c = 0; c < nf; ++c) kff(r, c) = k(static_cast<Eigen::Index>(dr), static_cast<Eigen::Index>(free[static_cast<std::size_t>(c)]));
    }

    Eigen::LDLT<Eigen::MatrixXd> ldlt(kff);
    const Eigen::VectorXd d = ldlt.vectorD();
    const double dmax = d.cwiseAbs().maxCoeff();
    Eigen::Index worst = 0;
    const double dmin = d.minCoeff(&worst);
    if (ldlt.info() != Eigen::Success || !(dmin > 1e-12 * dmax)) {
        // LDLT pivots symmetrically; map the failing pivot back to its DOF
        Eigen::VectorXi perm = ldlt.transpositionsP() * Eigen::VectorXi::LinSpaced(nf, 0, static_cast<int>(nf) - 1);
        const auto dof = free[static_cast<std::size_t>(perm(worst))];
        throw AnalysisError("singular truss stiffness (mechanism); unconstrained DOF near " + dof_name(dof));
    }
    const Eigen::VectorXd uf = ldlt.solve(f);

    TrussResult res;
    res.displacements.assign(model.node_count(), {0.0, 0.0, 0.0});
    for (Eigen::Index r = 0; r < nf; ++r) {
        const std::size_t dr = free[static_cast<std::size_t>(r)];
        res.displacements[dr / 3][dr % 3] = uf(r);
    }
    res.stresses.resize(model.bar_count());
    for (std::size_t b = 0; b < model.bar_count(); ++b) {
        const Vec3& p = model.nodes[model.bars[b].i];
        const Vec3& q = model.nodes[model.bars[b].j];
        const Vec3& up = res.displacements[model.bars[b].i];
        const Vec3& uq = res.displacements[model.bars[b].j];
        const double len = model.bar_length(b);
        double elong = 0.0;
        for (int a = 0; a < 3; ++a) elong += (q[a] - p[a]) / len * (uq[a] - up[a]);
        res.stresses[b] = model.elastic_modulus * elong / len;
    }

    res.weight = truss_weight(model, areas);
    const std::vector<double> amax(model.bar_count(), model.catalog.back());
    res.weight_ratio = res.weight / truss_weight(model, amax);
    for (double s : res.stresses) res.max_stress_ratio = std::max(res.max_stress_ratio, std::abs(s) / model.stress_limit);
    for (const auto& u : res.displacements)
        res.max_displacement_ratio = std::max(res.max_displacement_ratio,
                                              std::max({std::abs(u[0]), std::abs(u[1]), std::abs(u[2])}) / model.displacement_limit);
    res.feasible = res.max_stress_ratio <= 1.0 && res.max_displacement_ratio <= 1.0;
    res.penalized = opt::penalize_truss(res.weight_ratio, res.stresses, res.displacements, model.stress_limit,
                                        model.displacement_limit);
    return res;
}

TrussResult solve_truss(const TrussModel& model, const DesignVector& areas)
{
    require(areas.kind() == DesignKind::discrete, "truss areas must be a discrete design");
    for (double a : areas.values())
        require(std::binary_search(model.catalog.begin(), model.catalog.end(), a), "area not in the model catalog");
    return solve_truss(model, areas.values());
}

TrussObjective truss_objective(const TrussModel& model, const DesignVector& areas)
{
    const TrussResult r = solve_truss(model, areas);
    return {r.weight_ratio, r.penalized};
}

std::vector<double> normalized_catalog(std::size_t catalog_size)
{
    require(catalog_size >= 1, "empty catalog");
    std::vector<double> out(catalog_size, 0.0);
    for (std::size_t k = 0; k < catalog_size && catalog_size > 1; ++k)
        out[k] = static_cast<double>(k) / static_cast<double>(catalog_size - 1);
    return out;
}

DesignVector areas_from_normalized(const TrussModel& model, std::span<const double> normalized)
{
    const auto grid = normalized_catalog(model.catalog.size());
    std::vector<double> areas(normalized.size());
    for (std::size_t i = 0; i < normalized.size(); ++i)
        areas[i] = model.catalog[nearest_catalog_index(grid, normalized[i])];
    return DesignVector::discrete(std::move(areas), model.catalog);
}

std::vector<double> normalized_from_areas(const TrussModel& model, const DesignVector& areas)
{
    const auto grid = normalized_catalog(model.catalog.size());
    std::vector<double> out(areas.size());
    for (std::size_t i = 0; i < areas.size(); ++i) out[i] = grid[nearest_catalog_index(model.catalog, areas[i])];
    return out;
}

void write_model_json(std::ostream& out, const TrussModel& model)
{
    nlohmann::json j;
    j["nodes"] = model.nodes;
    nlohmann::json bars = nlohmann::json::array();
    for (const auto& b : model.bars) bars.push_back({b.i, b.j});
    j["bars"] = bars;
    j["supports"] = model.fixed;
    j["loads"] = model.loads;
    j["elastic_modulus"] = model.elastic_modulus;
    j["unit_weight"] = model.unit_weight;
    j["catalog"] = model.catalog;
    j["stress_limit"] = model.stress_limit;
    j["displacement_limit"] = model.displacement_limit;
    out << j.dump(1) << '\n';
}

TrussModel read_model_json(std::istream& in)
{
    TrussModel m;
    try {
        const nlohmann::json j = nlohmann::json::parse(in);
        m.nodes = j.at("nodes").get<std::vector<Vec3>>();
        for (const auto& b : j.at("bars")) m.bars.push_back({b.at(0).get<std::size_t>(), b.at(1).get<std::size_t>()});
        m.fixed = j.at("supports").get<std::vector<std::array<bool, 3>>>();
        m.loads = j.at("loads").get<std::vector<Vec3>>();
        m.elastic_modulus = j.at("elastic_modulus").get<double>();
        m.unit_weight = j.at("unit_weight").get<std::vector<double>>();
        m.catalog = j.at("catalog").get<std::vector<double>>();
        m.stress_limit = j.at("stress_limit").get<double>();
        m.displacement_limit = j.at("displacement_limit").get<double>();
    }
    catch (const nlohmann::json::exception& e) {
        throw ContractViolation(std::string("truss model json: ") + e.what());
    }
    m.validate();
    return m;
}

} // namespace solo::truss
