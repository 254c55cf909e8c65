#pragma once

#include "solo/core/design.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace solo::truss {

using Vec3 = std::array<double, 3>;

struct Bar {
    std::size_t i = 0;
    std::size_t j = 0;
};

/// Pin-jointed 3D truss with a discrete catalog of admissible bar areas.
struct TrussModel {
    std::vector<Vec3> nodes;
    std::vector<Bar> bars;
    std::vector<std::array<bool, 3>> fixed; ///< per-node, per-DOF support flags
    std::vector<Vec3> loads;                ///< per-node force
    double elastic_modulus = 1.0e4;
    std::vector<double> unit_weight;        ///< per bar
    std::vector<double> catalog;            ///< admissible areas a_1 < ... < a_K
    double stress_limit = 25.0;
    double displacement_limit = 0.25;

    std::size_t node_count() const noexcept { return nodes.size(); }
    std::size_t bar_count() const noexcept { return bars.size(); }
    double bar_length(std::size_t b) const;

    /// Throws ContractViolation on zero-length bars, inconsistent sizes,
    /// a non-increasing catalog or fewer than six restrained DOFs.
    void validate() const;
};

/// Geometry, material and load case for the repeated-block tower.
/// Defaults follow the classic 72-bar benchmark family (inch-kip units).
struct TowerParams {
    double bay_width = 120.0;
    double story_height = 60.0;
    double elastic_modulus = 1.0e4;
    double unit_weight = 0.1;
    double stress_limit = 25.0;
    double displacement_limit = 0.25;
    Vec3 top_load{5.0, 5.0, -5.0}; ///< applied at each of the four top nodes
    double area_min = 0.2;
    double area_max = 2.0;
    std::size_t catalog_size = 16;
};

/// Square 4-column tower of `n_blocks` stories: 18 bars and 4 nodes per
/// story (4 columns, 8 face diagonals, 4 horizontals, 2 plan diagonals),
/// base nodes fully fixed, loads on the top nodes.
TrussModel build_tower(std::size_t n_blocks, const TowerParams& params = {});

/// Scales every load so the all-a_K design reaches `margin` of its tightest
/// limit (stress or displacement). Tall towers would otherwise have no
/// feasible catalog design at all. Returns the applied factor.
double scale_loads_to_margin(TrussModel& model, double margin);

struct TrussResult {
    std::vector<Vec3> displacements;
    std::vector<double> stresses;
    double weight = 0.0;
    double weight_ratio = 0.0;         ///< W / W(all bars at a_K)
    double max_stress_ratio = 0.0;     ///< max |sigma| / sigma0
    double max_displacement_ratio = 0.0; ///< max ||u||_inf / delta0
    double penalized = 0.0;            ///< h from penalize_truss on the weight ratio
    bool feasible = true;
};

/// Total weight sum a_i L_i gamma_i.
double truss_weight(const TrussModel& model, std::span<const double> areas);

/// Direct-stiffness linear analysis for the given bar areas.
/// Throws AnalysisError on a singular (mechanism) stiffness matrix.
TrussResult solve_truss(const TrussModel& model, std::span<const double> areas);
TrussResult solve_truss(const TrussModel& model, const DesignVector& areas);

/// Assembled global stiffness before support elimination (3n x 3n).
Eigen::MatrixXd assemble_stiffness(const TrussModel& model, std::span<const double> areas);

struct TrussObjective {
    double weight_ratio;
    double penalized;
};
TrussObjective truss_objective(const TrussModel& model, const DesignVector& areas);

/// Catalog index <-> normalized coordinate k / (K - 1) used by the searches.
std::vector<double> normalized_catalog(std::size_t catalog_size);
DesignVector areas_from_normalized(const TrussModel& model, std::span<const double> normalized);
std::vector<double> normalized_from_areas(const TrussModel& model, const DesignVector& areas);

/// JSON with nodes, bars, supports, loads, catalog and material data.
void write_model_json(std::ostream& out, const TrussModel& model);
TrussModel read_model_json(std::istream& in);

} // namespace solo::truss
