#pragma once

#include "solo/core/design.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace solo::compliance {

/// SIMP law  Y(rho) = Y0 rho^3 + eps (1 - rho^3).
double simp_modulus(double rho, double y0, double eps_y);

/// Regular nx-by-ny node grid of bilinear plane-stress quads over
/// [0, width] x [0, height]. Node (i, j) has index j * nx + i with j = 0 the
/// bottom row; DOFs are (2k, 2k+1) = (u_x, u_y).
struct QuadMesh {
    std::size_t nx = 5;
    std::size_t ny = 5;
    double width = 1.0;
    double height = 1.0;

    std::size_t node_count() const noexcept { return nx * ny; }
    std::size_t dof_count() const noexcept { return 2 * nx * ny; }
    std::size_t node(std::size_t i, std::size_t j) const noexcept { return j * nx + i; }
    double dx() const noexcept { return width / static_cast<double>(nx - 1); }
    double dy() const noexcept { return height / static_cast<double>(ny - 1); }
};

struct Material {
    double y0 = 1.0;
    double eps_y = 1e-6;
    double poisson = 0.3;
    double thickness = 1.0;
};

/// Boundary conditions and nodal loads for a plane-stress solve.
struct LoadCase {
    std::vector<std::size_t> fixed_dofs;
    Eigen::VectorXd forces; ///< size dof_count
};

struct PlaneStressSolution {
    Eigen::VectorXd displacements;
    double energy = 0.0;          ///< 1/2 u^T K u
    double external_work = 0.0;   ///< 1/2 F^T u
};

/// Element stiffness at unit modulus split by Gauss point: the element
/// matrix for nodal densities rho is sum_g Y(rho(x_g)) K_g.
class PlaneStressElement {
public:
    PlaneStressElement(double dx, double dy, const Material& material);

    /// Element matrix for the four corner densities (counter-clockwise
    /// from bottom-left).
    Eigen::Matrix<double, 8, 8> stiffness(const std::array<double, 4>& corner_rho) const;
    /// Bilinear density at Gauss point g.
    double gauss_density(const std::array<double, 4>& corner_rho, std::size_t g) const;
    /// Stress (sxx, syy, sxy) at the element centre for unit modulus.
    Eigen::Matrix<double, 3, 8> center_stress_operator() const { return center_db_; }

private:
    Material material_;
    std::array<Eigen::Matrix<double, 8, 8>, 4> kg_;
    std::array<std::array<double, 4>, 4> shape_at_gauss_;
    Eigen::Matrix<double, 3, 8> center_db_;
};

/// Assembles K for nodal densities and solves with the given supports.
/// Throws AnalysisError when the reduced system is singular.
PlaneStressSolution solve_plane_stress(const QuadMesh& mesh, const Material& material, std::span<const double> nodal_rho,
                                       const LoadCase& load);

/// Element-centre stress (sxx, syy, sxy) per element for a solved field.
std::vector<std::array<double, 3>> element_stresses(const QuadMesh& mesh, const Material& material,
                                                    std::span<const double> nodal_rho, const Eigen::VectorXd& u);

/// The half-beam compliance benchmark: downward traction on the top-right
/// edge segment, roller under the bottom-left edge segment and a symmetry
/// line (u_x = 0) along the right boundary. Densities are nodal.
struct ComplianceProblem {
    QuadMesh mesh;
    Material material;
    double traction = 1.0;          ///< magnitude per unit length, pointing down
    double load_fraction = 0.0;     ///< 0 selects 1/(n-1) of the top edge
    double support_fraction = 0.0;  ///< 0 selects 1/(n-1) of the bottom edge
    double volume_fraction = 0.5;

    static ComplianceProblem square(std::size_t n);
    std::size_t design_size() const noexcept { return mesh.node_count(); }
    LoadCase load_case() const;
};

struct ComplianceResult {
    Eigen::VectorXd displacements;
    double energy = 0.0;
    double ratio = 0.0; ///< E(rho) / E(rho_O), rho_O = all 0.5
};

/// Nodal weights integrating the bilinear density field, normalized to one.
VolumeConstraint volume_weights(const ComplianceProblem& p);

/// Elastic energy and its ratio to the uniform 0.5 reference. Construct once
/// per problem; `solve` is const and thread-safe.
class ComplianceEvaluator {
public:
    explicit ComplianceEvaluator(ComplianceProblem p);

    const ComplianceProblem& problem() const noexcept { return problem_; }
    double reference_energy() const noexcept { return reference_energy_; }
    ComplianceResult solve(std::span<const double> rho) const;
    ComplianceResult solve(const DesignVector& rho) const;

private:
    ComplianceProblem problem_;
    LoadCase load_;
    double reference_energy_ = 0.0;
};

ComplianceResult solve_compliance(const ComplianceProblem& p, const DesignVector& rho);

} // namespace solo::compliance
