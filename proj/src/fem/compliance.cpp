#include "solo/fem/compliance.hpp"

#include "solo/core/error.hpp"

#include <algorithm>
#include <cmath>

namespace solo::compliance {

double simp_modulus(double rho, double y0, double eps_y)
{
    const double r3 = rho * rho * rho;
    return y0 * r3 + eps_y * (1.0 - r3);
}

namespace {

// corner order: bottom-left, bottom-right, top-right, top-left
constexpr std::array<double, 4> kXi{-1.0, 1.0, 1.0, -1.0};
constexpr std::array<double, 4> kEta{-1.0, -1.0, 1.0, 1.0};

Eigen::Matrix<double, 3, 8> strain_operator(double xi, double eta, double dx, double dy)
{
    Eigen::Matrix<double, 3, 8> b = Eigen::Matrix<double, 3, 8>::Zero();
    for (int a = 0; a < 4; ++a) {
        const double dndx = 0.25 * kXi[a] * (1.0 + kEta[a] * eta) * (2.0 / dx);
        const double dndy = 0.25 * kEta[a] * (1.0 + kXi[a] * xi) * (2.0 / dy);
        b(0, 2 * a) = dndx;
        b(1, 2 * a + 1) = dndy;
        b(2, 2 * a) = dndy;
        b(2, 2 * a + 1) = dndx;
    }
    return b;
}

Eigen::Matrix3d plane_stress_matrix(double nu)
{
    Eigen::Matrix3d d;
    d << 1.0, nu, 0.0, nu, 1.0, 0.0, 0.0, 0.0, 0.5 * (1.0 - nu);
    return d / (1.0 - nu * nu);
}

std::array<std::size_t, 8> element_dofs(const QuadMesh& mesh, std::size_t ei, std::size_t ej)
{
    const std::array<std::size_t, 4> n{mesh.node(ei, ej), mesh.node(ei + 1, ej), mesh.node(ei + 1, ej + 1),
                                       mesh.node(ei, ej + 1)};
    return {2 * n[0], 2 * n[0] + 1, 2 * n[1], 2 * n[1] + 1, 2 * n[2], 2 * n[2] + 1, 2 * n[3], 2 * n[3] + 1};
}

std::array<double, 4> corner_values(const QuadMesh& mesh, std::span<const double> rho, std::size_t ei, std::size_t ej)
{
    return {rho[mesh.node(ei, ej)], rho[mesh.node(ei + 1, ej)], rho[mesh.node(ei + 1, ej + 1)], rho[mesh.node(ei, ej + 1)]};
}

} // namespace

PlaneStressElement::PlaneStressElement(double dx, double dy, const Material& material) : material_(material)
{
    const double g = 1.0 / std::sqrt(3.0);
    const Eigen::Matrix3d d = plane_stress_matrix(material.poisson);
    const double det_j = 0.25 * dx * dy;
    for (std::size_t gp = 0; gp < 4; ++gp) {
        const double xi = kXi[gp] * g, eta = kEta[gp] * g;
        const auto b = strain_operator(xi, eta, dx, dy);
        kg_[gp] = material.thickness * det_j * (b.transpose() * d * b);
        for (std::size_t a = 0; a < 4; ++a)
            shape_at_gauss_[gp][a] = 0.25 * (1.0 + kXi[a] * xi) * (1.0 + kEta[a] * eta);
    }
    center_db_ = d * strain_operator(0.0, 0.0, dx, dy);
}

double PlaneStressElement::gauss_density(const std::array<double, 4>& corner_rho, std::size_t g) const
{
    double r = 0.0;
    for (std::size_t a = 0; a < 4; ++a) r += shape_at_gauss_[g][a] * corner_rho[a];
    return r;
}

Eigen::Matrix<double, 8, 8> PlaneStressElement::stiffness(const std::array<double, 4>& corner_rho) const
{
    Eigen::Matrix<double, 8, 8> ke = Eigen::Matrix<double, 8, 8>::Zero();
    for (std::size_t g = 0; g < 4; ++g)
        ke += simp_modulus(gauss_density(corner_rho, g), material_.y0, material_.eps_y) * kg_[g];
    return ke;
}

PlaneStressSolution solve_plane_stress(const QuadMesh& mesh, const Material& material, std::span<const double> nodal_rho,
                                       const LoadCase& load)
{
    require(mesh.nx >= 2 && mesh.ny >= 2, "quad mesh needs at least 2x2 nodes");
    require(nodal_rho.size() == mesh.node_count(), "one density per mesh node required");
    const auto ndof = static_cast<Eigen::Index>(mesh.dof_count());
    require(load.forces.size() == ndof, "force vector size must equal DOF count");

    const PlaneStressElement elem(mesh.dx(), mesh.dy(), material);
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(ndof, ndof);
    for (std::size_t ej = 0; ej + 1 < mesh.ny; ++ej)
        for (std::size_t ei = 0; ei + 1 < mesh.nx; ++ei) {
            const auto ke = elem.stiffness(corner_values(mesh, nodal_rho, ei, ej));
            const auto dofs = element_dofs(mesh, ei, ej);
            for (int r = 0; r < 8; ++r)
                for (int c = 0; c < 8; ++c)
                    k(static_cast<Eigen::Index>(dofs[r]), static_cast<Eigen::Index>(dofs[c])) += ke(r, c);
        }

    std::vector<char> is_fixed(mesh.dof_count(), 0);
    for (auto d : load.fixed_dofs) {
        require(d < mesh.dof_count(), "fixed DOF out of range");
        is_fixed[d] = 1;
    }
    std::vector<Eigen::Index> free;
    for (std::size_t d = 0; d < mesh.dof_count(); ++d)
        if (!is_fixed[d]) free.push_back(static_cast<Eigen::Index>(d));
    const auto nf = static_cast<Eigen::Index>(free.size());

    Eigen::MatrixXd kff(nf, nf);
    Eigen::VectorXd ff(nf);
    for (Eigen::Index r = 0; r < nf; ++r) {
        ff(r) = load.forces(free[static_cast<std::size_t>(r)]);
        for (Eigen::Index c = 0; c < nf; ++c) kff(r, c) = k(free[static_cast<std::size_t>(r)], free[static_cast<std::size_t>(c)]);
    }
    Eigen::LLT<Eigen::MatrixXd> llt(kff);
    if (llt.info() != Eigen::Success) throw AnalysisError("plane-stress stiffness is singular; check supports");
    const Eigen::VectorXd uf = llt.solve(ff);

    PlaneStressSolution sol;
    sol.displacements = Eigen::VectorXd::Zero(ndof);
    for (Eigen::Index r = 0; r < nf; ++r) sol.displacements(free[static_cast<std::size_t>(r)]) = uf(r);
    sol.energy = 0.5 * sol.displacements.dot(k * sol.displacements);
    sol.external_work = 0.5 * load.forces.dot(sol.displacements);
    if (!std::isfinite(sol.energy)) throw AnalysisError("plane-stress solve produced non-finite energy");
    return sol;
}

std::vector<std::array<double, 3>> element_stresses(const QuadMesh& mesh, const Material& material,
                                                    std::span<const double> nodal_rho, const Eigen::VectorXd& u)
{
    const PlaneStressElement elem(mesh.dx(), mesh.dy(), material);
    std::vector<std::array<double, 3>> out;
    for (std::size_t ej = 0; ej + 1 < mesh.ny; ++ej)
        for (std::size_t ei = 0; ei + 1 < mesh.nx; ++ei) {
            const auto dofs = element_dofs(mesh, ei, ej);
            Eigen::Matrix<double, 8, 1> ue;
            for (int a = 0; a < 8; ++a) ue(a) = u(static_cast<Eigen::Index>(dofs[a]));
            const auto rho = corner_values(mesh, nodal_rho, ei, ej);
            const double rc = 0.25 * (rho[0] + rho[1] + rho[2] + rho[3]);
            const Eigen::Vector3d s = simp_modulus(rc, material.y0, material.eps_y) * (elem.center_stress_operator() * ue);
            out.push_back({s(0), s(1), s(2)});
        }
    return out;
}

ComplianceProblem ComplianceProblem::square(std::size_t n)
{
    require(n >= 2, "compliance grid needs n >= 2");
    ComplianceProblem p;
    p.mesh = QuadMesh{n, n, 1.0, 1.0};
    return p;
}

LoadCase ComplianceProblem::load_case() const
{
    const double load_frac = load_fraction > 0.0 ? load_fraction : 1.0 / static_cast<double>(mesh.nx - 1);
    const double support_frac = support_fraction > 0.0 ? support_fraction : 1.0 / static_cast<double>(mesh.nx - 1);
    const double tol = 1e-9 * mesh.width;

    LoadCase lc;
    lc.forces = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mesh.dof_count()));
    // symmetry line: u_x = 0 along the right boundary
    for (std::size_t j = 0; j < mesh.ny; ++j) lc.fixed_dofs.push_back(2 * mesh.node(mesh.nx - 1, j));
    // roller: u_y = 0 under the bottom-left segment
    for (std::size_t i = 0; i < mesh.nx; ++i)
        if (static_cast<double>(i) * mesh.dx() <= support_frac * mesh.width + tol) lc.fixed_dofs.push_back(2 * mesh.node(i, 0) + 1);
    // downward traction on top-edge element edges lying inside the load segment
    const std::size_t top = mesh.ny - 1;
    const double x_start = mesh.width * (1.0 - load_frac);
    for (std::size_t i = 0; i + 1 < mesh.nx; ++i) {
        if (static_cast<double>(i) * mesh.dx() + tol < x_start) continue;
        const double half = 0.5 * traction * mesh.dx() * material.thickness;
        lc.forces(static_cast<Eigen::Index>(2 * mesh.node(i, top) + 1)) -= half;
        lc.forces(static_cast<Eigen::Index>(2 * mesh.node(i + 1, top) + 1)) -= half;
    }
    return lc;
}

VolumeConstraint volume_weights(const ComplianceProblem& p)
{
    const QuadMesh& m = p.mesh;
    // integral of the bilinear interpolant = tensor product of 1D trapezoid weights
    auto trapezoid = [](std::size_t n) {
        std::vector<double> w(n, 1.0);
        w.front() = w.back() = 0.5;
        return w;
    };
    const auto wx = trapezoid(m.nx);
    const auto wy = trapezoid(m.ny);
    std::vector<double> w(m.node_count());
    double total = 0.0;
    for (std::size_t j = 0; j < m.ny; ++j)
        for (std::size_t i = 0; i < m.nx; ++i) total += (w[m.node(i, j)] = wx[i] * wy[j]);
    for (double& x : w) x /= total;
    return VolumeConstraint(std::move(w), p.volume_fraction, ConstraintMode::inequality);
}

ComplianceEvaluator::ComplianceEvaluator(ComplianceProblem p) : problem_(std::move(p)), load_(problem_.load_case())
{
    require(problem_.material.eps_y > 0.0, "void modulus must be positive");
    const std::vector<double> ref(problem_.design_size(), 0.5);
    reference_energy_ = solve_plane_stress(problem_.mesh, problem_.material, ref, load_).energy;
    if (!(reference_energy_ > 0.0)) throw AnalysisError("reference design stores no energy; is the load zero?");
}

ComplianceResult ComplianceEvaluator::solve(std::span<const double> rho) const
{
    require(rho.size() == problem_.design_size(), "compliance design must have n^2 entries");
    for (double r : rho) require(r >= 0.0 && r <= 1.0, "compliance densities must lie in [0,1]");
    const auto sol = solve_plane_stress(problem_.mesh, problem_.material, rho, load_);
    ComplianceResult out;
    out.displacements = sol.displacements;
    out.energy = sol.energy;
    out.ratio = sol.energy / reference_energy_;
    return out;
}

ComplianceResult ComplianceEvaluator::solve(const DesignVector& rho) const
{
    return solve(rho.values());
}

ComplianceResult solve_compliance(const ComplianceProblem& p, const DesignVector& rho)
{
    return ComplianceEvaluator(p).solve(rho);
}

} // namespace solo::compliance
