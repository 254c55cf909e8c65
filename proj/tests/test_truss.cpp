#include "solo/core/error.hpp"
#include "solo/core/rng.hpp"
#include "solo/fem/truss.hpp"
#include "truss_cases.hpp"

#include <doctest.h>

#include <Eigen/Dense>

#include <sstream>

using namespace solo;
using namespace solo::truss;
using solo::testing::rel_err;
using solo::testing::single_bar;
using solo::testing::two_bar_v;

namespace {

std::vector<double> random_areas(const TrussModel& m, RngStream& rng)
{
    std::vector<double> a(m.bar_count());
    for (auto& x : a) x = m.catalog[rng.index(m.catalog.size())];
    return a;
}

Eigen::VectorXd flat(const std::vector<Vec3>& u)
{
    Eigen::VectorXd v(static_cast<Eigen::Index>(3 * u.size()));
    for (std::size_t n = 0; n < u.size(); ++n)
        for (std::size_t d = 0; d < 3; ++d) v(static_cast<Eigen::Index>(3 * n + d)) = u[n][d];
    return v;
}

Eigen::VectorXd flat_loads(const TrussModel& m) { return flat(m.loads); }

} // namespace

TEST_CASE("single bar matches FL/(EA) and F/A")
{
    const double L = 60.0, A = 1.3, E = 1e4, P = 7.0;
    const auto r = solve_truss(single_bar(L, A, E, P), std::vector<double>{A});
    CHECK(rel_err(r.displacements[1][2], P * L / (E * A)) < 1e-8);
    CHECK(rel_err(r.stresses[0], P / A) < 1e-8);
    CHECK(r.displacements[0][2] == 0.0);
}

TEST_CASE("symmetric two-bar V matches hand statics")
{
    const double b = 40.0, h = 30.0, A = 0.8, E = 1e4, P = 5.0;
    const auto exact = testing::two_bar_v_exact(b, h, A, E, P);
    const auto r = solve_truss(two_bar_v(b, h, A, E, P), std::vector<double>{A, A});
    CHECK(rel_err(-r.displacements[2][2], exact.apex_drop) < 1e-8);
    CHECK(std::abs(r.displacements[2][0]) < 1e-12);
    CHECK(rel_err(r.stresses[0], exact.stress) < 1e-8);
    CHECK(rel_err(r.stresses[1], exact.stress) < 1e-8);
}

TEST_CASE("zero load gives zero response and the same weight")
{
    auto m = build_tower(1);
    RngStream rng(1, 0);
    const auto a = random_areas(m, rng);
    const double w = truss_weight(m, a);
    for (auto& l : m.loads) l = {0.0, 0.0, 0.0};
    const auto r = solve_truss(m, a);
    for (const auto& u : r.displacements)
        for (double x : u) CHECK(x == 0.0);
    for (double s : r.stresses) CHECK(s == 0.0);
    CHECK(r.weight == w);
}

TEST_CASE("tower mesh counts")
{
    for (std::size_t n : {1u, 4u, 24u, 56u}) {
        const auto m = build_tower(n);
        CHECK(m.bar_count() == 18 * n);
        CHECK(m.node_count() == 4 * (n + 1));
        CHECK_NOTHROW(m.validate());
    }
    CHECK(build_tower(4).bar_count() == 72);
}

TEST_CASE("random 72-bar towers: symmetry, superposition, energy, area scaling")
{
    RngStream rng(2, 0);
    for (int trial = 0; trial < 100; ++trial) {
        auto m = build_tower(4);
        const auto a = random_areas(m, rng);

        const Eigen::MatrixXd k = assemble_stiffness(m, a);
        CHECK((k - k.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * k.cwiseAbs().maxCoeff());

        std::vector<Vec3> f1(m.node_count(), {0, 0, 0}), f2 = f1;
        for (std::size_t n = 4; n < m.node_count(); ++n)
            for (std::size_t d = 0; d < 3; ++d) {
                f1[n][d] = rng.uniform(-5.0, 5.0);
                f2[n][d] = rng.uniform(-5.0, 5.0);
            }
        m.loads = f1;
        const auto u1 = flat(solve_truss(m, a).displacements);
        m.loads = f2;
        const auto u2 = flat(solve_truss(m, a).displacements);
        for (std::size_t n = 0; n < m.node_count(); ++n)
            for (std::size_t d = 0; d < 3; ++d) m.loads[n][d] = f1[n][d] + f2[n][d];
        const auto u12 = flat(solve_truss(m, a).displacements);
        CHECK((u12 - u1 - u2).norm() <= 1e-10 * u12.norm());

        const double work = flat_loads(m).dot(u12);
        const double energy = u12.dot(k * u12);
        CHECK(rel_err(energy, work) < 1e-9);

        std::vector<double> doubled = a;
        for (auto& x : doubled) x *= 2.0;
        const auto ud = flat(solve_truss(m, doubled).displacements);
        CHECK((2.0 * ud - u12).norm() <= 1e-10 * u12.norm());
    }
}

TEST_CASE("weight ratio and penalty")
{
    auto m = build_tower(4);
    CHECK(scale_loads_to_margin(m, 0.5) > 0.0);
    CHECK(std::max(solve_truss(m, std::vector<double>(72, m.catalog.back())).max_stress_ratio,
                   solve_truss(m, std::vector<double>(72, m.catalog.back())).max_displacement_ratio)
          == doctest::Approx(0.5));
    const auto top = DesignVector::discrete(std::vector<double>(72, m.catalog.back()), m.catalog);
    const auto bottom = DesignVector::discrete(std::vector<double>(72, m.catalog.front()), m.catalog);
    CHECK(truss_objective(m, top).weight_ratio == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(truss_objective(m, bottom).weight_ratio == doctest::Approx(0.1).epsilon(1e-14));

    const auto r = solve_truss(m, top);
    CHECK(r.feasible);
    CHECK(r.penalized == r.weight_ratio);
    CHECK_FALSE(solve_truss(m, bottom).feasible);
    CHECK(solve_truss(m, bottom).penalized > truss_objective(m, bottom).weight_ratio);
}

TEST_CASE("mechanism is reported")
{
    auto m = single_bar(10.0, 1.0, 1.0, 1.0);
    m.fixed[1] = {false, false, false};
    m.fixed[0] = {true, true, true};
    m.fixed.push_back({true, true, true});
    m.nodes.push_back({5.0, 5.0, 0.0});
    m.loads.push_back({0.0, 0.0, 0.0});
    CHECK_THROWS_AS(solve_truss(m, std::vector<double>{1.0}), AnalysisError);
}

TEST_CASE("normalized catalog coordinates and JSON round trip")
{
    const auto m = build_tower(2);
    const auto levels = normalized_catalog(m.catalog.size());
    CHECK(levels.front() == 0.0);
    CHECK(levels.back() == 1.0);
    std::vector<double> norm(m.bar_count());
    RngStream rng(3, 0);
    for (auto& x : norm) x = levels[rng.index(levels.size())];
    const auto areas = areas_from_normalized(m, norm);
    CHECK(normalized_from_areas(m, areas) == norm);

    std::stringstream ss;
    write_model_json(ss, m);
    const auto back = read_model_json(ss);
    CHECK(back.catalog == m.catalog);
    CHECK(back.nodes == m.nodes);
    CHECK(back.fixed == m.fixed);
    const auto a = random_areas(m, rng);
    CHECK(solve_truss(back, a).stresses == solve_truss(m, a).stresses);
}
