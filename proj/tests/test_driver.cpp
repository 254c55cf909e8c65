#include "solo/core/error.hpp"
#include "solo/driver/batch.hpp"
#include "solo/driver/config_io.hpp"
#include "solo/driver/problem.hpp"
#include "solo/driver/solo.hpp"

#include <doctest.h>

#include <atomic>
#include <cmath>
#include <memory>
#include <sstream>

using namespace solo;
using namespace solo::driver;

namespace {

// Small and fast settings so a few loops run in well under a second.
SoloConfig quick(const Problem& p, std::uint64_t seed)
{
    SoloConfig c = default_config(p);
    c.net.hidden = {16, 16};
    c.train.epochs = 150;
    c.search.gsa.max_evaluations = 4000;
    c.search.ba.t_max = 40;
    c.search.ba.population = 20;
    c.search.bba.t_max = 40;
    c.seed = seed;
    return c;
}

struct Counted {
    Problem problem;
    std::shared_ptr<std::atomic<std::size_t>> calls = std::make_shared<std::atomic<std::size_t>>(0);
};

Counted counted(std::string_view id)
{
    Counted c{make_problem(id)};
    auto inner = c.problem.evaluate;
    auto n = c.calls;
    c.problem.evaluate = [inner, n](const DesignVector& v) {
        ++*n;
        return inner(v);
    };
    return c;
}

void check_report_invariants(const RunReport& r)
{
    for (std::size_t i = 1; i < r.loops.size(); ++i) {
        CHECK(r.loops[i].best_f <= r.loops[i - 1].best_f);
        CHECK(r.loops[i].n_train > r.loops[i - 1].n_train);
    }
    for (const auto& rec : r.dataset.records()) CHECK(std::isfinite(rec.objective));
}

} // namespace

TEST_CASE("problem registry and compatibility")
{
    for (const auto& id : problem_ids()) {
        const auto p = make_problem(id);
        CHECK(p.id == id);
        CHECK(p.shape.size() == p.dim);
        CHECK_NOTHROW(p.table.validate());
    }
    CHECK_THROWS_AS(make_problem("fluid"), ContractViolation);
    CHECK(optimizer_compatible(make_problem("truss-72"), OptimizerKind::ba));
    CHECK_FALSE(optimizer_compatible(make_problem("truss-72"), OptimizerKind::bba));
    CHECK_FALSE(optimizer_compatible(make_problem("compliance-5"), OptimizerKind::bba));
    CHECK(optimizer_compatible(make_problem("analytic-binary"), OptimizerKind::bba));
    CHECK(make_problem("truss-72").hidden[1] == 512);
    CHECK(make_problem("truss-1008").hidden[1] == 1024);
}

TEST_CASE("design_from_search maps into each space")
{
    const auto c5 = make_problem("compliance-5");
    const auto d = c5.design_from_search(std::vector<double>(25, 0.9));
    CHECK(c5.volume->satisfied(d.values()));
    const auto under = c5.design_from_search(std::vector<double>(25, 0.2));
    CHECK(under.data() == std::vector<double>(25, 0.2));

    const auto bin = make_problem("analytic-binary");
    std::vector<double> x(16, 0.49);
    x[3] = 0.5;
    const auto b = bin.design_from_search(x);
    CHECK(b[3] == 1.0);
    CHECK(b[0] == 0.0);

    const auto tr = make_problem("truss-72");
    const auto t = tr.design_from_search(std::vector<double>(72, 0.52));
    for (double v : t.values()) CHECK(v == doctest::Approx(8.0 / 15.0));
}

TEST_CASE("batch evaluation: parallel equals serial, first error wins")
{
    const auto p = make_problem("compliance-5");
    RngStream rng(1, 0);
    std::vector<DesignVector> ds;
    for (int k = 0; k < 40; ++k) {
        std::vector<double> v(25);
        for (auto& x : v) x = rng.uniform();
        ds.push_back(DesignVector::continuous(std::move(v)));
    }
    const auto a = evaluate_batch(p, ds);
    const auto b = evaluate_batch_serial(p, ds);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].objective == b[i].objective);

    auto broken = p;
    broken.evaluate = [](const DesignVector& v) -> Evaluation {
        if (v[0] > 0.5) throw AnalysisError("boom " + std::to_string(v[0]));
        return {1.0, true};
    };
    CHECK_THROWS_AS(evaluate_batch(broken, ds), AnalysisError);
}

TEST_CASE("check_convergence")
{
    CHECK(check_convergence({2.0, 2.0, 2.0, 2.0}, 1e-3, 3));
    CHECK_FALSE(check_convergence({2.0, 2.0, 2.0}, 1e-3, 3));
    CHECK_FALSE(check_convergence({4.0, 3.0, 2.0, 1.0}, 1e-3, 3));
    // recorded tail of a compliance-5 run; entries k-3 and k differ by:
    // 0.4200 -> 0.4198 (4.8e-4, converged), 0.4310 -> 0.4200 (2.6e-3, not)
    const std::vector<double> trace{0.5120, 0.4310, 0.4262, 0.4231, 0.4200, 0.4199, 0.4199, 0.4198};
    std::vector<bool> hand{false, false, false, false, false, false, false, true};
    for (std::size_t k = 1; k <= trace.size(); ++k)
        CHECK(check_convergence({trace.begin(), trace.begin() + static_cast<long>(k)}, 1e-3, 3) == hand[k - 1]);
}

TEST_CASE("report CSV round trip")
{
    RunReport r;
    r.loops.push_back({1, 200, 0.5, 0.6, 0.55, -0.0833333333333333, 1e-4, 0.1, 0.2, 0.3});
    r.loops.push_back({2, 300, 0.4, 0.4, 0.41, 0.025, 2e-5, 0.1, 0.2, 0.3});
    std::stringstream ss;
    r.write_csv(ss);
    CHECK(ss.str().rfind("loop,n_train,best_F,F_rho_hat,e_rho_hat,rel_err,eps_mse,t_fem,t_train,t_search\n", 0) == 0);
    const auto back = read_report_csv(ss);
    REQUIRE(back.size() == 2);
    CHECK(back[0].rel_err == r.loops[0].rel_err);
    CHECK(back[1].n_train == 300);
    std::stringstream no_time;
    r.write_csv(no_time, false);
    CHECK(read_report_csv(no_time)[0].t_train == 0.0);
}

TEST_CASE("config round trip is the identity")
{
    auto cfg = quick(make_problem("compliance-5"), 42);
    cfg.search.ba.alpha = 0.8765432109876543;
    cfg.tolerance = 1.0 / 3.0;
    std::stringstream a;
    write_config(a, cfg);
    SoloConfig back;
    read_config(a, back);
    std::stringstream b;
    write_config(b, back);
    CHECK(a.str() == b.str());
    CHECK(back.search.ba.alpha == cfg.search.ba.alpha);
    CHECK(back.net.hidden == cfg.net.hidden);

    std::stringstream bad("[solo]\nno_such_key = 1\n");
    CHECK_THROWS_AS(read_config(bad, back), ContractViolation);
}

TEST_CASE("run_solo on the analytic problem: accounting, invariants, reproducibility")
{
    auto c = counted("analytic-smoke");
    auto cfg = quick(c.problem, 3);
    cfg.budget = 300;
    cfg.stop_on_convergence = false;
    const auto r = run_solo(c.problem, cfg);
    CHECK(r.fem_calls == c.calls->load());
    CHECK(r.dataset.n_train() == 300);
    CHECK(r.loops.size() == 4);
    CHECK(r.loops.front().n_train == 150);
    check_report_invariants(r);
    for (const auto& l : r.loops) CHECK(std::isfinite(l.rel_err));
    CHECK(r.loops.back().best_f < r.dataset[0].objective);
    REQUIRE(r.final_design);
    REQUIRE(r.surrogate);

    const auto again = run_solo(c.problem, cfg);
    std::stringstream s1, s2;
    r.write_csv(s1, false);
    again.write_csv(s2, false);
    CHECK(s1.str() == s2.str());
    CHECK(*again.final_design == *r.final_design);
}

TEST_CASE("greedy and mixed variants fill each loop")
{
    auto bin = make_problem("analytic-binary");
    auto cfg = quick(bin, 4);
    cfg.variant = Variant::greedy;
    cfg.budget = 57;
    cfg.stop_on_convergence = false;
    const auto g = run_solo(bin, cfg);
    CHECK(g.dataset.n_train() == 57);
    check_report_invariants(g);

    auto tr = make_problem("truss-72");
    auto tc = quick(tr, 5);
    tc.budget = 130;
    tc.stop_on_convergence = false;
    const auto t = run_solo(tr, tc);
    CHECK(t.dataset.n_train() == 130);
    std::size_t optima = 0;
    for (std::size_t i = 100; i < 110; ++i) optima += t.dataset[i].tag == SampleTag::search_optimum ? 1 : 0;
    CHECK(optima == 1);
    check_report_invariants(t);
}

TEST_CASE("offline baseline")
{
    auto p = make_problem("analytic-smoke");
    auto cfg = quick(p, 6);
    const auto r = run_offline_baseline(p, 60, cfg);
    CHECK(r.dataset.n_train() == 60);
    CHECK(r.loops.size() == 1);
    // the network needs one record before rho_hat exists, so this evaluates two
    const auto one = run_offline_baseline(p, 1, cfg);
    CHECK(one.dataset.n_train() == 2);
    CHECK(std::isfinite(one.best()));
}

TEST_CASE("stochastic search improves and trains nothing")
{
    auto p = make_problem("analytic-smoke");
    auto cfg = quick(p, 7);
    cfg.budget = p.initial_batch + 10 * p.per_loop;
    cfg.stop_on_convergence = false;
    const auto r = run_stochastic_search(p, cfg);
    CHECK(r.loops.size() == 10);
    CHECK(r.loops.back().best_f < r.loops.front().best_f);
    for (const auto& l : r.loops) CHECK(l.t_train == 0.0);
    CHECK_FALSE(r.surrogate);
    check_report_invariants(r);
}

TEST_CASE("direct heuristics honour the budget exactly and reproduce")
{
    for (auto [id, kind] : {std::pair{"truss-72", OptimizerKind::ba}, std::pair{"analytic-binary", OptimizerKind::bba},
                            std::pair{"analytic-smoke", OptimizerKind::ba}}) {
        auto c = counted(id);
        const auto r = run_direct_heuristic(c.problem, kind, 1000, 9);
        CHECK(r.fem_calls == 1000);
        CHECK(c.calls->load() == 1000);
        CHECK(r.loops.back().n_train == 1000);
        const auto again = run_direct_heuristic(c.problem, kind, 1000, 9);
        std::stringstream a, b;
        r.write_csv(a, false);
        again.write_csv(b, false);
        CHECK(a.str() == b.str());
    }
    CHECK_THROWS_AS(run_direct_heuristic(make_problem("truss-72"), OptimizerKind::bba, 10, 1), ContractViolation);
}
