#include "solo/core/error.hpp"
#include "solo/core/rng.hpp"
#include "solo/opt/bat.hpp"
#include "solo/opt/gsa.hpp"
#include "solo/opt/penalty.hpp"
#include "solo/opt/trace.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace solo;
using namespace solo::opt;

namespace {

double sphere(std::span<const double> x)
{
    double s = 0.0;
    for (double v : x) s += (v - 0.3) * (v - 0.3);
    return s;
}

struct Counter {
    std::size_t calls = 0;
    Objective wrap(Objective f)
    {
        return [this, f](std::span<const double> x) {
            ++calls;
            return f(x);
        };
    }
};

void check_trace(const SearchResult& r, std::size_t calls)
{
    CHECK(r.trace.evaluations == calls);
    CHECK(r.trace.best_so_far.size() == calls);
    for (std::size_t i = 1; i < r.trace.best_so_far.size(); ++i)
        CHECK(r.trace.best_so_far[i] <= r.trace.best_so_far[i - 1]);
    const auto& items = r.trace.top.items();
    for (std::size_t i = 0; i < items.size(); ++i)
        for (std::size_t j = i + 1; j < items.size(); ++j) CHECK(items[i].design != items[j].design);
}

double kurtosis(const std::vector<double>& x)
{
    double m = 0.0;
    for (double v : x) m += v;
    m /= static_cast<double>(x.size());
    double m2 = 0.0, m4 = 0.0;
    for (double v : x) {
        const double d = (v - m) * (v - m);
        m2 += d;
        m4 += d * d;
    }
    m2 /= static_cast<double>(x.size());
    m4 /= static_cast<double>(x.size());
    return m4 / (m2 * m2);
}

std::vector<double> visit_draws(double t, double qv, std::size_t count, std::uint64_t seed)
{
    RngStream rng(seed, 0);
    std::vector<double> out;
    out.reserve(count);
    while (out.size() < count)
        for (double v : tsallis_visit_sample(t, qv, 10, rng)) out.push_back(v);
    out.resize(count);
    return out;
}

double quantile_abs(std::vector<double> x, double q)
{
    for (auto& v : x) v = std::abs(v);
    std::sort(x.begin(), x.end());
    return x[static_cast<std::size_t>(q * static_cast<double>(x.size() - 1))];
}

} // namespace

TEST_CASE("gsa_temperature oracles")
{
    GsaConfig cfg;
    CHECK(gsa_temperature(1, cfg) == cfg.initial_temperature);
    for (std::size_t t = 1; t < 200; ++t) CHECK(gsa_temperature(t + 1, cfg) < gsa_temperature(t, cfg));
    GsaConfig c2;
    c2.qv = 2.0;
    c2.initial_temperature = 10.0;
    CHECK(gsa_temperature(3, c2) == doctest::Approx(10.0 / 3.0).epsilon(1e-15));
    CHECK_THROWS_AS(gsa_temperature(0, cfg), ContractViolation);
}

TEST_CASE("gsa_acceptance: closed form and Monte-Carlo frequency")
{
    CHECK(gsa_acceptance_probability(0.0, 1, 1.0, -5.0) == 1.0);
    CHECK(gsa_acceptance_probability(-1.0, 1, 1.0, -5.0) == 1.0);
    CHECK(gsa_acceptance_probability(0.1, 1, 1.0, -5.0) == doctest::Approx(std::pow(0.4, 1.0 / 6.0)).epsilon(1e-14));
    CHECK(gsa_acceptance_probability(0.2, 1, 1.0, -5.0) == 0.0);

    RngStream rng(1, 0);
    CHECK(gsa_acceptance(0.0, 1, 1.0, -5.0, rng));
    CHECK(gsa_acceptance(-3.0, 1, 1.0, -5.0, rng));

    struct Triple {
        double qa, t, temp, de;
    };
    const Triple cases[] = {{-5.0, 1, 1.0, 0.1}, {-5.0, 2, 1.0, 0.05}, {-2.0, 1, 4.0, 0.5},
                            {-10.0, 3, 10.0, 0.2}, {-1.0, 1, 1.0, 0.3}};
    for (const auto& c : cases) {
        const auto t = static_cast<std::size_t>(c.t);
        const double p = gsa_acceptance_probability(c.de, t, c.temp, c.qa);
        std::size_t hits = 0;
        for (int k = 0; k < 100000; ++k) hits += gsa_acceptance(c.de, t, c.temp, c.qa, rng) ? 1 : 0;
        CHECK(std::abs(static_cast<double>(hits) / 1e5 - p) < 0.01);
    }
}

TEST_CASE("tsallis visiting distribution: near-Gaussian, heavy tails, temperature scaling")
{
    const auto g = visit_draws(1.0, 1.01, 100000, 1);
    CHECK(std::abs(kurtosis(g) - 3.0) < 0.3);

    // exceedance beyond 5 sigma, sigma taken from the central quantiles
    auto tail = [](const std::vector<double>& x) {
        const double sigma = quantile_abs(x, 0.6827);
        std::size_t c = 0;
        for (double v : x) c += std::abs(v) > 5.0 * sigma ? 1 : 0;
        return c;
    };
    const auto heavy = visit_draws(1.0, 2.6, 1000000, 2);
    const auto light = visit_draws(1.0, 1.5, 1000000, 3);
    CHECK(tail(heavy) > tail(light));

    // width scales as T^(1/(3-qv)): doubling T multiplies quantiles by 2^(1/(3-qv))
    const double qv = 2.62;
    const auto a = visit_draws(1.0, qv, 100000, 4);
    const auto b = visit_draws(2.0, qv, 100000, 4);
    for (double q : {0.25, 0.5, 0.75}) {
        const double ratio = quantile_abs(b, q) / quantile_abs(a, q);
        CHECK(ratio == doctest::Approx(std::pow(2.0, 1.0 / (3.0 - qv))).epsilon(0.05));
    }
}

TEST_CASE("reflect_unit stays in the box")
{
    CHECK(reflect_unit(0.3) == 0.3);
    CHECK(reflect_unit(1.2) == doctest::Approx(0.8));
    CHECK(reflect_unit(-0.25) == doctest::Approx(0.25));
    CHECK(reflect_unit(2.5) == doctest::Approx(0.5));
    RngStream rng(1, 0);
    for (int k = 0; k < 1000; ++k) {
        const double r = reflect_unit(rng.uniform(-1e6, 1e6));
        CHECK((r >= 0.0 && r <= 1.0));
    }
}

TEST_CASE("gsa_minimize: shifted sphere, accounting, determinism, shift invariance")
{
    GsaConfig cfg;
    Counter count;
    RngStream rng(1, 0);
    const auto r = gsa_minimize(count.wrap(sphere), 5, cfg, rng);
    CHECK(r.best_value < 1e-4);
    check_trace(r, count.calls);

    RngStream rng2(1, 0);
    const auto again = gsa_minimize(sphere, 5, cfg, rng2);
    CHECK(again.best == r.best);
    CHECK(again.trace.best_so_far == r.trace.best_so_far);

    RngStream rng3(1, 0);
    const auto shifted = gsa_minimize([](std::span<const double> x) { return sphere(x) + 17.0; }, 5, cfg, rng3);
    CHECK(shifted.best == r.best);
}

TEST_CASE("gsa_minimize: budget, Rastrigin, constant objective, non-finite")
{
    GsaConfig cfg;
    cfg.max_evaluations = 3000;
    Counter count;
    RngStream rng(2, 0);
    const auto r = gsa_minimize(count.wrap(sphere), 5, cfg, rng);
    CHECK(count.calls <= 3000);
    check_trace(r, count.calls);

    auto rastrigin = [](std::span<const double> x) {
        double s = 20.0;
        for (double v : x) {
            const double z = 10.24 * v - 5.12;
            s += z * z - 10.0 * std::cos(2.0 * std::numbers::pi * z);
        }
        return s;
    };
    int good = 0;
    GsaConfig rc;
    rc.t_max = 300;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        RngStream rr(seed, 0);
        good += gsa_minimize(rastrigin, 2, rc, rr).best_value < 0.1 ? 1 : 0;
    }
    CHECK(good >= 9);

    GsaConfig small;
    small.t_max = 20;
    RngStream rc2(3, 0);
    const auto flat = gsa_minimize([](std::span<const double>) { return 2.0; }, 3, small, rc2);
    for (double v : flat.trace.best_so_far) CHECK(v == 2.0);

    RngStream rn(4, 0);
    CHECK_THROWS_AS(gsa_minimize([](std::span<const double>) { return NAN; }, 3, small, rn), SearchError);
}

TEST_CASE("penalize_volume")
{
    const VolumeConstraint c({0.5, 0.5}, 0.5);
    const auto h = penalize_volume([](std::span<const double>) { return 3.0; }, c, 100.0);
    const std::vector<double> on{0.5, 0.5}, over{0.6, 0.6}, under{0.4, 0.4};
    CHECK(h(on) == 3.0);
    CHECK(h(over) == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(h(under) == doctest::Approx(h(over)).epsilon(1e-12));
}

TEST_CASE("penalize_truss")
{
    const std::vector<std::array<double, 3>> calm{{0.1, -0.1, 0.0}};
    CHECK(penalize_truss(2.0, std::vector<double>{10.0, -20.0}, calm, 25.0, 0.25) == 2.0);
    CHECK(penalize_truss(2.0, std::vector<double>{50.0, 1.0}, calm, 25.0, 0.25) == doctest::Approx(8.0));
    const std::vector<std::array<double, 3>> moved{{0.0, -0.5, 0.1}};
    CHECK(penalize_truss(2.0, std::vector<double>{-37.5}, moved, 25.0, 0.25) == doctest::Approx(12.5));
}

TEST_CASE("ba_inertia endpoints and bba_transfer")
{
    BaConfig cfg;
    CHECK(ba_inertia(0, cfg) == cfg.w_init);
    CHECK(ba_inertia(cfg.t_max, cfg) == cfg.w_final);
    CHECK(bba_transfer(0.0, 4) == 0.25);
    CHECK(bba_transfer(1e12, 4) == doctest::Approx(1.25));
    CHECK(bba_transfer(2.0 / std::numbers::pi, 4) == doctest::Approx(0.75).epsilon(1e-14));
    CHECK(bba_transfer(-2.0 / std::numbers::pi, 4) == doctest::Approx(0.75).epsilon(1e-14));
}

TEST_CASE("ba_minimize: continuous sphere, discrete catalog, accounting, determinism")
{
    BaConfig cfg;
    Counter count;
    RngStream rng(1, 0);
    const auto r = ba_minimize(count.wrap(sphere), 10, cfg, SearchSpace::continuous(), rng);
    CHECK(r.best_value < 1e-3);
    check_trace(r, count.calls);

    RngStream rng2(1, 0);
    const auto again = ba_minimize(sphere, 10, cfg, SearchSpace::continuous(), rng2);
    CHECK(again.best == r.best);
    CHECK(again.trace.best_so_far == r.trace.best_so_far);

    auto dist = [](std::span<const double> x) {
        double s = 0.0;
        for (double v : x) s += std::abs(v - 0.5);
        return s;
    };
    RngStream rd(2, 0);
    const auto space = SearchSpace::discrete({1.0, 0.1, 0.5});
    const auto d = ba_minimize(dist, 4, cfg, space, rd);
    CHECK(d.best == std::vector<double>(4, 0.5));
    for (const auto& item : d.trace.top.items())
        for (double v : item.design) CHECK((v == 0.1 || v == 0.5 || v == 1.0));

    BaConfig capped;
    capped.max_evaluations = 777;
    Counter cc;
    RngStream rc(3, 0);
    const auto b = ba_minimize(cc.wrap(sphere), 3, capped, SearchSpace::continuous(), rc);
    CHECK(cc.calls == 777);
    check_trace(b, cc.calls);
}

TEST_CASE("ba_minimize: seeded bats start at the given designs")
{
    BaConfig cfg;
    cfg.max_evaluations = 2;
    cfg.seeds = {{0.5, 0.5, 0.5}, {0.52, 0.1, 0.9}};
    std::vector<std::vector<double>> seen;
    auto record = [&seen](std::span<const double> x) {
        seen.emplace_back(x.begin(), x.end());
        return sphere(x);
    };
    RngStream rng(4, 0);
    const auto r = ba_minimize(record, 3, cfg, SearchSpace::discrete({0.0, 0.5, 1.0}), rng);
    REQUIRE(seen.size() == 2);
    CHECK(seen[0] == cfg.seeds[0]);
    CHECK(seen[1] == std::vector<double>{0.5, 0.0, 1.0}); // snapped
    CHECK(r.best == cfg.seeds[0]);

    cfg.seeds.assign(cfg.population + 1, {0.5, 0.5, 0.5});
    CHECK_THROWS_AS(ba_minimize(sphere, 3, cfg, SearchSpace::continuous(), rng), ContractViolation);
    cfg.seeds = {{0.5}};
    CHECK_THROWS_AS(ba_minimize(sphere, 3, cfg, SearchSpace::continuous(), rng), ContractViolation);
}

TEST_CASE("bba_minimize: linear objectives against brute force")
{
    const std::vector<double> c{-3, 1, -2, 4, -1, 2, 1, -1, 3, -2};
    auto linear = [](const std::vector<double>& w) {
        return [w](std::span<const double> x) {
            double s = 0.0;
            for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * x[i];
            return s;
        };
    };
    BbaConfig cfg;
    int hits = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        Counter count;
        RngStream rng(seed, 0);
        const auto r = bba_minimize(count.wrap(linear(c)), 10, cfg, rng);
        hits += r.best_value == -9.0 ? 1 : 0;
        check_trace(r, count.calls);
        for (double v : r.best) CHECK((v == 0.0 || v == 1.0));
    }
    CHECK(hits >= 9);

    RngStream r1(5, 0);
    const auto ones = bba_minimize(
        [](std::span<const double> x) {
            double s = 0.0;
            for (double v : x) s -= v;
            return s;
        },
        12, cfg, r1);
    CHECK(ones.best == std::vector<double>(12, 1.0));

    RngStream r2(6, 0);
    const auto tiny = bba_minimize([](std::span<const double> x) { return -x[0]; }, 1, cfg, r2);
    CHECK(tiny.best == std::vector<double>{1.0});

    // random linear objectives, N up to 12, t_max 500, M 20
    BbaConfig small;
    small.population = 20;
    RngStream coef(99, 0);
    for (std::size_t n = 4; n <= 12; n += 4) {
        std::vector<double> w(n);
        for (auto& x : w) x = coef.uniform(-1.0, 1.0);
        double optimum = 0.0;
        for (double x : w) optimum += std::min(x, 0.0);
        int ok = 0;
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            RngStream rng(seed, n);
            ok += std::abs(bba_minimize(linear(w), n, small, rng).best_value - optimum) < 1e-12 ? 1 : 0;
        }
        CHECK(ok >= 8);
    }
}

TEST_CASE("TopK keeps distinct lowest designs")
{
    TopK top(3);
    top.offer(std::vector<double>{1.0}, 5.0);
    top.offer(std::vector<double>{1.0}, 5.0);
    top.offer(std::vector<double>{2.0}, 1.0);
    top.offer(std::vector<double>{3.0}, 3.0);
    top.offer(std::vector<double>{4.0}, 0.5);
    REQUIRE(top.items().size() == 3);
    CHECK(top.items()[0].value == 0.5);
    CHECK(top.items()[2].value == 3.0);
}
