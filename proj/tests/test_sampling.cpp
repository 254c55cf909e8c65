#include "solo/core/error.hpp"
#include "solo/core/rng.hpp"
#include "solo/fem/compliance.hpp"
#include "solo/sampling/sampling.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

using namespace solo;
using namespace solo::sampling;

namespace {

std::size_t differing(std::span<const double> a, std::span<const double> b)
{
    std::size_t n = 0;
    for (std::size_t i = 0; i < a.size(); ++i) n += a[i] != b[i] ? 1 : 0;
    return n;
}

// direct re-implementation: out(i,j) = sum_ab K(a,b) S(i-a, j-b) inside the block
std::vector<double> brute_convolve(const std::vector<double>& base, std::size_t cols, std::size_t r0, std::size_t c0,
                                   std::size_t size, const Kernel2& k)
{
    std::vector<double> out = base;
    for (std::size_t i = 0; i < size; ++i)
        for (std::size_t j = 0; j < size; ++j) {
            double s = 0.0;
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) {
                    const int ii = static_cast<int>(i) - a, jj = static_cast<int>(j) - b;
                    if (ii < 0 || jj < 0) continue;
                    s += k[a][b] * base[(r0 + ii) * cols + c0 + jj];
                }
            out[(r0 + i) * cols + c0 + j] = s;
        }
    return out;
}

} // namespace

TEST_CASE("disturbance tables")
{
    for (const auto& t : {DisturbanceTable::compliance(), DisturbanceTable::heat(), DisturbanceTable::truss()})
        CHECK_NOTHROW(t.validate());
    DisturbanceTable bad{{{Operator::random, 0, 0.7}}};
    CHECK_THROWS_AS(bad.validate(), ContractViolation);
    const auto c = DisturbanceTable::compliance();
    CHECK(c.pick(0.0) == 0);
    CHECK(c.pick(0.999999) == c.entries.size() - 1);
    for (const auto& e : DisturbanceTable::heat().entries) CHECK(e.op != Operator::crossover);
}

TEST_CASE("initial_batch per space")
{
    RngStream rng(1, 0);
    const VolumeConstraint c(std::vector<double>(25, 1.0 / 25.0), 0.5);
    SampleSpace cont;
    for (const auto& v : initial_batch(100, 25, cont, &c, rng)) CHECK(std::abs(weighted_volume(v, c) - 0.5) < 1e-9);

    SampleSpace hot;
    hot.kind = DesignKind::binary;
    hot.binary_init = BinaryInit::one_hot;
    const auto oh = initial_batch(0, 160, hot, nullptr, rng);
    CHECK(oh.size() == 161);
    std::set<std::vector<double>> distinct;
    for (const auto& v : oh) distinct.insert(v.data());
    CHECK(distinct.size() == 161);

    SampleSpace bern;
    bern.kind = DesignKind::binary;
    for (const auto& v : initial_batch(20, 16, bern, nullptr, rng))
        for (double x : v.values()) CHECK((x == 0.0 || x == 1.0));

    SampleSpace disc;
    disc.kind = DesignKind::discrete;
    for (int k = 0; k < 16; ++k) disc.catalog.push_back(k / 15.0);
    for (const auto& v : initial_batch(30, 72, disc, nullptr, rng))
        for (double x : v.values()) CHECK(std::find(disc.catalog.begin(), disc.catalog.end(), x) != disc.catalog.end());
}

TEST_CASE("mutate: structure and uniform placement")
{
    RngStream rng(2, 0);
    const std::vector<double> base(25, -1.0);
    const auto shape = GridShape::grid(5, 5);
    CHECK(differing(base, mutate(base, shape, 1, rng)) == 1);
    CHECK(differing(base, mutate(base, shape, 5, rng)) == 25);
    CHECK_THROWS_AS(mutate(base, shape, 6, rng), ContractViolation);

    std::vector<double> counts(16, 0.0);
    for (int k = 0; k < 10000; ++k) {
        const auto out = mutate(base, shape, 2, rng);
        CHECK(differing(base, out) <= 4);
        std::size_t r0 = 5, c0 = 5;
        for (std::size_t i = 0; i < 25; ++i)
            if (out[i] != base[i]) {
                r0 = std::min(r0, i / 5);
                c0 = std::min(c0, i % 5);
            }
        counts[r0 * 4 + c0] += 1.0;
    }
    double chi2 = 0.0;
    for (double n : counts) chi2 += (n - 625.0) * (n - 625.0) / 625.0;
    CHECK(chi2 < 37.70); // 15 degrees of freedom, p = 0.001
}

TEST_CASE("crossover: identity at k = 1, multiset, fixed points")
{
    RngStream rng(3, 0);
    std::vector<double> base(10);
    for (std::size_t i = 0; i < 10; ++i) base[i] = 0.05 * static_cast<double>(i + 1);
    CHECK(crossover(base, 1, rng) == base);
    double fixed = 0.0;
    for (int k = 0; k < 10000; ++k) {
        auto out = crossover(base, 10, rng);
        fixed += static_cast<double>(10 - differing(base, out));
        auto sorted = out;
        std::sort(sorted.begin(), sorted.end());
        CHECK(sorted == base);
        auto any = crossover(base, rng);
        std::sort(any.begin(), any.end());
        CHECK(any == base);
    }
    CHECK(std::abs(fixed / 10000.0 - 1.0) < 0.05);
}

TEST_CASE("convolution: identity kernel, constant field, brute force")
{
    const auto shape = GridShape::grid(5, 5);
    RngStream rng(4, 0);
    std::vector<double> base(25);
    for (auto& x : base) x = rng.uniform();
    CHECK(convolve_block(base, shape, 1, 1, 3, {{{1.0, 0.0}, {0.0, 0.0}}}) == base);

    const std::vector<double> flat(25, 0.4);
    const Kernel2 k{{{0.1, 0.2}, {0.3, 0.25}}};
    const auto out = convolve_block(flat, shape, 0, 0, 4, k);
    for (std::size_t i = 1; i < 4; ++i)
        for (std::size_t j = 1; j < 4; ++j) CHECK(out[i * 5 + j] == doctest::Approx(0.4 * 0.85).epsilon(1e-14));

    for (int t = 0; t < 200; ++t) {
        const std::size_t size = 2 + rng.index(4);
        const std::size_t r0 = rng.index(5 - size + 1), c0 = rng.index(5 - size + 1);
        const Kernel2 kk{{{rng.uniform(), rng.uniform()}, {rng.uniform(), rng.uniform()}}};
        const auto mine = convolve_block(base, shape, r0, c0, size, kk);
        const auto ref = brute_convolve(base, 5, r0, c0, size, kk);
        for (std::size_t i = 0; i < 25; ++i) CHECK(mine[i] == doctest::Approx(ref[i]).epsilon(1e-14));
        const auto pert = convolve_perturb(base, shape, size, rng);
        CHECK(differing(base, pert) <= size * size);
        for (double x : pert) CHECK((x >= 0.0 && x <= 1.0));
    }
}

TEST_CASE("thresholds")
{
    CHECK(threshold_at(std::vector<double>{0.9, 0.9, 0.9}, 0.5) == std::vector<double>{1, 1, 1});
    CHECK(threshold_at(std::vector<double>{0.2, 0.8}, 0.0) == std::vector<double>{1, 1});
    CHECK(threshold_at(std::vector<double>{0.2, 0.8}, 0.5) == std::vector<double>{0, 1});
    RngStream rng(5, 0);
    for (int k = 0; k < 100; ++k)
        for (double x : threshold_binary(std::vector<double>{0.1, 0.5, 0.7, 0.95}, rng)) CHECK((x == 0.0 || x == 1.0));
}

TEST_CASE("truss_mutate")
{
    RngStream rng(6, 0);
    std::vector<double> levels;
    for (int k = 0; k < 16; ++k) levels.push_back(k / 15.0);
    std::vector<double> base(72);
    for (auto& x : base) x = levels[rng.index(16)];
    CHECK(truss_mutate(base, 0.7, 0.0, levels, rng) == base);
    const auto one = truss_mutate(base, 1e-9, 1.0, {}, rng);
    CHECK(differing(base, one) <= 1);

    double frac = 0.0;
    for (int k = 0; k < 10000; ++k) {
        std::size_t m = 0;
        const auto out = truss_mutate(base, levels, rng, &m);
        CHECK(m >= 1);
        frac += static_cast<double>(m) / 72.0;
        for (double x : out) CHECK(std::find(levels.begin(), levels.end(), x) != levels.end());
    }
    CHECK(std::abs(frac / 10000.0 - 0.5) < 0.02);
}

TEST_CASE("generate_batch: table frequencies, volume residual, determinism")
{
    const auto prob = compliance::ComplianceProblem::square(5);
    const auto c = compliance::volume_weights(prob);
    RngStream init(7, 0);
    SampleSpace cont;
    const auto base = initial_batch(1, 25, cont, &c, init).front();
    const auto table = DisturbanceTable::compliance();

    RngStream rng(7, 1);
    const auto batch = generate_batch(base, GridShape::grid(5, 5), table, 10000, &c, rng);
    REQUIRE(batch.size() == 10000);
    std::vector<double> seen(table.entries.size(), 0.0);
    for (const auto& g : batch) {
        seen[g.entry] += 1.0;
        CHECK(std::abs(weighted_volume(g.design, c) - c.limit) < 1e-9);
        CHECK(g.tag == tag_of(table.entries[g.entry].op));
    }
    for (std::size_t e = 0; e < seen.size(); ++e)
        CHECK(std::abs(seen[e] / 10000.0 - table.entries[e].probability) < 0.015);

    RngStream again(7, 1);
    const auto second = generate_batch(base, GridShape::grid(5, 5), table, 50, &c, again);
    for (std::size_t i = 0; i < 50; ++i) CHECK(second[i].design == batch[i].design);

    DisturbanceTable single{{{Operator::mutation, 1, 1.0}}};
    RngStream r1(8, 0);
    for (const auto& g : generate_batch(base, GridShape::grid(5, 5), single, 100, nullptr, r1))
        CHECK(differing(base.values(), g.design.values()) <= 1);
}

TEST_CASE("generate_batch: binary and discrete spaces keep their invariants")
{
    RngStream rng(9, 0);
    const auto bin = DesignVector::binary(std::vector<double>{1, 0, 0, 1, 0, 1, 1, 0, 0, 1, 1, 0, 1, 0, 0, 1});
    for (const auto& g : generate_batch(bin, GridShape::grid(4, 4), DisturbanceTable::compliance(), 200, nullptr, rng))
        for (double x : g.design.values()) CHECK((x == 0.0 || x == 1.0));

    std::vector<double> levels;
    for (int k = 0; k < 16; ++k) levels.push_back(k / 15.0);
    const auto disc = DesignVector::discrete(std::vector<double>(18, levels[8]), levels);
    for (const auto& g : generate_batch(disc, GridShape::flat(18), DisturbanceTable::truss(), 200, nullptr, rng)) {
        CHECK(g.design.kind() == DesignKind::discrete);
        CHECK(g.tag == SampleTag::mutation);
    }
}
