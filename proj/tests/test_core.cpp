#include "solo/core/dataset.hpp"
#include "solo/core/design.hpp"
#include "solo/core/error.hpp"
#include "solo/core/rng.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

using namespace solo;

namespace {
VolumeConstraint uniform4(double v0) { return VolumeConstraint({0.25, 0.25, 0.25, 0.25}, v0); }
}

TEST_CASE("weighted_volume oracles")
{
    CHECK(weighted_volume(std::vector<double>{0.5, 0.5, 0.5, 0.5}, uniform4(0.5)) == doctest::Approx(0.5));
    CHECK(weighted_volume(std::vector<double>{1, 0, 0, 0}, uniform4(0.5)) == doctest::Approx(0.25));
    VolumeConstraint c({0.7, 0.3}, 0.5);
    CHECK(weighted_volume(std::vector<double>{0.2, 0.8}, c) == doctest::Approx(0.38).epsilon(1e-14));
    CHECK_THROWS_AS(weighted_volume(std::vector<double>{1.0}, c), ContractViolation);
}

TEST_CASE("weighted_volume is linear")
{
    RngStream rng(3, 0);
    VolumeConstraint c({0.1, 0.2, 0.3, 0.4}, 0.5);
    for (int k = 0; k < 100; ++k) {
        std::vector<double> v(4);
        for (auto& x : v) x = rng.uniform(0.0, 0.5);
        const double a = rng.uniform(0.0, 2.0);
        std::vector<double> av = v;
        for (auto& x : av) x *= a;
        CHECK(weighted_volume(av, c) == doctest::Approx(a * weighted_volume(v, c)).epsilon(1e-13));
    }
}

TEST_CASE("enforce_volume_constraint examples")
{
    const std::vector<double> half{0.5, 0.5, 0.5, 0.5};
    CHECK(enforce_volume_constraint(half, uniform4(0.5)) == half);

    const auto r = enforce_volume_constraint(std::vector<double>{0.2, 0.2, 0.2, 0.2}, uniform4(0.4));
    for (double x : r) CHECK(x == doctest::Approx(0.4).epsilon(1e-14));

    const auto clipped = enforce_volume_constraint(std::vector<double>{1.6, 0.2, 0.2, 0.0}, uniform4(0.5));
    CHECK(*std::max_element(clipped.begin(), clipped.end()) == 1.0);
    CHECK(std::abs(weighted_volume(clipped, uniform4(0.5)) - 0.5) < 1e-12);
    for (double x : clipped) CHECK((x >= 0.0 && x <= 1.0));
}

TEST_CASE("enforce_volume_constraint errors")
{
    CHECK_THROWS_AS(enforce_volume_constraint(std::vector<double>{0.5, 0.5, 0.5, 0.5}, uniform4(1.2)), InfeasibleConstraint);
    CHECK_THROWS_AS(enforce_volume_constraint(std::vector<double>{0.5, 0.5, 0.5, 0.5}, uniform4(0.0)), InfeasibleConstraint);
    CHECK_THROWS_AS(enforce_volume_constraint(std::vector<double>{0.5}, uniform4(0.5)), ContractViolation);
}

TEST_CASE("enforce_volume_constraint: idempotent, exact, monotone on 1000 random vectors")
{
    RngStream rng(11, 0);
    for (int k = 0; k < 1000; ++k) {
        const std::size_t n = 2 + rng.index(30);
        std::vector<double> w(n), v(n);
        for (auto& x : w) x = rng.uniform(0.1, 1.0);
        for (auto& x : v) x = rng.uniform(0.0, 1.5);
        double total = 0.0;
        for (double x : w) total += x;
        VolumeConstraint c(w, rng.uniform(0.05, 0.95) * total);
        const auto once = enforce_volume_constraint(v, c);
        const auto twice = enforce_volume_constraint(once, c);
        CHECK(once == twice);
        CHECK(std::abs(weighted_volume(once, c) - c.limit) < 1e-9);
        for (double x : once) CHECK((x >= 0.0 && x <= 1.0));
        // redistribution preserves order among entries that were not clipped
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (v[i] < v[j] && once[j] < 1.0) CHECK(once[i] <= once[j]);
    }
}

TEST_CASE("design vector invariants")
{
    CHECK_NOTHROW(DesignVector::continuous({0.0, 0.5, 1.0}));
    CHECK_THROWS_AS(DesignVector::continuous({1.5}), ContractViolation);
    CHECK_THROWS_AS(DesignVector::continuous({}), ContractViolation);
    CHECK_THROWS_AS(DesignVector::binary({0.5}), ContractViolation);
    CHECK_THROWS_AS(DesignVector::discrete({0.3}, {0.1, 0.5}), ContractViolation);
    const auto d = DesignVector::discrete({0.5, 0.1}, {0.1, 0.5});
    CHECK(d.kind() == DesignKind::discrete);
    CHECK(nearest_catalog_index(std::vector<double>{0.1, 0.5, 1.0}, 0.3) == 0);
    CHECK(nearest_catalog_index(std::vector<double>{0.1, 0.5, 1.0}, 0.31) == 1);
}

TEST_CASE("rng streams are reproducible and independent")
{
    RngStream a(42, 1), b(42, 1), c(42, 2);
    bool differs = false;
    for (int i = 0; i < 100; ++i) {
        const double x = a.uniform();
        CHECK(x == b.uniform());
        differs = differs || x != c.uniform();
    }
    CHECK(differs);
    auto n1 = RngStream::named(5, "sampler");
    auto n2 = RngStream::named(5, "sampler");
    CHECK(n1.next_u64() == n2.next_u64());
    double sum = 0.0, sq = 0.0;
    RngStream g(1, 0);
    for (int i = 0; i < 100000; ++i) {
        const double z = g.normal();
        sum += z;
        sq += z * z;
    }
    CHECK(std::abs(sum / 1e5) < 0.02);
    CHECK(std::abs(sq / 1e5 - 1.0) < 0.02);
}

TEST_CASE("dataset append rules and bit-exact JSONL round trip")
{
    Dataset d;
    RngStream rng(9, 0);
    for (int k = 0; k < 20; ++k) {
        std::vector<double> v(5);
        for (auto& x : v) x = rng.uniform();
        d.append({DesignVector::continuous(v), 1.0 / 3.0 + rng.uniform(), k % 2 == 0, SampleTag::mutation});
    }
    CHECK(d.n_train() == 20);
    CHECK_THROWS_AS(d.append({DesignVector::continuous({0.1, 0.1, 0.1, 0.1, 0.1}), 0.0, true, SampleTag::initial}), DataError);
    CHECK_THROWS_AS(d.append({DesignVector::continuous({0.1, 0.1, 0.1, 0.1, 0.1}), NAN, true, SampleTag::initial}), DataError);
    CHECK_THROWS_AS(d.append({DesignVector::continuous({0.1}), 1.0, true, SampleTag::initial}), ContractViolation);
    CHECK(d.n_train() == 20);

    std::stringstream ss;
    d.write_jsonl(ss);
    const Dataset back = Dataset::read_jsonl(ss);
    REQUIRE(back.n_train() == d.n_train());
    for (std::size_t i = 0; i < d.n_train(); ++i) {
        CHECK(back[i].design == d[i].design);
        CHECK(back[i].objective == d[i].objective);
        CHECK(back[i].feasible == d[i].feasible);
        CHECK(back[i].tag == d[i].tag);
    }

    Dataset t;
    t.append({DesignVector::discrete({0.2, 1.0}, {0.2, 0.6, 1.0}), 2.0, true, SampleTag::search_optimum});
    std::stringstream s2;
    t.write_jsonl(s2);
    CHECK(s2.str().find("search-optimum") != std::string::npos);
    const Dataset t2 = Dataset::read_jsonl(s2);
    CHECK(t2[0].design == t[0].design);
}
