#include <doctest.h>

#include <cmath>
#include <set>

#include "generate.hpp"
#include "helpers.hpp"

using namespace nlift;
using namespace nlift::testing;

TEST_CASE("generation is deterministic in the seed") {
    GenSpec spec;
    spec.n_vars = 30;
    spec.mean_degree = 4.0;
    spec.seed = 123;
    RawModel a = gen(spec);
    RawModel b = gen(spec);
    CHECK(a == b);
    spec.seed = 124;
    CHECK(!(gen(spec) == a));
}

TEST_CASE("spec validation rejects bad parameters") {
    GenSpec spec;
    spec.n_vars = 0;
    CHECK_THROWS_AS(spec.validate(), Error);
    spec = GenSpec{};
    spec.smin = 5;
    spec.smax = 2;
    CHECK_THROWS_AS(spec.validate(), Error);
    spec = GenSpec{};
    spec.edge_prob = 1.5;
    CHECK_THROWS_AS(spec.validate(), Error);
}

TEST_CASE("cardinalities, positivity and connectivity hold") {
    GenSpec spec;
    spec.n_vars = 50;
    spec.mean_degree = 6.0;
    spec.smin = 2;
    spec.smax = 6;
    spec.seed = 9;
    RawModel m = gen(spec);
    CHECK(m.n_vars == 50);
    for (int c : m.card) {
        CHECK(c >= 2);
        CHECK(c <= 6);
    }
    for (const auto& table : m.potentials)
        for (double v : table) CHECK(v > 0.0);
    // no isolated variables (topology retried otherwise)
    std::set<int> touched;
    for (const auto& scope : m.scopes)
        for (int v : scope) touched.insert(v);
    CHECK(touched.size() == 50);
}

TEST_CASE("edge count concentrates around n * mean_degree / 2") {
    GenSpec spec;
    spec.n_vars = 400;
    spec.mean_degree = 8.0;
    spec.seed = 31;
    RawModel m = gen(spec);
    long edges = 0;
    for (const auto& scope : m.scopes)
        if (scope.size() == 2) ++edges;
    double expected = 400 * 8.0 / 2.0;
    CHECK(std::fabs(edges - expected) < 0.25 * expected);
}

TEST_CASE("potts tables with alpha=2 beta=1 have the indicator structure") {
    // alpha * I(all equal) + beta in the energy domain means the potential
    // is exp(-3) on the diagonal and exp(-1) off it.
    GenSpec spec;
    spec.n_vars = 8;
    spec.mean_degree = 3.0;
    spec.potts = true;
    spec.potts_lo = spec.potts_hi = 2.0; // degenerate range pins alpha = 2
    spec.seed = 17;
    RawModel m = gen(spec);
    MrfInstance inst = to_energies(m);
    REQUIRE(!inst.cliques.empty());
    for (const auto& c : inst.cliques) {
        int s0 = c.shape[0], s1 = c.shape[1];
        for (int a = 0; a < s0; ++a)
            for (int b = 0; b < s1; ++b) {
                double v = c.table[static_cast<std::size_t>(a) * s1 + b];
                CHECK(near(v, a == b ? 4.0 : 2.0, 1e-9)); // alpha = beta = 2
            }
    }
}

TEST_CASE("potts parameters never underflow the potential domain") {
    GenSpec spec;
    spec.n_vars = 40;
    spec.mean_degree = 6.0;
    spec.potts = true;
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        spec.seed = seed;
        RawModel m = gen(spec);
        for (const auto& table : m.potentials)
            for (double v : table) REQUIRE(v > 0.0);
    }
}

TEST_CASE("high-order generation adds 3- and 4-cliques") {
    GenSpec spec;
    spec.n_vars = 20;
    spec.mean_degree = 4.0;
    spec.highorder = true;
    spec.n_hyper = 5;
    spec.seed = 77;
    RawModel m = gen(spec);
    int high = 0;
    for (const auto& scope : m.scopes) {
        if (scope.size() > 2) {
            CHECK(scope.size() <= 4);
            ++high;
        }
        std::set<int> uniq(scope.begin(), scope.end());
        CHECK(uniq.size() == scope.size()); // distinct members
    }
    CHECK(high == 5);
}

TEST_CASE("manifest lines are reproducible and spec-sensitive") {
    GenSpec spec;
    spec.n_vars = 10;
    spec.seed = 3;
    RawModel m = gen(spec);
    std::string a = manifest_line(spec, "x", m);
    std::string b = manifest_line(spec, "x", m);
    CHECK(a == b);
    spec.mean_degree = 9.0;
    CHECK(manifest_line(spec, "x", gen(spec)) != a);
}
