#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "rng.hpp"
#include "uai.hpp"

using namespace nlift;
using namespace nlift::testing;

TEST_CASE("parse_uai reads the three-variable example") {
    RawModel m = parse_uai(example_uai_text());
    CHECK(m.n_vars == 3);
    CHECK(m.card == std::vector<int>{2, 2, 2});
    REQUIRE(m.scopes.size() == 5);
    CHECK(m.scopes[0] == std::vector<int>{0});
    CHECK(m.scopes[3] == std::vector<int>{0, 1});
    CHECK(m.scopes[4] == std::vector<int>{0, 1, 2});
    CHECK(m.potentials[0] == std::vector<double>{0.1, 0.9});
    CHECK(m.potentials[1] == std::vector<double>{0.1, 10.0});
    CHECK(m.potentials[2] == std::vector<double>{0.5, 0.5});
    CHECK(m.potentials[3] == std::vector<double>{0.1, 1.0, 1.0, 0.1});
    CHECK(m.potentials[4] ==
          std::vector<double>{0.1, 2.0, 0.1, 0.1, 0.1, 0.1, 0.1, 2.0});
}

TEST_CASE("parse_uai tolerates comments and arbitrary whitespace") {
    RawModel a = parse_uai(example_uai_text());
    RawModel b = parse_uai("// header comment\nMARKOV // type\n 3\n2 2 2 5 1 0 1 1 "
                           "1 2 2 0 1 3 0 1 2 2 0.1 0.9 2 0.1 10 2 0.5 0.5 4 0.1 "
                           "1.0 1.0 0.1 8 0.1 2.0 0.1 0.1 0.1 0.1 0.1 2.0");
    CHECK(a == b);
}

TEST_CASE("parse_uai rejects malformed input") {
    CHECK_THROWS_AS(parse_uai("BAYES\n1\n2\n0\n"), UnknownPreamble);
    CHECK_THROWS_AS(parse_uai("MARKOV\n2\n2 2\n1\n2 0 1\n"), TruncatedFile);
    CHECK_THROWS_AS(parse_uai("MARKOV\n2\n2 2\n1\n2 0 1\n3\n1 2 3\n"),
                    TableSizeMismatch);
    CHECK_THROWS_AS(parse_uai("MARKOV\n2\n2 2\n1\n2 0 5\n4\n1 2 3 4\n"),
                    IndexOutOfRange);
    CHECK_THROWS_AS(parse_uai("MARKOV\n-1\n"), ParseError);
}

TEST_CASE("write_uai then parse_uai is the identity") {
    RawModel m = parse_uai(example_uai_text());
    CHECK(parse_uai(write_uai(m)) == m);
}

TEST_CASE("to_energies applies -log base e") {
    MrfInstance inst = example_instance();
    CHECK(inst.n_vars == 3);
    // unary 0: -log(0.1), -log(0.9)
    CHECK(near(inst.unary[0][0], 2.302585092994046, 1e-12));
    CHECK(near(inst.unary[0][1], -std::log(0.9), 1e-12));
    // potential 10 -> negative energy
    CHECK(near(inst.unary[1][1], -2.302585092994046, 1e-12));
    // singleton scopes folded away: one pairwise + one 3-clique remain
    REQUIRE(inst.cliques.size() == 2);
    CHECK(inst.cliques[0].scope == std::vector<int>{0, 1});
    CHECK(inst.cliques[1].scope == std::vector<int>{0, 1, 2});
    CHECK(near(inst.cliques[0].table[0], 2.302585092994046, 1e-12));
    CHECK(inst.cliques[0].table[1] == 0.0);
}

TEST_CASE("to_energies rejects or clamps non-positive potentials") {
    RawModel m;
    m.n_vars = 1;
    m.card = {2};
    m.scopes = {{0}};
    m.potentials = {{0.0, 1.0}};
    CHECK_THROWS_AS(to_energies(m), NonPositivePotential);
    MrfInstance inst = to_energies(m, 1e-30);
    CHECK(near(inst.unary[0][0], -std::log(1e-30), 1e-9));
}

TEST_CASE("1000 random models survive the energy round trip") {
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
        GenSpec spec;
        spec.n_vars = 4 + k % 5;
        spec.edge_prob = 0.6;
        spec.highorder = k % 3 == 0;
        spec.n_hyper = spec.highorder ? 1 : 0;
        spec.potts = k % 2 == 1;
        spec.seed = 9000 + k;
        RawModel m = gen(spec);
        // textual round trip is exact
        REQUIRE(parse_uai(write_uai(m)) == m);
        // energy round trip is within 1e-12 relative
        RawModel back = from_energies(to_energies(m));
        REQUIRE(back.n_vars == m.n_vars);
        REQUIRE(back.card == m.card);
        MrfInstance a = to_energies(m);
        MrfInstance b = to_energies(back);
        REQUIRE(a.cliques.size() == b.cliques.size());
        for (int i = 0; i < a.n_vars; ++i)
            for (std::size_t s = 0; s < a.unary[i].size(); ++s)
                worst = std::max(worst, rel_err(a.unary[i][s], b.unary[i][s]));
        for (std::size_t c = 0; c < a.cliques.size(); ++c)
            for (std::size_t t = 0; t < a.cliques[c].table.size(); ++t)
                worst = std::max(worst,
                                 rel_err(a.cliques[c].table[t], b.cliques[c].table[t]));
    }
    CHECK(worst < 1e-12);
}
