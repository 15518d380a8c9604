#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "message_passing.hpp"

using namespace nlift;
using namespace nlift::testing;

TEST_CASE("lbp solves the symmetric two-node instance exactly") {
    MrfInstance inst = canonicalize(2, {2, 2}, {{{0, 1}, {0.0, 2.0, 2.0, 0.0}}});
    MpConfig cfg;
    SolveReport rep = lbp_minsum(inst, cfg);
    CHECK(rep.best_energy == 0.0);
    CHECK((rep.best_assignment == Assignment{0, 0} ||
           rep.best_assignment == Assignment{1, 1}));
}

TEST_CASE("zero iterations decodes from the unaries alone") {
    std::vector<EnergyTerm> terms;
    terms.push_back({{0}, {3.0, 1.0}});
    terms.push_back({{1}, {0.5, 2.0}});
    terms.push_back({{0, 1}, {0.0, -10.0, -10.0, 0.0}});
    MrfInstance inst = canonicalize(2, {2, 2}, terms);
    MpConfig cfg;
    cfg.max_iters = 0;
    SolveReport rep = lbp_minsum(inst, cfg);
    CHECK(rep.best_assignment == Assignment{1, 0});
    CHECK(rep.iterations == 0);
}

TEST_CASE("lbp rejects high-order instances") {
    MrfInstance inst =
        canonicalize(3, {2, 2, 2}, {{{0, 1, 2}, std::vector<double>(8, 0.0)}});
    MpConfig cfg;
    CHECK_THROWS_AS(lbp_minsum(inst, cfg), HighOrderUnsupported);
    CHECK_THROWS_AS(trbp_minsum(inst, cfg), HighOrderUnsupported);
}

TEST_CASE("trbp validates rho") {
    MrfInstance inst = canonicalize(2, {2, 2}, {{{0, 1}, {0.0, 2.0, 2.0, 0.0}}});
    MpConfig cfg;
    CHECK_THROWS_AS(trbp_minsum(inst, cfg, -0.5), InvalidRho);
    CHECK_THROWS_AS(trbp_minsum(inst, cfg, 1.5), InvalidRho);
    CHECK_NOTHROW(trbp_minsum(inst, cfg, 1.0));
}

TEST_CASE("lbp and trbp are exact on 200 random trees") {
    int exact_lbp = 0;
    int exact_trbp = 0;
    for (int k = 0; k < 200; ++k) {
        MrfInstance inst = random_tree_instance(1000 + k, 3 + k % 8);
        auto [xref, eref] = brute_force_map(inst);
        MpConfig cfg;
        cfg.max_iters = 100;
        cfg.damping = 0.0; // undamped messages converge exactly on trees
        SolveReport a = lbp_minsum(inst, cfg);
        SolveReport b = trbp_minsum(inst, cfg, 1.0);
        if (near(a.best_energy, eref, 1e-9)) ++exact_lbp;
        if (near(b.best_energy, eref, 1e-9)) ++exact_trbp;
    }
    CHECK(exact_lbp == 200);
    CHECK(exact_trbp == 200);
}

TEST_CASE("trbp with rho = 1 reproduces lbp messages bitwise") {
    for (int k = 0; k < 20; ++k) {
        MrfInstance inst = random_small_instance(2000 + k, 6);
        MpConfig cfg;
        cfg.max_iters = 25;
        MessageState lbp_state, trbp_state;
        SolveReport a = lbp_minsum(inst, cfg, &lbp_state);
        SolveReport b = trbp_minsum(inst, cfg, 1.0, &trbp_state);
        REQUIRE(lbp_state.messages.size() == trbp_state.messages.size());
        for (std::size_t e = 0; e < lbp_state.messages.size(); ++e)
            REQUIRE(lbp_state.messages[e] == trbp_state.messages[e]);
        CHECK(a.best_assignment == b.best_assignment);
        CHECK(a.best_energy == b.best_energy);
    }
}

TEST_CASE("damped runs are deterministic and report trajectories") {
    MrfInstance inst = random_small_instance(3000, 8);
    MpConfig cfg;
    cfg.max_iters = 40;
    SolveReport a = lbp_minsum(inst, cfg);
    SolveReport b = lbp_minsum(inst, cfg);
    CHECK(a.best_assignment == b.best_assignment);
    CHECK(a.best_energy == b.best_energy);
    REQUIRE(!a.trajectory.empty());
    // best-so-far is monotone
    for (std::size_t k = 1; k < a.trajectory.size(); ++k)
        CHECK(a.trajectory[k].best_energy <= a.trajectory[k - 1].best_energy);
}
