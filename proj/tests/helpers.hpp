#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "generate.hpp"
#include "mrf.hpp"
#include "rng.hpp"
#include "uai.hpp"

namespace nlift::testing {

// Three binary variables, three unaries, one edge, one 3-clique.
inline const char* example_uai_text() {
    return "MARKOV\n"
           "3\n"
           "2 2 2\n"
           "5\n"
           "1 0\n"
           "1 1\n"
           "1 2\n"
           "2 0 1\n"
           "3 0 1 2\n"
           "\n"
           "2\n"
           "0.1 0.9\n"
           "2\n"
           "0.1 10\n"
           "2\n"
           "0.5 0.5\n"
           "4\n"
           "0.1 1.0 1.0 0.1\n"
           "8\n"
           "0.1 2.0 0.1 0.1 0.1 0.1 0.1 2.0\n";
}

inline MrfInstance example_instance() { return to_energies(parse_uai(example_uai_text())); }

// Small random instance in energy form, suitable for brute force.
inline MrfInstance random_small_instance(std::uint64_t seed, int n = 6,
                                         bool highorder = false) {
    GenSpec spec;
    spec.n_vars = n;
    spec.edge_prob = 0.5;
    spec.smin = 2;
    spec.smax = 4;
    spec.highorder = highorder;
    spec.n_hyper = highorder ? 2 : 0;
    spec.seed = seed;
    return to_energies(gen(spec));
}

// Random tree-structured pairwise instance (exactness oracle for BP).
inline MrfInstance random_tree_instance(std::uint64_t seed, int n) {
    Rng rng(seed);
    std::vector<int> card(n);
    for (int i = 0; i < n; ++i) card[i] = static_cast<int>(rng.uniform_int(2, 4));
    std::vector<EnergyTerm> terms;
    for (int i = 0; i < n; ++i) {
        EnergyTerm t;
        t.scope = {i};
        for (int a = 0; a < card[i]; ++a) t.table.push_back(rng.uniform(-2.0, 2.0));
        terms.push_back(std::move(t));
    }
    for (int v = 1; v < n; ++v) {
        int parent = static_cast<int>(rng.uniform_int(0, v - 1));
        EnergyTerm t;
        t.scope = {parent, v};
        for (int a = 0; a < card[parent] * card[v]; ++a)
            t.table.push_back(rng.uniform(-2.0, 2.0));
        terms.push_back(std::move(t));
    }
    return canonicalize(n, card, terms);
}

inline bool near(double a, double b, double tol) { return std::fabs(a - b) <= tol; }

inline double rel_err(double a, double b) {
    double denom = std::max({std::fabs(a), std::fabs(b), 1e-12});
    return std::fabs(a - b) / denom;
}

} // namespace nlift::testing
