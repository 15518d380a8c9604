#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "common.hpp"

namespace nlift {

using Assignment = std::vector<int>;

// Dense energy table over an ordered scope of distinct variables.
// Row-major layout, last scope variable varies fastest.
struct Clique {
    std::vector<int> scope;
    std::vector<int> shape;    // cardinalities of the scope variables
    std::vector<double> table; // size == product(shape)

    std::size_t table_size() const;
    double at(const Assignment& x) const;
};

// Canonical energy-based MRF: unary vectors plus clique tensors.
// Invariants (established by canonicalize): scopes sorted ascending,
// at most one clique per scope set, singleton scopes folded into unaries.
struct MrfInstance {
    int n_vars = 0;
    std::vector<int> card;                  // per-variable state counts
    std::vector<std::vector<double>> unary; // zero vectors when absent
    std::vector<Clique> cliques;

    bool valid_assignment(const Assignment& x) const;
    int max_card() const;
    bool pairwise_only() const;
};

struct PairwiseGraph {
    int n_vars = 0;
    std::vector<std::pair<int, int>> edges; // i < j, deduplicated, sorted
    std::vector<std::vector<int>> adj;
};

// Instance lifted to a uniform state count S, padded entries filled with
// the max of the original table; mask[i][a] is true iff a < card[i].
struct PaddedInstance {
    MrfInstance base;
    int S = 0;
    std::vector<std::vector<double>> padded_unary;   // n_vars rows of length S
    std::vector<Clique> padded_cliques;              // every axis length S
    std::vector<std::vector<bool>> mask;
};

// Raw building block for canonicalize: scopes+tables already in energy form,
// no ordering or dedup guarantees.
struct EnergyTerm {
    std::vector<int> scope;
    std::vector<double> table;
};

MrfInstance canonicalize(int n_vars, const std::vector<int>& card,
                         const std::vector<EnergyTerm>& terms);

double energy(const MrfInstance& inst, const Assignment& x);

PairwiseGraph clique_expansion(const MrfInstance& inst);

PaddedInstance pad(const MrfInstance& inst);

// Exhaustive enumeration; ties broken toward the lexicographically
// smallest assignment. Throws TooLarge when the state space exceeds budget.
std::pair<Assignment, double> brute_force_map(const MrfInstance& inst,
                                              std::uint64_t budget = 2000000);

// Flat row-major index of assignment restricted to scope.
std::size_t flat_index(const std::vector<int>& scope, const std::vector<int>& shape,
                       const Assignment& x);

} // namespace nlift
