#pragma once

#include <cstdint>
#include <optional>

#include "report.hpp"

namespace nlift {

struct MpConfig {
    int max_iters = 60;
    double damping = 0.1;
    std::uint64_t seed = 0;
    double convergence_tol = 1e-6; // max absolute message change
};

// Message state exposed for the TRBP/LBP equivalence property. Directed
// edge (i->j) messages are vectors over the states of j, min-normalized.
struct MessageState {
    std::vector<std::vector<double>> messages; // indexed by directed edge id
    long iteration = 0;
};

// Synchronous min-sum loopy BP on a pairwise instance. Throws
// HighOrderUnsupported when any clique has more than two variables.
SolveReport lbp_minsum(const MrfInstance& inst, const MpConfig& cfg,
                       MessageState* trace = nullptr);

// Tree-reweighted min-sum with edge appearance probabilities rho.
// Defaults to uniform rho = min(1, (n-1)/|E|).
SolveReport trbp_minsum(const MrfInstance& inst, const MpConfig& cfg,
                        std::optional<double> rho = std::nullopt,
                        MessageState* trace = nullptr);

} // namespace nlift
