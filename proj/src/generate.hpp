#pragma once

#include <cstdint>
#include <string>

#include "uai.hpp"

namespace nlift {

// Synthetic ER instance description. Potentials are emitted in the
// potential domain so the standard -log pipeline applies downstream.
struct GenSpec {
    int n_vars = 100;
    double edge_prob = 0.0;   // used when > 0
    double mean_degree = 8.0; // else p = mean_degree / (n - 1)
    bool highorder = false;
    int n_hyper = 0;          // number of high-order cliques when highorder
    double p_size3 = 0.5;     // clique-size distribution over {3, 4}
    bool potts = false;
    int smin = 2, smax = 6;   // per-variable state count range
    double pot_lo = 0.2, pot_hi = 3.0;       // random-energy potential range
    double potts_lo = 1e-5, potts_hi = 1000; // alpha/beta log-uniform range
    std::uint64_t seed = 0;

    void validate() const;
};

RawModel gen(const GenSpec& spec);

// One manifest line: name, n_vars, n_cliques, seed, spec hash.
std::string manifest_line(const GenSpec& spec, const std::string& name,
                          const RawModel& model);

} // namespace nlift
