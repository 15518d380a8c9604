#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mrf.hpp"

namespace nlift {

struct TrajectoryPoint {
    long iteration = 0;
    double loss = 0.0;        // NaN for solvers without a loss
    double energy = 0.0;      // decoded energy at this iteration
    double best_energy = 0.0; // best decoded energy so far
    double t_seconds = 0.0;   // wall clock since solve start
};

struct SolveReport {
    Assignment best_assignment;
    double best_energy = 0.0;
    double final_loss = 0.0; // NaN for solvers without a loss
    std::vector<TrajectoryPoint> trajectory;
    std::string reason; // converged | max_iters | time_limit | exact
    std::uint64_t seed = 0;
    int trial = 0;
    long iterations = 0;
};

struct AggregateReport {
    SolveReport best;                  // trial with the lowest best_energy
    std::vector<SolveReport> trials;
    double mean_energy = 0.0;
    double stddev_energy = 0.0;
};

} // namespace nlift
