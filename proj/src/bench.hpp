#pragma once

#include <optional>
#include <string>
#include <vector>

#include "generate.hpp"
#include "gnn.hpp"
#include "message_passing.hpp"
#include "pci.hpp"
#include "report.hpp"

namespace nlift {

enum class Solver { neurolift, lbp, trbp, brute };

struct RunConfig {
    Solver solver = Solver::neurolift;
    std::vector<std::string> instance_paths;
    double time_limit_s = 0.0;   // 0 = unlimited
    double checkpoint_s = 200.0; // wall-clock checkpoint interval
    long checkpoint_iters = 0;   // if > 0, checkpoint by iteration instead
    int trials = 1;
    std::uint64_t seed = 0;
    LiftConfig lift;
    MpConfig mp;
    std::optional<double> rho; // TRBP edge weight override
    std::uint64_t brute_budget = 2000000;
    bool clamp = false;
    double clamp_eps = 1e-30;
    std::string output_csv;
    int jobs = 1;
};

// Loads a .uai (potentials, -log applied) or .json (PCI) instance.
MrfInstance load_instance(const std::string& path, bool clamp, double clamp_eps);

std::string solver_name(Solver s);

// CSV body (no timestamps removed): header plus one row per
// (instance, trial, checkpoint). Assignments are returned per run so the
// caller can write sidecar files.
struct RunOutput {
    std::string csv;
    // per (instance, trial): sidecar name and the assignment
    std::vector<std::pair<std::string, Assignment>> assignments;
};

RunOutput run_all(const RunConfig& cfg);

// Full CLI-facing entry: writes the CSV and one sidecar assignment file per
// (instance, trial) next to it. Returns number of rows written.
long run_to_files(const RunConfig& cfg);

void landscape_to_csv(const MrfInstance& inst, const LiftConfig& cfg,
                      double half_range, int grid_n, std::uint64_t direction_seed,
                      const std::string& out_csv);

void export_instance_uai(const std::string& in_path, const std::string& out_path);

// CSV column for wall-clock time; determinism comparisons strip it.
std::string strip_time_column(const std::string& csv);

} // namespace nlift
