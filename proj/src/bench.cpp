#include "bench.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "rng.hpp"
#include "uai.hpp"

namespace nlift {

namespace fs = std::filesystem;

std::string solver_name(Solver s) {
    switch (s) {
        case Solver::neurolift: return "neurolift";
        case Solver::lbp: return "lbp";
        case Solver::trbp: return "trbp";
        case Solver::brute: return "brute";
    }
    return "?";
}

MrfInstance load_instance(const std::string& path, bool clamp, double clamp_eps) {
    if (fs::path(path).extension() == ".json")
        return pci_to_mrf(parse_pci_file(path));
    RawModel raw = parse_uai_file(path);
    return to_energies(raw, clamp ? std::optional<double>(clamp_eps) : std::nullopt);
}

namespace {

std::string fmt(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, p);
}

SolveReport solve_one(const MrfInstance& inst, const RunConfig& cfg, int trial) {
    std::uint64_t seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(trial));
    switch (cfg.solver) {
        case Solver::brute: {
            auto [x, e] = brute_force_map(inst, cfg.brute_budget);
            SolveReport rep;
            rep.best_assignment = x;
            rep.best_energy = e;
            rep.final_loss = std::numeric_limits<double>::quiet_NaN();
            rep.reason = "exact";
            rep.seed = seed;
            rep.trial = trial;
            rep.trajectory.push_back({0, rep.final_loss, e, e, 0.0});
            return rep;
        }
        case Solver::lbp:
        case Solver::trbp: {
            MpConfig mp = cfg.mp;
            mp.seed = seed;
            SolveReport rep = cfg.solver == Solver::lbp
                                  ? lbp_minsum(inst, mp)
                                  : trbp_minsum(inst, mp, cfg.rho);
            rep.trial = trial;
            return rep;
        }
        case Solver::neurolift: {
            LiftConfig lc = cfg.lift;
            lc.seed = seed;
            std::optional<double> limit;
            if (cfg.time_limit_s > 0.0) limit = cfg.time_limit_s;
            SolveReport rep = train(inst, lc, limit);
            rep.trial = trial;
            return rep;
        }
    }
    throw Error("unknown solver");
}

// checkpoint rows: trajectory sampled at the configured cadence plus the
// final state of the run
std::vector<const TrajectoryPoint*> checkpoints(const SolveReport& rep,
                                                const RunConfig& cfg) {
    std::vector<const TrajectoryPoint*> rows;
    const auto& tr = rep.trajectory;
    if (tr.empty()) return rows;
    if (cfg.checkpoint_iters > 0) {
        for (std::size_t k = 0; k < tr.size(); ++k)
            if (tr[k].iteration > 0 && tr[k].iteration % cfg.checkpoint_iters == 0 &&
                k + 1 < tr.size())
                rows.push_back(&tr[k]);
    } else if (cfg.checkpoint_s > 0.0) {
        double next = cfg.checkpoint_s;
        for (std::size_t k = 0; k + 1 < tr.size(); ++k) {
            if (tr[k].t_seconds >= next) {
                rows.push_back(&tr[k]);
                while (next <= tr[k].t_seconds) next += cfg.checkpoint_s;
            }
        }
    }
    rows.push_back(&tr.back());
    return rows;
}

} // namespace

RunOutput run_all(const RunConfig& cfg) {
    struct Job {
        std::size_t inst_idx;
        int trial;
    };
    std::vector<MrfInstance> instances;
    std::vector<std::string> names;
    for (const auto& path : cfg.instance_paths) {
        instances.push_back(load_instance(path, cfg.clamp, cfg.clamp_eps));
        names.push_back(fs::path(path).stem().string());
    }
    std::vector<Job> jobs;
    for (std::size_t i = 0; i < instances.size(); ++i)
        for (int t = 0; t < cfg.trials; ++t) jobs.push_back({i, t});

    std::vector<SolveReport> reports(jobs.size());
    int workers = std::max(1, cfg.jobs);
    if (workers == 1) {
        for (std::size_t k = 0; k < jobs.size(); ++k)
            reports[k] = solve_one(instances[jobs[k].inst_idx], cfg, jobs[k].trial);
    } else {
        std::mutex mu;
        std::size_t next = 0;
        auto worker = [&] {
            for (;;) {
                std::size_t k;
                {
                    std::lock_guard<std::mutex> lock(mu);
                    if (next >= jobs.size()) return;
                    k = next++;
                }
                reports[k] = solve_one(instances[jobs[k].inst_idx], cfg, jobs[k].trial);
            }
        };
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    RunOutput out;
    std::ostringstream csv;
    csv << "instance,solver,trial,seed,t_seconds,best_energy,loss_if_any,"
           "iterations,terminated_reason\n";
    for (std::size_t k = 0; k < jobs.size(); ++k) {
        const SolveReport& rep = reports[k];
        const std::string& name = names[jobs[k].inst_idx];
        for (const TrajectoryPoint* tp : checkpoints(rep, cfg)) {
            csv << name << ',' << solver_name(cfg.solver) << ',' << rep.trial << ','
                << rep.seed << ',' << fmt(tp->t_seconds) << ','
                << fmt(tp->best_energy) << ','
                << (std::isnan(tp->loss) ? std::string() : fmt(tp->loss)) << ','
                << tp->iteration << ',';
            // intermediate checkpoints are still running
            csv << (tp == &rep.trajectory.back() ? rep.reason : "running") << "\n";
        }
        out.assignments.push_back(
            {name + "." + solver_name(cfg.solver) + ".t" + std::to_string(rep.trial) +
                 ".assign",
             rep.best_assignment});
    }
    out.csv = csv.str();
    return out;
}

long run_to_files(const RunConfig& cfg) {
    if (cfg.output_csv.empty()) throw Error("output path required");
    RunOutput out = run_all(cfg);
    {
        std::ofstream f(cfg.output_csv);
        if (!f) throw IoError("cannot open " + cfg.output_csv + " for writing");
        f << out.csv;
    }
    fs::path dir = fs::path(cfg.output_csv).parent_path();
    for (const auto& [name, assignment] : out.assignments) {
        std::ofstream f(dir / name);
        if (!f) throw IoError("cannot write sidecar " + name);
        for (int s : assignment) f << s << "\n";
    }
    long rows = std::count(out.csv.begin(), out.csv.end(), '\n') - 1;
    return rows;
}

void landscape_to_csv(const MrfInstance& inst, const LiftConfig& cfg,
                      double half_range, int grid_n, std::uint64_t direction_seed,
                      const std::string& out_csv) {
    LiftedModel model;
    train(inst, cfg, std::nullopt, &model);
    std::vector<double> grid = landscape_grid(model, inst, half_range, grid_n,
                                              direction_seed);
    std::ofstream f(out_csv);
    if (!f) throw IoError("cannot open " + out_csv + " for writing");
    f << "alpha,beta,loss\n";
    for (int ia = 0; ia < grid_n; ++ia) {
        double alpha = -half_range + 2.0 * half_range * ia / (grid_n - 1);
        for (int ib = 0; ib < grid_n; ++ib) {
            double beta = -half_range + 2.0 * half_range * ib / (grid_n - 1);
            f << fmt(alpha) << ',' << fmt(beta) << ','
              << fmt(grid[static_cast<std::size_t>(ia) * grid_n + ib]) << "\n";
        }
    }
}

void export_instance_uai(const std::string& in_path, const std::string& out_path) {
    if (fs::path(in_path).extension() == ".json") {
        MrfInstance inst = pci_to_mrf(parse_pci_file(in_path));
        write_uai_file(from_energies(inst), out_path);
    } else {
        write_uai_file(parse_uai_file(in_path), out_path);
    }
}

std::string strip_time_column(const std::string& csv) {
    std::istringstream in(csv);
    std::ostringstream out;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream cells(line);
        std::string cell;
        int col = 0;
        bool first = true;
        while (std::getline(cells, cell, ',')) {
            if (col != 4) { // t_seconds
                if (!first) out << ',';
                out << cell;
                first = false;
            }
            ++col;
        }
        out << "\n";
    }
    return out.str();
}

} // namespace nlift
