#include "neurolift.h"

#include <algorithm>
#include <charconv>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <string>

#include "bench.hpp"
#include "gnn.hpp"
#include "uai.hpp"

using namespace nlift;

struct nl_instance {
    MrfInstance inst;
};
struct nl_report {
    SolveReport rep;
};
struct nl_model {
    LiftedModel model;
};

namespace {

thread_local std::string g_last_error;

nl_status fail(nl_status code, const char* what) {
    g_last_error = what;
    return code;
}

template <typename F>
nl_status guarded(F&& f) {
    try {
        f();
        return NL_OK;
    } catch (const ParseError& e) {
        return fail(NL_ERR_PARSE, e.what());
    } catch (const IoError& e) {
        return fail(NL_ERR_IO, e.what());
    } catch (const HighOrderUnsupported& e) {
        return fail(NL_ERR_UNSUPPORTED, e.what());
    } catch (const TooLarge& e) {
        return fail(NL_ERR_TOO_LARGE, e.what());
    } catch (const Error& e) {
        return fail(NL_ERR_INVALID, e.what());
    } catch (const std::exception& e) {
        return fail(NL_ERR_INTERNAL, e.what());
    }
}

LiftConfig to_lift_config(const nl_lift_params& p) {
    LiftConfig c;
    c.d_l = p.d_l;
    c.layers = p.layers;
    c.lr = p.lr;
    c.max_iters = p.max_iters;
    c.tol = p.tol;
    c.patience = p.patience;
    c.t0 = p.t0;
    c.anneal = p.anneal;
    c.seed = p.seed;
    c.backbone = p.gcn_backbone ? Backbone::gcn : Backbone::graphsage;
    return c;
}

MpConfig to_mp_config(const nl_mp_params& p) {
    MpConfig c;
    c.max_iters = p.max_iters;
    c.damping = p.damping;
    c.seed = p.seed;
    return c;
}

} // namespace

extern "C" {

const char* nl_last_error(void) { return g_last_error.c_str(); }

nl_status nl_instance_load_uai(const char* path, int clamp, double clamp_eps,
                               nl_instance** out) {
    if (!path || !out) return fail(NL_ERR_INVALID, "null argument");
    return guarded([&] {
        auto* h = new nl_instance{load_instance(path, clamp != 0, clamp_eps)};
        *out = h;
    });
}

nl_status nl_instance_load_pci(const char* path, nl_instance** out) {
    if (!path || !out) return fail(NL_ERR_INVALID, "null argument");
    return guarded([&] { *out = new nl_instance{pci_to_mrf(parse_pci_file(path))}; });
}

void nl_instance_free(nl_instance* inst) { delete inst; }

int nl_instance_n_vars(const nl_instance* inst) { return inst ? inst->inst.n_vars : 0; }

int nl_instance_n_cliques(const nl_instance* inst) {
    return inst ? static_cast<int>(inst->inst.cliques.size()) : 0;
}

int nl_instance_cardinality(const nl_instance* inst, int var) {
    if (!inst || var < 0 || var >= inst->inst.n_vars) return 0;
    return inst->inst.card[var];
}

nl_status nl_instance_energy(const nl_instance* inst, const int* assignment,
                             int len, double* out) {
    if (!inst || !assignment || !out) return fail(NL_ERR_INVALID, "null argument");
    return guarded([&] {
        Assignment x(assignment, assignment + len);
        if (!inst->inst.valid_assignment(x)) throw Error("invalid assignment");
        *out = energy(inst->inst, x);
    });
}

nl_status nl_instance_export_uai(const nl_instance* inst, const char* path) {
    if (!inst || !path) return fail(NL_ERR_INVALID, "null argument");
    return guarded([&] { write_uai_file(from_energies(inst->inst), path); });
}

void nl_gen_params_default(nl_gen_params* p) {
    *p = nl_gen_params{};
    p->n_vars = 100;
    p->mean_degree = 8.0;
    p->smin = 2;
    p->smax = 6;
}

nl_status nl_gen_uai(const nl_gen_params* p, const char* out_path,
                     const char* manifest_path_or_null) {
    if (!p || !out_path) return fail(NL_ERR_INVALID, "null argument");
    return guarded([&] {
        GenSpec spec;
        spec.n_vars = p->n_vars;
        spec.edge_prob = p->edge_prob;
        spec.mean_degree = p->mean_degree;
        spec.highorder = p->highorder != 0;
        spec.n_hyper = p->n_hyper;
        spec.potts = p->potts != 0;
        spec.smin = p->smin;
        spec.smax = p->smax;
        spec.seed = p->seed;
        RawModel m = gen(spec);
        write_uai_file(m, out_path);
        if (manifest_path_or_null) {
            std::ofstream f(manifest_path_or_null, std::ios::app);
            if (!f) throw IoError("cannot open manifest for append");
            f << manifest_line(spec, std::filesystem::path(out_path).stem().string(), m)
              << "\n";
        }
    });
}

void nl_mp_params_default(nl_mp_params* p) {
    *p = nl_mp_params{};
    p->max_iters = 60;
    p->damping = 0.1;
    p->rho = 0.0;
}

void nl_lift_params_default(nl_lift_params* p) {
    *p = nl_lift_params{};
    LiftConfig c;
    p->d_l = c.d_l;
    p->layers = c.layers;
    p->lr = c.lr;
    p->max_iters = c.max_iters;
    p->tol = c.tol;
    p->patience = c.patience;
    p->t0 = c.t0;
    p->anneal = c.anneal;
}

nl_status nl_solve_brute(const nl_instance* inst, uint64_t budget, nl_report** out) {
    if (!inst || !out) return fail(NL_ERR_INVALID, "null argument");
    return guarded([&] {
        auto [x, e] = brute_force_map(inst->inst, budget ? budget : 2000000);
        auto* h = new nl_report{};
        h->rep.best_assignment = x;
        h->rep.best_energy = e;
        h->rep.final_loss = std::numeric_limits<double>::quiet_NaN();
        h->rep.reason = "exact";
        h->rep.trajectory.push_back({0, h->rep.final_loss, e, e, 0.0});
        *out = h;
    });
}

nl_status nl_solve_lbp(const nl_instance* inst, const nl_mp_params* p, nl_report** out) {
    if (!inst || !p || !out) return fail(NL_ERR_INVALID, "null argument");
    return guarded([&] { *out = new nl_report{lbp_minsum(inst->inst, to_mp_config(*p))}; });
}

nl_status nl_solve_trbp(const nl_instance* inst, const nl_mp_params* p, nl_report** out) {
    if (!inst || !p || !out) return fail(NL_ERR_INVALID, "null argument");
    return guarded([&] {
        std::optional<double> rho;
        if (p->rho > 0.0) rho = p->rho;
        *out = new nl_report{trbp_minsum(inst->inst, to_mp_config(*p), rho)};
    });
}

nl_status nl_solve_neurolift(const nl_instance* inst, const nl_lift_params* p,
                             nl_report** out, nl_model** model_out) {
    if (!inst || !p || !out) return fail(NL_ERR_INVALID, "null argument");
    return guarded([&] {
        std::optional<double> limit;
        if (p->time_limit_s > 0.0) limit = p->time_limit_s;
        auto* m = model_out ? new nl_model{} : nullptr;
        *out = new nl_report{
            train(inst->inst, to_lift_config(*p), limit, m ? &m->model : nullptr)};
        if (model_out) *model_out = m;
    });
}

void nl_report_free(nl_report* rep) { delete rep; }
void nl_model_free(nl_model* model) { delete model; }

double nl_report_best_energy(const nl_report* rep) { return rep->rep.best_energy; }
double nl_report_final_loss(const nl_report* rep) { return rep->rep.final_loss; }
long nl_report_iterations(const nl_report* rep) { return rep->rep.iterations; }
uint64_t nl_report_seed(const nl_report* rep) { return rep->rep.seed; }
const char* nl_report_reason(const nl_report* rep) { return rep->rep.reason.c_str(); }

int nl_report_assignment_len(const nl_report* rep) {
    return static_cast<int>(rep->rep.best_assignment.size());
}

nl_status nl_report_assignment(const nl_report* rep, int* out, int len) {
    if (!rep || !out) return fail(NL_ERR_INVALID, "null argument");
    if (len < static_cast<int>(rep->rep.best_assignment.size()))
        return fail(NL_ERR_INVALID, "buffer too small");
    std::copy(rep->rep.best_assignment.begin(), rep->rep.best_assignment.end(), out);
    return NL_OK;
}

long nl_report_trajectory_len(const nl_report* rep) {
    return static_cast<long>(rep->rep.trajectory.size());
}

nl_status nl_report_trajectory_point(const nl_report* rep, long k, long* iteration,
                                     double* loss, double* best_energy,
                                     double* t_seconds) {
    if (!rep || k < 0 || k >= nl_report_trajectory_len(rep))
        return fail(NL_ERR_INVALID, "trajectory index out of range");
    const TrajectoryPoint& tp = rep->rep.trajectory[k];
    if (iteration) *iteration = tp.iteration;
    if (loss) *loss = tp.loss;
    if (best_energy) *best_energy = tp.best_energy;
    if (t_seconds) *t_seconds = tp.t_seconds;
    return NL_OK;
}

nl_status nl_landscape_csv(nl_model* model, const nl_instance* inst,
                           double half_range, int grid_n, uint64_t direction_seed,
                           const char* out_csv) {
    if (!model || !inst || !out_csv) return fail(NL_ERR_INVALID, "null argument");
    return guarded([&] {
        std::vector<double> grid = landscape_grid(model->model, inst->inst,
                                                  half_range, grid_n, direction_seed);
        std::ofstream f(out_csv);
        if (!f) throw IoError("cannot open landscape output");
        f << "alpha,beta,loss\n";
        auto fmtd = [](double v) {
            char buf[64];
            auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
            (void)ec;
            return std::string(buf, p);
        };
        for (int ia = 0; ia < grid_n; ++ia) {
            double alpha = -half_range + 2.0 * half_range * ia / (grid_n - 1);
            for (int ib = 0; ib < grid_n; ++ib) {
                double beta = -half_range + 2.0 * half_range * ib / (grid_n - 1);
                f << fmtd(alpha) << ',' << fmtd(beta) << ','
                  << fmtd(grid[static_cast<std::size_t>(ia) * grid_n + ib]) << "\n";
            }
        }
    });
}

void nl_run_params_default(nl_run_params* p) {
    *p = nl_run_params{};
    p->trials = 1;
    p->checkpoint_s = 200.0;
    p->jobs = 1;
    p->clamp_eps = 1e-30;
    p->brute_budget = 2000000;
    nl_mp_params_default(&p->mp);
    nl_lift_params_default(&p->lift);
}

nl_status nl_run(const nl_run_params* p, const char* out_csv, long* rows_out) {
    if (!p || !out_csv) return fail(NL_ERR_INVALID, "null argument");
    return guarded([&] {
        RunConfig cfg;
        switch (p->solver) {
            case NL_SOLVER_NEUROLIFT: cfg.solver = Solver::neurolift; break;
            case NL_SOLVER_LBP: cfg.solver = Solver::lbp; break;
            case NL_SOLVER_TRBP: cfg.solver = Solver::trbp; break;
            case NL_SOLVER_BRUTE: cfg.solver = Solver::brute; break;
        }
        for (int i = 0; i < p->n_instances; ++i)
            cfg.instance_paths.push_back(p->instance_paths[i]);
        cfg.trials = p->trials;
        cfg.time_limit_s = p->time_limit_s;
        cfg.checkpoint_s = p->checkpoint_s;
        cfg.checkpoint_iters = p->checkpoint_iters;
        cfg.jobs = p->jobs;
        cfg.clamp = p->clamp != 0;
        cfg.clamp_eps = p->clamp_eps;
        cfg.brute_budget = p->brute_budget;
        cfg.seed = p->seed;
        cfg.mp = to_mp_config(p->mp);
        if (p->mp.rho > 0.0) cfg.rho = p->mp.rho;
        cfg.lift = to_lift_config(p->lift);
        if (p->lift.time_limit_s > 0.0 && cfg.time_limit_s <= 0.0)
            cfg.time_limit_s = p->lift.time_limit_s;
        cfg.output_csv = out_csv;
        long rows = run_to_files(cfg);
        if (rows_out) *rows_out = rows;
    });
}

} // extern "C"
