// Benchmark CLI. Links only the public C API.

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "neurolift.h"

namespace {

std::uint64_t default_seed() {
    if (const char* env = std::getenv("NLIFT_SEED"))
        return std::strtoull(env, nullptr, 10);
    return 0;
}

int die(nl_status st) {
    std::fprintf(stderr, "error: %s\n", nl_last_error());
    return st == NL_OK ? 1 : static_cast<int>(st);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"MRF MAP-inference benchmark driver"};
    app.require_subcommand(1);

    // ---- run ----
    auto* run = app.add_subcommand("run", "run a solver on one or more instances");
    std::string solver = "neurolift";
    std::vector<std::string> instances;
    std::string out_csv = "results.csv";
    nl_run_params rp;
    nl_run_params_default(&rp);
    rp.seed = default_seed();
    run->add_option("--solver", solver, "neurolift|lbp|trbp|brute")
        ->check(CLI::IsMember({"neurolift", "lbp", "trbp", "brute"}));
    run->add_option("instances", instances, "instance files (.uai or PCI .json)")
        ->required()
        ->check(CLI::ExistingFile);
    run->add_option("-o,--output", out_csv, "output CSV path");
    run->add_option("--trials", rp.trials, "independent trials per instance");
    run->add_option("--time-limit", rp.time_limit_s, "per-run wall-clock limit (s)");
    run->add_option("--checkpoint", rp.checkpoint_s, "checkpoint interval (s)");
    run->add_option("--checkpoint-iters", rp.checkpoint_iters,
                    "checkpoint by iteration count instead of wall clock");
    run->add_option("--jobs", rp.jobs, "worker threads for independent runs");
    run->add_option("--seed", rp.seed, "base seed (env NLIFT_SEED)");
    run->add_flag("--clamp", rp.clamp, "clamp non-positive potentials");
    run->add_option("--clamp-eps", rp.clamp_eps, "clamp epsilon");
    run->add_option("--budget", rp.brute_budget, "brute-force enumeration budget");
    run->add_option("--iters", rp.mp.max_iters, "LBP/TRBP iterations");
    run->add_option("--damping", rp.mp.damping, "LBP/TRBP damping factor");
    run->add_option("--rho", rp.mp.rho, "TRBP edge appearance probability");
    run->add_option("--dl", rp.lift.d_l, "lifting dimension");
    run->add_option("--layers", rp.lift.layers, "GNN layer count");
    run->add_option("--lr", rp.lift.lr, "learning rate");
    run->add_option("--train-iters", rp.lift.max_iters, "training iterations");
    run->add_option("--tol", rp.lift.tol, "early-stop loss tolerance");
    run->add_option("--patience", rp.lift.patience, "early-stop patience");
    run->add_option("--t0", rp.lift.t0, "initial softmax temperature");
    run->add_option("--anneal", rp.lift.anneal, "temperature decay factor");
    run->add_flag("--gcn", rp.lift.gcn_backbone, "use the GCN backbone");

    // ---- gen ----
    auto* gen = app.add_subcommand("gen", "generate a synthetic ER instance");
    nl_gen_params gp;
    nl_gen_params_default(&gp);
    gp.seed = default_seed();
    std::string gen_out = "instance.uai";
    std::string manifest;
    gen->add_option("-o,--output", gen_out, "output .uai path");
    gen->add_option("--nodes", gp.n_vars, "variable count");
    gen->add_option("--edge-prob", gp.edge_prob, "ER edge probability");
    gen->add_option("--mean-degree", gp.mean_degree, "target mean degree");
    gen->add_flag("--potts", gp.potts, "Potts energies");
    gen->add_flag("--highorder", gp.highorder, "add 3/4-cliques");
    gen->add_option("--n-hyper", gp.n_hyper, "number of high-order cliques");
    gen->add_option("--smin", gp.smin, "minimum state count");
    gen->add_option("--smax", gp.smax, "maximum state count");
    gen->add_option("--seed", gp.seed, "seed (env NLIFT_SEED)");
    gen->add_option("--manifest", manifest, "append a manifest line to this file");

    // ---- convert-pci ----
    auto* conv = app.add_subcommand("convert-pci", "reduce a PCI problem to UAI");
    std::string conv_in, conv_out = "pci.uai";
    conv->add_option("input", conv_in, "PCI JSON file")->required()->check(CLI::ExistingFile);
    conv->add_option("-o,--output", conv_out, "output .uai path");

    // ---- export ----
    auto* exp = app.add_subcommand("export", "re-emit an instance as UAI");
    std::string exp_in, exp_out = "out.uai";
    exp->add_option("input", exp_in, "instance file (.uai or PCI .json)")
        ->required()
        ->check(CLI::ExistingFile);
    exp->add_option("-o,--output", exp_out, "output .uai path");

    // ---- landscape ----
    auto* land = app.add_subcommand("landscape",
                                    "train, then sample the loss landscape grid");
    std::string land_in, land_out = "landscape.csv";
    nl_lift_params lp;
    nl_lift_params_default(&lp);
    lp.seed = default_seed();
    double half_range = 1.0;
    int grid_n = 100;
    std::uint64_t dir_seed = 0;
    land->add_option("instance", land_in, "instance file")->required()->check(CLI::ExistingFile);
    land->add_option("-o,--output", land_out, "output CSV path");
    land->add_option("--range", half_range, "half range r; grid spans [-r, r]");
    land->add_option("--grid", grid_n, "grid resolution per axis");
    land->add_option("--dir-seed", dir_seed, "seed for the two random directions");
    land->add_option("--dl", lp.d_l, "lifting dimension");
    land->add_option("--layers", lp.layers, "GNN layer count");
    land->add_option("--lr", lp.lr, "learning rate");
    land->add_option("--train-iters", lp.max_iters, "training iterations");
    land->add_option("--seed", lp.seed, "training seed");

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) {
        if (solver == "lbp") rp.solver = NL_SOLVER_LBP;
        else if (solver == "trbp") rp.solver = NL_SOLVER_TRBP;
        else if (solver == "brute") rp.solver = NL_SOLVER_BRUTE;
        else rp.solver = NL_SOLVER_NEUROLIFT;
        std::vector<const char*> paths;
        for (const auto& s : instances) paths.push_back(s.c_str());
        rp.instance_paths = paths.data();
        rp.n_instances = static_cast<int>(paths.size());
        long rows = 0;
        if (nl_status st = nl_run(&rp, out_csv.c_str(), &rows); st != NL_OK)
            return die(st);
        std::printf("wrote %ld rows to %s\n", rows, out_csv.c_str());
        return 0;
    }

    if (gen->parsed()) {
        if (nl_status st = nl_gen_uai(&gp, gen_out.c_str(),
                                      manifest.empty() ? nullptr : manifest.c_str());
            st != NL_OK)
            return die(st);
        std::printf("wrote %s\n", gen_out.c_str());
        return 0;
    }

    if (conv->parsed() || exp->parsed()) {
        const std::string& in = conv->parsed() ? conv_in : exp_in;
        const std::string& out = conv->parsed() ? conv_out : exp_out;
        nl_instance* inst = nullptr;
        nl_status st = in.size() > 5 && in.substr(in.size() - 5) == ".json"
                           ? nl_instance_load_pci(in.c_str(), &inst)
                           : nl_instance_load_uai(in.c_str(), 0, 0.0, &inst);
        if (st != NL_OK) return die(st);
        st = nl_instance_export_uai(inst, out.c_str());
        nl_instance_free(inst);
        if (st != NL_OK) return die(st);
        std::printf("wrote %s\n", out.c_str());
        return 0;
    }

    if (land->parsed()) {
        nl_instance* inst = nullptr;
        nl_status st = land_in.size() > 5 && land_in.substr(land_in.size() - 5) == ".json"
                           ? nl_instance_load_pci(land_in.c_str(), &inst)
                           : nl_instance_load_uai(land_in.c_str(), 0, 0.0, &inst);
        if (st != NL_OK) return die(st);
        nl_report* rep = nullptr;
        nl_model* model = nullptr;
        st = nl_solve_neurolift(inst, &lp, &rep, &model);
        if (st != NL_OK) {
            nl_instance_free(inst);
            return die(st);
        }
        std::printf("trained: best energy %.6f, loss %.6f (%s)\n",
                    nl_report_best_energy(rep), nl_report_final_loss(rep),
                    nl_report_reason(rep));
        st = nl_landscape_csv(model, inst, half_range, grid_n, dir_seed,
                              land_out.c_str());
        nl_report_free(rep);
        nl_model_free(model);
        nl_instance_free(inst);
        if (st != NL_OK) return die(st);
        std::printf("wrote %s\n", land_out.c_str());
        return 0;
    }

    return 0;
}
