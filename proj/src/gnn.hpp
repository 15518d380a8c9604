#pragma once

#include <cstdint>
#include <optional>

#include "report.hpp"
#include "tensor.hpp"

namespace nlift {

enum class Backbone { graphsage, gcn };

struct LiftConfig {
    int d_l = 1024;       // lifting dimension
    int layers = 5;       // K
    double lr = 1e-4;
    int max_iters = 150;
    double tol = 1e-4;    // early-stop absolute loss tolerance
    int patience = 10;    // consecutive small-change iterations before stopping
    double t0 = 5.0;      // initial softmax temperature
    double anneal = 0.95; // temperature decay factor, T -> max(1, anneal*T)
    std::uint64_t seed = 0;
    Backbone backbone = Backbone::graphsage;

    void validate() const;
};

// Learnable state: free per-node embedding table, per-layer aggregation
// weights, Jumping-Knowledge projection and the masked classifier head.
struct LiftedModel {
    LiftConfig cfg;
    int n_vars = 0;
    int S = 0;
    Tensor h0;                         // n x d_l
    std::vector<Tensor> w_self;        // K tensors, d_l x d_l
    std::vector<Tensor> w_nbr;         // K tensors, d_l x d_l (graphsage only)
    Tensor jk_proj;                    // (K*d_l) x d_l
    Tensor head_w;                     // d_l x S
    Tensor head_b;                     // S
    Tensor mask;                       // n x S, 0 valid / -inf padded
    double final_temperature = 1.0;    // temperature of the last forward pass

    std::vector<Tensor*> parameters();
    std::vector<const Tensor*> parameters() const;
};

LiftedModel init_model(const PairwiseGraph& graph, const PaddedInstance& padded,
                       const LiftConfig& cfg);

struct ForwardResult {
    Tape::Node probs;                  // n x S probability rows
    std::vector<Tape::Node> params;    // leaves, same order as parameters()
};

ForwardResult forward(Tape& tape, const LiftedModel& model,
                      const PairwiseGraph& graph, double temperature);

// Eq-style relaxed energy: sum_i <p_i, phi_i> + sum_C <psi_C, prod p_i>.
// Accumulation order matches energy() so one-hot rows reproduce it exactly.
Tape::Node lifted_loss(Tape& tape, const PaddedInstance& padded, Tape::Node probs);

// argmax over valid states, ties toward the smallest state index
Assignment decode(const Tensor& probs, const PaddedInstance& padded);

// Forward-only loss evaluation at the model's current parameters.
double evaluate_loss(const LiftedModel& model, const PairwiseGraph& graph,
                     const PaddedInstance& padded, double temperature);

SolveReport train(const MrfInstance& inst, const LiftConfig& cfg,
                  std::optional<double> time_limit_s = std::nullopt,
                  LiftedModel* model_out = nullptr);

AggregateReport multi_trial(const MrfInstance& inst, const LiftConfig& cfg,
                            int trials = 5);

// Loss grid f(alpha, beta) = L(theta* + alpha*delta + beta*eta) over
// [-r, r]^2 with unit-norm random directions; row-major grid_n x grid_n.
std::vector<double> landscape_grid(LiftedModel& model, const MrfInstance& inst,
                                   double half_range, int grid_n,
                                   std::uint64_t seed);

} // namespace nlift
