#include "message_passing.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace nlift {

namespace {

struct PairwiseView {
    int n = 0;
    const MrfInstance* inst = nullptr;
    std::vector<std::pair<int, int>> edges;        // i < j
    std::vector<const std::vector<double>*> table; // card_i x card_j per edge
    // adjacency as (neighbor, directed message id of neighbor->me, edge id)
    struct Arc { int nbr; int in_msg; int out_msg; int edge; };
    std::vector<std::vector<Arc>> adj;

    double psi(int e, int xi, int xj, bool from_low) const {
        // table is laid out (low var, high var); from_low: xi indexes the low var
        int ci = inst->card[edges[e].first];
        int cj = inst->card[edges[e].second];
        (void)ci;
        return from_low ? (*table[e])[static_cast<std::size_t>(xi) * cj + xj]
                        : (*table[e])[static_cast<std::size_t>(xj) * cj + xi];
    }
};

PairwiseView build_view(const MrfInstance& inst) {
    PairwiseView v;
    v.n = inst.n_vars;
    v.inst = &inst;
    for (const auto& c : inst.cliques) {
        if (c.scope.size() > 2)
            throw HighOrderUnsupported("message passing requires pairwise cliques");
        if (c.scope.size() == 2) {
            v.edges.push_back({c.scope[0], c.scope[1]});
            v.table.push_back(&c.table);
        }
    }
    v.adj.assign(v.n, {});
    for (int e = 0; e < static_cast<int>(v.edges.size()); ++e) {
        auto [i, j] = v.edges[e];
        // message id 2e: i->j, 2e+1: j->i
        v.adj[j].push_back({i, 2 * e, 2 * e + 1, e});
        v.adj[i].push_back({j, 2 * e + 1, 2 * e, e});
    }
    return v;
}

Assignment decode_beliefs(const PairwiseView& v,
                          const std::vector<std::vector<double>>& msgs,
                          const std::vector<double>* rho) {
    Assignment x(v.n, 0);
    for (int i = 0; i < v.n; ++i) {
        int ci = v.inst->card[i];
        double best = std::numeric_limits<double>::infinity();
        for (int a = 0; a < ci; ++a) {
            double b = v.inst->unary[i][a];
            for (const auto& arc : v.adj[i])
                b += rho ? (*rho)[arc.edge] * msgs[arc.in_msg][a] : msgs[arc.in_msg][a];
            if (b < best) { // strict: lexicographic tie-break
                best = b;
                x[i] = a;
            }
        }
    }
    return x;
}

SolveReport run_minsum(const MrfInstance& inst, const MpConfig& cfg,
                       const std::vector<double>* rho, MessageState* trace) {
    if (cfg.damping < 0.0 || cfg.damping >= 1.0)
        throw Error("damping must be in [0, 1)");
    PairwiseView v = build_view(inst);
    const auto t0 = std::chrono::steady_clock::now();
    auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };

    std::vector<std::vector<double>> msgs(2 * v.edges.size());
    for (int e = 0; e < static_cast<int>(v.edges.size()); ++e) {
        msgs[2 * e].assign(inst.card[v.edges[e].second], 0.0);
        msgs[2 * e + 1].assign(inst.card[v.edges[e].first], 0.0);
    }
    std::vector<std::vector<double>> next = msgs;

    SolveReport rep;
    rep.seed = cfg.seed;
    rep.final_loss = std::numeric_limits<double>::quiet_NaN();
    rep.best_energy = std::numeric_limits<double>::infinity();

    auto record = [&](long iter) {
        Assignment x = decode_beliefs(v, msgs, rho);
        double e = energy(inst, x);
        if (e < rep.best_energy) {
            rep.best_energy = e;
            rep.best_assignment = x;
        }
        rep.trajectory.push_back({iter, rep.final_loss, e, rep.best_energy, elapsed()});
    };

    record(0); // iteration 0: decode from unaries alone
    rep.reason = "max_iters";

    for (long it = 1; it <= cfg.max_iters; ++it) {
        double max_delta = 0.0;
        for (int e = 0; e < static_cast<int>(v.edges.size()); ++e) {
            for (int dir = 0; dir < 2; ++dir) {
                int i = dir == 0 ? v.edges[e].first : v.edges[e].second;
                int j = dir == 0 ? v.edges[e].second : v.edges[e].first;
                int out = 2 * e + dir;
                int rev = 2 * e + (1 - dir);
                int ci = inst.card[i], cj = inst.card[j];

                // accumulate phi_i + incoming messages (excluding j's)
                std::vector<double> acc(ci);
                for (int a = 0; a < ci; ++a) acc[a] = inst.unary[i][a];
                for (const auto& arc : v.adj[i]) {
                    if (arc.nbr == j) continue;
                    const auto& m = msgs[arc.in_msg];
                    if (rho)
                        for (int a = 0; a < ci; ++a) acc[a] += (*rho)[arc.edge] * m[a];
                    else
                        for (int a = 0; a < ci; ++a) acc[a] += m[a];
                }
                if (rho) { // reverse message enters with coefficient (rho - 1)
                    double w = (*rho)[e] - 1.0;
                    for (int a = 0; a < ci; ++a) acc[a] += w * msgs[rev][a];
                }

                auto& m_new = next[out];
                for (int b = 0; b < cj; ++b) {
                    double best = std::numeric_limits<double>::infinity();
                    for (int a = 0; a < ci; ++a) {
                        double pw = v.psi(e, a, b, dir == 0);
                        if (rho) pw /= (*rho)[e];
                        best = std::min(best, acc[a] + pw);
                    }
                    m_new[b] = best;
                }
                // damping, then min-normalization
                if (cfg.damping > 0.0)
                    for (int b = 0; b < cj; ++b)
                        m_new[b] = (1.0 - cfg.damping) * m_new[b] + cfg.damping * msgs[out][b];
                double lo = *std::min_element(m_new.begin(), m_new.end());
                for (int b = 0; b < cj; ++b) m_new[b] -= lo;
                for (int b = 0; b < cj; ++b)
                    max_delta = std::max(max_delta, std::abs(m_new[b] - msgs[out][b]));
            }
        }
        msgs.swap(next);
        rep.iterations = it;
        record(it);
        if (max_delta < cfg.convergence_tol) {
            rep.reason = "converged";
            break;
        }
    }
    if (cfg.max_iters == 0) rep.reason = "converged";

    if (trace) {
        trace->messages = msgs;
        trace->iteration = rep.iterations;
    }
    return rep;
}

} // namespace

SolveReport lbp_minsum(const MrfInstance& inst, const MpConfig& cfg,
                       MessageState* trace) {
    return run_minsum(inst, cfg, nullptr, trace);
}

SolveReport trbp_minsum(const MrfInstance& inst, const MpConfig& cfg,
                        std::optional<double> rho, MessageState* trace) {
    PairwiseView v = build_view(inst); // validates pairwise before rho setup
    double r;
    if (rho) {
        r = *rho;
    } else {
        std::size_t ne = v.edges.size();
        r = ne == 0 ? 1.0 : std::min(1.0, static_cast<double>(inst.n_vars - 1) /
                                              static_cast<double>(ne));
    }
    if (!(r > 0.0 && r <= 1.0)) throw InvalidRho("rho must be in (0, 1]");
    std::vector<double> per_edge(v.edges.size(), r);
    return run_minsum(inst, cfg, &per_edge, trace);
}

} // namespace nlift
