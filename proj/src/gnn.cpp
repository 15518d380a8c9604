#include "gnn.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "rng.hpp"

namespace nlift {

void LiftConfig::validate() const {
    if (d_l < 1 || layers < 1) throw Error("d_l and layer count must be >= 1");
    if (lr <= 0.0) throw Error("learning rate must be > 0");
    if (!(anneal > 0.0 && anneal < 1.0)) throw Error("anneal factor must be in (0, 1)");
    if (t0 < 1.0) throw Error("initial temperature must be >= 1");
    if (max_iters < 0 || patience < 1) throw Error("invalid iteration settings");
}

std::vector<Tensor*> LiftedModel::parameters() {
    std::vector<Tensor*> ps{&h0};
    for (auto& w : w_self) ps.push_back(&w);
    for (auto& w : w_nbr) ps.push_back(&w);
    ps.push_back(&jk_proj);
    ps.push_back(&head_w);
    ps.push_back(&head_b);
    return ps;
}

std::vector<const Tensor*> LiftedModel::parameters() const {
    auto ps = const_cast<LiftedModel*>(this)->parameters();
    return {ps.begin(), ps.end()};
}

namespace {

void fill_uniform(Tensor& t, double bound, Rng& rng) {
    for (double& x : t.v) x = rng.uniform(-bound, bound);
}

} // namespace

LiftedModel init_model(const PairwiseGraph& graph, const PaddedInstance& padded,
                       const LiftConfig& cfg) {
    cfg.validate();
    if (graph.n_vars != padded.base.n_vars)
        throw ShapeMismatch("graph and padded instance disagree on node count");

    LiftedModel m;
    m.cfg = cfg;
    m.n_vars = graph.n_vars;
    m.S = padded.S;

    Rng rng(cfg.seed);
    int d = cfg.d_l, K = cfg.layers;
    double a = std::sqrt(6.0 / d);

    m.h0 = Tensor({m.n_vars, d});
    fill_uniform(m.h0, a, rng);
    for (int k = 0; k < K; ++k) {
        m.w_self.emplace_back(std::vector<int>{d, d});
        fill_uniform(m.w_self.back(), a, rng);
    }
    if (cfg.backbone == Backbone::graphsage) {
        for (int k = 0; k < K; ++k) {
            m.w_nbr.emplace_back(std::vector<int>{d, d});
            fill_uniform(m.w_nbr.back(), a, rng);
        }
    }
    m.jk_proj = Tensor({K * d, d});
    fill_uniform(m.jk_proj, std::sqrt(6.0 / (K * d)), rng);
    m.head_w = Tensor({d, m.S});
    fill_uniform(m.head_w, a, rng);
    m.head_b = Tensor({m.S}, 0.0);

    m.mask = Tensor({m.n_vars, m.S});
    for (int i = 0; i < m.n_vars; ++i)
        for (int s = 0; s < m.S; ++s)
            m.mask.at(i, s) = padded.mask[i][s] ? 0.0
                              : -std::numeric_limits<double>::infinity();
    return m;
}

namespace {

// GCN aggregation weights: (deg(i) deg(j))^{-1/2} over N(i) plus self loop.
std::vector<std::vector<std::pair<int, double>>> gcn_weights(const PairwiseGraph& g) {
    std::vector<std::vector<std::pair<int, double>>> w(g.n_vars);
    auto deg = [&](int i) { return static_cast<double>(g.adj[i].size()) + 1.0; };
    for (int i = 0; i < g.n_vars; ++i) {
        w[i].push_back({i, 1.0 / deg(i)});
        for (int j : g.adj[i]) w[i].push_back({j, 1.0 / std::sqrt(deg(i) * deg(j))});
    }
    return w;
}

} // namespace

ForwardResult forward(Tape& tape, const LiftedModel& model,
                      const PairwiseGraph& graph, double temperature) {
    ForwardResult fr;
    auto params = model.parameters();
    for (const Tensor* p : params) fr.params.push_back(tape.leaf(*p));

    int K = model.cfg.layers;
    bool sage = model.cfg.backbone == Backbone::graphsage;
    std::size_t idx = 0;
    Tape::Node h = fr.params[idx++]; // h0
    std::vector<Tape::Node> w_self(K), w_nbr(K);
    for (int k = 0; k < K; ++k) w_self[k] = fr.params[idx++];
    if (sage)
        for (int k = 0; k < K; ++k) w_nbr[k] = fr.params[idx++];
    Tape::Node jk = fr.params[idx++];
    Tape::Node head_w = fr.params[idx++];
    Tape::Node head_b = fr.params[idx++];

    static thread_local std::vector<std::vector<std::pair<int, double>>> gcn_adj;
    if (!sage) gcn_adj = gcn_weights(graph);

    std::vector<Tape::Node> layer_outputs;
    for (int k = 0; k < K; ++k) {
        Tape::Node z;
        if (sage) {
            Tape::Node nbr = tape.neighbor_mean(h, graph);
            z = tape.add(tape.matmul(h, w_self[k]), tape.matmul(nbr, w_nbr[k]));
        } else {
            z = tape.matmul(tape.adj_weighted_sum(h, gcn_adj), w_self[k]);
        }
        h = tape.relu(z);
        layer_outputs.push_back(h);
    }

    Tape::Node cat = K == 1 ? layer_outputs[0] : tape.concat_cols(layer_outputs);
    Tape::Node proj = tape.matmul(cat, jk);
    Tape::Node logits = tape.add_row_bias(tape.matmul(proj, head_w), head_b);
    fr.probs = tape.masked_softmax(logits, model.mask, temperature);
    return fr;
}

Tape::Node lifted_loss(Tape& tape, const PaddedInstance& padded, Tape::Node probs) {
    const Tensor& P = tape.value(probs);
    int n = padded.base.n_vars;
    if (P.rows() != n || P.cols() != padded.S)
        throw ShapeMismatch("probability matrix shape does not match instance");

    std::vector<Tape::Node> rows(n, -1);
    auto var_row = [&](int i) {
        if (rows[i] < 0) rows[i] = tape.row(probs, i);
        return rows[i];
    };

    Tape::Node total = tape.leaf(Tensor::scalar(0.0));
    for (int i = 0; i < n; ++i) {
        Tensor phi({padded.S});
        for (int s = 0; s < padded.S; ++s) phi.v[s] = padded.padded_unary[i][s];
        total = tape.add(total, tape.inner_product(var_row(i), tape.leaf(std::move(phi))));
    }
    for (const auto& c : padded.padded_cliques) {
        std::vector<Tape::Node> ps;
        for (int v : c.scope) ps.push_back(var_row(v));
        total = tape.add(total, tape.clique_contract(c, ps));
    }
    return total;
}

Assignment decode(const Tensor& probs, const PaddedInstance& padded) {
    int n = padded.base.n_vars;
    Assignment x(n, 0);
    for (int i = 0; i < n; ++i) {
        double best = -std::numeric_limits<double>::infinity();
        for (int s = 0; s < padded.S; ++s) {
            if (!padded.mask[i][s]) continue;
            if (probs.at(i, s) > best) { // strict: smallest index wins ties
                best = probs.at(i, s);
                x[i] = s;
            }
        }
    }
    return x;
}

double evaluate_loss(const LiftedModel& model, const PairwiseGraph& graph,
                     const PaddedInstance& padded, double temperature) {
    Tape tape;
    ForwardResult fr = forward(tape, model, graph, temperature);
    return tape.value(lifted_loss(tape, padded, fr.probs)).v[0];
}

namespace {

SolveReport unary_only_solution(const MrfInstance& inst, const LiftConfig& cfg) {
    SolveReport rep;
    rep.seed = cfg.seed;
    rep.reason = "converged";
    Assignment x(inst.n_vars, 0);
    for (int i = 0; i < inst.n_vars; ++i) {
        const auto& u = inst.unary[i];
        x[i] = static_cast<int>(std::min_element(u.begin(), u.end()) - u.begin());
    }
    rep.best_assignment = x;
    rep.best_energy = energy(inst, x);
    rep.final_loss = rep.best_energy;
    rep.trajectory.push_back({0, rep.final_loss, rep.best_energy, rep.best_energy, 0.0});
    return rep;
}

} // namespace

SolveReport train(const MrfInstance& inst, const LiftConfig& cfg,
                  std::optional<double> time_limit_s, LiftedModel* model_out) {
    cfg.validate();
    if (inst.cliques.empty()) return unary_only_solution(inst, cfg);

    const auto t0 = std::chrono::steady_clock::now();
    auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };

    PaddedInstance padded = pad(inst);
    PairwiseGraph graph = clique_expansion(inst);
    LiftedModel model = init_model(graph, padded, cfg);
    auto params = model.parameters();
    AdamState adam;
    adam.lr = cfg.lr;
    {
        std::vector<Tensor> snapshot;
        for (Tensor* p : params) snapshot.push_back(*p);
        adam.init(snapshot);
    }

    SolveReport rep;
    rep.seed = cfg.seed;
    rep.best_energy = std::numeric_limits<double>::infinity();
    rep.reason = "max_iters";
    rep.final_loss = std::numeric_limits<double>::quiet_NaN();

    double temperature = cfg.t0;
    double prev_loss = std::numeric_limits<double>::quiet_NaN();
    int still = 0;

    for (long it = 1; it <= cfg.max_iters; ++it) {
        Tape tape;
        ForwardResult fr = forward(tape, model, graph, temperature);
        Tape::Node loss = lifted_loss(tape, padded, fr.probs);
        double loss_v = tape.value(loss).v[0];
        tape.backward(loss);

        Assignment x = decode(tape.value(fr.probs), padded);
        double e = energy(inst, x);
        if (e < rep.best_energy) {
            rep.best_energy = e;
            rep.best_assignment = x;
        }
        rep.final_loss = loss_v;
        rep.iterations = it;
        model.final_temperature = temperature;
        rep.trajectory.push_back({it, loss_v, e, rep.best_energy, elapsed()});

        std::vector<Tensor> grads;
        grads.reserve(fr.params.size());
        for (Tape::Node pn : fr.params) grads.push_back(tape.grad(pn));
        std::vector<Tensor> cur;
        for (Tensor* p : params) cur.push_back(std::move(*p));
        adam.update(cur, grads);
        for (std::size_t k = 0; k < params.size(); ++k) *params[k] = std::move(cur[k]);

        if (!std::isnan(prev_loss) && std::abs(loss_v - prev_loss) < cfg.tol) {
            if (++still >= cfg.patience) {
                rep.reason = "converged";
                break;
            }
        } else {
            still = 0;
        }
        prev_loss = loss_v;
        temperature = std::max(1.0, cfg.anneal * temperature);

        if (time_limit_s && elapsed() > *time_limit_s) {
            rep.reason = "time_limit";
            break;
        }
    }

    if (model_out) *model_out = std::move(model);
    return rep;
}

AggregateReport multi_trial(const MrfInstance& inst, const LiftConfig& cfg, int trials) {
    if (trials < 1) throw Error("trials must be >= 1");
    AggregateReport agg;
    double sum = 0.0, sum2 = 0.0;
    for (int t = 0; t < trials; ++t) {
        LiftConfig c = cfg;
        c.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(t));
        SolveReport r = train(inst, c);
        r.trial = t;
        sum += r.best_energy;
        sum2 += r.best_energy * r.best_energy;
        if (t == 0 || r.best_energy < agg.best.best_energy) agg.best = r;
        agg.trials.push_back(std::move(r));
    }
    agg.mean_energy = sum / trials;
    double var = sum2 / trials - agg.mean_energy * agg.mean_energy;
    agg.stddev_energy = std::sqrt(std::max(0.0, var));
    return agg;
}

std::vector<double> landscape_grid(LiftedModel& model, const MrfInstance& inst,
                                   double half_range, int grid_n,
                                   std::uint64_t seed) {
    if (half_range <= 0.0 || grid_n < 2) throw Error("invalid landscape grid");
    PaddedInstance padded = pad(inst);
    PairwiseGraph graph = clique_expansion(inst);

    auto params = model.parameters();
    std::vector<Tensor> theta;
    for (Tensor* p : params) theta.push_back(*p);

    // two independent unit-norm Gaussian directions over the full space
    Rng rng(seed);
    auto direction = [&] {
        std::vector<Tensor> d;
        double norm2 = 0.0;
        for (const Tensor& p : theta) {
            Tensor t(p.shape);
            for (double& x : t.v) {
                x = rng.normal();
                norm2 += x * x;
            }
            d.push_back(std::move(t));
        }
        double inv = 1.0 / std::sqrt(norm2);
        for (Tensor& t : d)
            for (double& x : t.v) x *= inv;
        return d;
    };
    std::vector<Tensor> delta = direction();
    std::vector<Tensor> eta = direction();

    std::vector<double> grid(static_cast<std::size_t>(grid_n) * grid_n);
    for (int ia = 0; ia < grid_n; ++ia) {
        double alpha = -half_range + 2.0 * half_range * ia / (grid_n - 1);
        for (int ib = 0; ib < grid_n; ++ib) {
            double beta = -half_range + 2.0 * half_range * ib / (grid_n - 1);
            if (alpha == 0.0 && beta == 0.0) {
                for (std::size_t k = 0; k < theta.size(); ++k) *params[k] = theta[k];
            } else {
                for (std::size_t k = 0; k < theta.size(); ++k) {
                    Tensor t = theta[k];
                    for (std::size_t i = 0; i < t.size(); ++i)
                        t.v[i] += alpha * delta[k].v[i] + beta * eta[k].v[i];
                    *params[k] = std::move(t);
                }
            }
            grid[static_cast<std::size_t>(ia) * grid_n + ib] =
                evaluate_loss(model, graph, padded, model.final_temperature);
        }
    }
    for (std::size_t k = 0; k < theta.size(); ++k) *params[k] = std::move(theta[k]);
    return grid;
}

} // namespace nlift
