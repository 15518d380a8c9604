#include "tensor.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

namespace nlift {

using EMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapM = Eigen::Map<EMat>;
using CMapM = Eigen::Map<const EMat>;

Tensor::Tensor(std::vector<int> s, double fill) : shape(std::move(s)) {
    std::size_t n = 1;
    for (int d : shape) n *= static_cast<std::size_t>(d);
    v.assign(n, fill);
}

Tensor Tensor::scalar(double x) {
    Tensor t({1});
    t.v[0] = x;
    return t;
}

Tape::Node Tape::push(Tensor val, std::function<void()> back) {
    Rec r;
    r.grad = Tensor(val.shape, 0.0);
    r.val = std::move(val);
    r.back = std::move(back);
    nodes_.push_back(std::move(r));
    return static_cast<Node>(nodes_.size()) - 1;
}

Tape::Node Tape::leaf(Tensor t) { return push(std::move(t), nullptr); }

Tape::Node Tape::matmul(Node a, Node b) {
    const Tensor& ta = value(a);
    const Tensor& tb = value(b);
    if (ta.shape.size() != 2 || tb.shape.size() != 2 || ta.shape[1] != tb.shape[0])
        throw ShapeMismatch("matmul shape mismatch");
    int m = ta.shape[0], k = ta.shape[1], n = tb.shape[1];
    Tensor out({m, n});
    MapM(out.v.data(), m, n) =
        CMapM(ta.v.data(), m, k) * CMapM(tb.v.data(), k, n);
    Node o = push(std::move(out), nullptr);
    nodes_[o].back = [this, a, b, o, m, k, n] {
        CMapM go(g(o).v.data(), m, n);
        CMapM va(value(a).v.data(), m, k);
        CMapM vb(value(b).v.data(), k, n);
        MapM(g(a).v.data(), m, k).noalias() += go * vb.transpose();
        MapM(g(b).v.data(), k, n).noalias() += va.transpose() * go;
    };
    return o;
}

Tape::Node Tape::add(Node a, Node b) {
    const Tensor& ta = value(a);
    const Tensor& tb = value(b);
    if (ta.shape != tb.shape) throw ShapeMismatch("add shape mismatch");
    Tensor out = ta;
    for (std::size_t i = 0; i < out.size(); ++i) out.v[i] += tb.v[i];
    Node o = push(std::move(out), nullptr);
    nodes_[o].back = [this, a, b, o] {
        for (std::size_t i = 0; i < g(o).size(); ++i) {
            g(a).v[i] += g(o).v[i];
            g(b).v[i] += g(o).v[i];
        }
    };
    return o;
}

Tape::Node Tape::add_row_bias(Node a, Node b) {
    const Tensor& ta = value(a);
    const Tensor& tb = value(b);
    if (ta.shape.size() != 2 || tb.size() != static_cast<std::size_t>(ta.shape[1]))
        throw ShapeMismatch("bias length must equal column count");
    Tensor out = ta;
    int m = ta.shape[0], n = ta.shape[1];
    for (int r = 0; r < m; ++r)
        for (int c = 0; c < n; ++c) out.at(r, c) += tb.v[c];
    Node o = push(std::move(out), nullptr);
    nodes_[o].back = [this, a, b, o, m, n] {
        for (std::size_t i = 0; i < g(o).size(); ++i) g(a).v[i] += g(o).v[i];
        for (int r = 0; r < m; ++r)
            for (int c = 0; c < n; ++c) g(b).v[c] += g(o).at(r, c);
    };
    return o;
}

Tape::Node Tape::scalar_mul(Node a, double c) {
    Tensor out = value(a);
    for (double& x : out.v) x *= c;
    Node o = push(std::move(out), nullptr);
    nodes_[o].back = [this, a, o, c] {
        for (std::size_t i = 0; i < g(o).size(); ++i) g(a).v[i] += c * g(o).v[i];
    };
    return o;
}

Tape::Node Tape::relu(Node a) {
    Tensor out = value(a);
    for (double x : out.v)
        min_abs_relu_input_ = std::min(min_abs_relu_input_, std::abs(x));
    for (double& x : out.v) x = x > 0.0 ? x : 0.0;
    Node o = push(std::move(out), nullptr);
    nodes_[o].back = [this, a, o] {
        const Tensor& in = value(a);
        for (std::size_t i = 0; i < in.size(); ++i)
            if (in.v[i] > 0.0) g(a).v[i] += g(o).v[i]; // relu'(0) = 0
    };
    return o;
}

Tape::Node Tape::concat_cols(const std::vector<Node>& parts) {
    if (parts.empty()) throw ShapeMismatch("concat of zero tensors");
    int m = value(parts[0]).shape[0];
    int total = 0;
    for (Node p : parts) {
        const Tensor& t = value(p);
        if (t.shape.size() != 2 || t.shape[0] != m)
            throw ShapeMismatch("concat row count mismatch");
        total += t.shape[1];
    }
    Tensor out({m, total});
    int off = 0;
    for (Node p : parts) {
        const Tensor& t = value(p);
        int n = t.shape[1];
        for (int r = 0; r < m; ++r)
            for (int c = 0; c < n; ++c) out.at(r, off + c) = t.at(r, c);
        off += n;
    }
    Node o = push(std::move(out), nullptr);
    std::vector<Node> ps = parts;
    nodes_[o].back = [this, ps, o, m] {
        int off = 0;
        for (Node p : ps) {
            int n = value(p).shape[1];
            for (int r = 0; r < m; ++r)
                for (int c = 0; c < n; ++c) g(p).at(r, c) += g(o).at(r, off + c);
            off += n;
        }
    };
    return o;
}

Tape::Node Tape::neighbor_mean(Node h, const PairwiseGraph& graph) {
    const Tensor& th = value(h);
    if (th.shape.size() != 2 || th.shape[0] != graph.n_vars)
        throw ShapeMismatch("embedding row count must equal node count");
    int n = th.shape[0], d = th.shape[1];
    Tensor out({n, d});
    for (int i = 0; i < n; ++i) {
        const auto& nbrs = graph.adj[i];
        if (nbrs.empty()) continue;
        double inv = 1.0 / static_cast<double>(nbrs.size());
        for (int j : nbrs)
            for (int c = 0; c < d; ++c) out.at(i, c) += th.at(j, c);
        for (int c = 0; c < d; ++c) out.at(i, c) *= inv;
    }
    Node o = push(std::move(out), nullptr);
    const PairwiseGraph* gp = &graph;
    nodes_[o].back = [this, h, o, gp, n, d] {
        for (int i = 0; i < n; ++i) {
            const auto& nbrs = gp->adj[i];
            if (nbrs.empty()) continue;
            double inv = 1.0 / static_cast<double>(nbrs.size());
            for (int j : nbrs)
                for (int c = 0; c < d; ++c) g(h).at(j, c) += inv * g(o).at(i, c);
        }
    };
    return o;
}

Tape::Node Tape::adj_weighted_sum(
    Node h, const std::vector<std::vector<std::pair<int, double>>>& wadj) {
    const Tensor& th = value(h);
    if (th.shape.size() != 2 || th.shape[0] != static_cast<int>(wadj.size()))
        throw ShapeMismatch("adjacency row count must equal node count");
    int n = th.shape[0], d = th.shape[1];
    Tensor out({n, d});
    for (int i = 0; i < n; ++i)
        for (auto [j, w] : wadj[i])
            for (int c = 0; c < d; ++c) out.at(i, c) += w * th.at(j, c);
    Node o = push(std::move(out), nullptr);
    const auto* wp = &wadj;
    nodes_[o].back = [this, h, o, wp, n, d] {
        for (int i = 0; i < n; ++i)
            for (auto [j, w] : (*wp)[i])
                for (int c = 0; c < d; ++c) g(h).at(j, c) += w * g(o).at(i, c);
    };
    return o;
}

Tape::Node Tape::row(Node m, int r) {
    const Tensor& t = value(m);
    if (t.shape.size() != 2 || r < 0 || r >= t.shape[0])
        throw ShapeMismatch("row index out of range");
    int n = t.shape[1];
    Tensor out({n});
    for (int c = 0; c < n; ++c) out.v[c] = t.at(r, c);
    Node o = push(std::move(out), nullptr);
    nodes_[o].back = [this, m, o, r, n] {
        for (int c = 0; c < n; ++c) g(m).at(r, c) += g(o).v[c];
    };
    return o;
}

Tape::Node Tape::masked_softmax(Node logits, const Tensor& mask, double temperature) {
    if (temperature <= 0.0) throw NonPositiveTemperature("temperature must be > 0");
    const Tensor& t = value(logits);
    if (t.shape != mask.shape) throw ShapeMismatch("mask shape mismatch");
    int m = t.rows(), n = t.cols();
    Tensor out({m, n});
    for (int r = 0; r < m; ++r) {
        double mx = -std::numeric_limits<double>::infinity();
        for (int c = 0; c < n; ++c) {
            double z = (t.at(r, c) + mask.at(r, c)) / temperature;
            mx = std::max(mx, z);
        }
        double sum = 0.0;
        for (int c = 0; c < n; ++c) {
            double z = (t.at(r, c) + mask.at(r, c)) / temperature;
            double p = std::exp(z - mx); // exp(-inf) == 0 for masked entries
            out.at(r, c) = p;
            sum += p;
        }
        for (int c = 0; c < n; ++c) out.at(r, c) /= sum;
    }
    Node o = push(std::move(out), nullptr);
    nodes_[o].back = [this, logits, o, m, n, temperature] {
        const Tensor& p = value(o);
        for (int r = 0; r < m; ++r) {
            double dot = 0.0;
            for (int c = 0; c < n; ++c) dot += g(o).at(r, c) * p.at(r, c);
            for (int c = 0; c < n; ++c)
                g(logits).at(r, c) += p.at(r, c) * (g(o).at(r, c) - dot) / temperature;
        }
    };
    return o;
}

Tape::Node Tape::inner_product(Node a, Node b) {
    const Tensor& ta = value(a);
    const Tensor& tb = value(b);
    if (ta.shape != tb.shape) throw ShapeMismatch("inner product shape mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < ta.size(); ++i) s += ta.v[i] * tb.v[i];
    Node o = push(Tensor::scalar(s), nullptr);
    nodes_[o].back = [this, a, b, o] {
        double go = g(o).v[0];
        const Tensor& va = value(a);
        const Tensor& vb = value(b);
        for (std::size_t i = 0; i < va.size(); ++i) {
            g(a).v[i] += go * vb.v[i];
            g(b).v[i] += go * va.v[i];
        }
    };
    return o;
}

namespace {

// out[rest] = sum_a vec[a] * t[a, rest]; t has `axes` leading dims of the
// given sizes, axis 0 length == vec length.
std::vector<double> contract_axis0(const std::vector<double>& t,
                                   std::size_t axis0, std::size_t rest,
                                   const std::vector<double>& vec) {
    std::vector<double> out(rest, 0.0);
    for (std::size_t a = 0; a < axis0; ++a) {
        double w = vec[a];
        const double* src = t.data() + a * rest;
        for (std::size_t k = 0; k < rest; ++k) out[k] += w * src[k];
    }
    return out;
}

// out[pre] = sum_a t[pre, a] * vec[a]
std::vector<double> contract_last(const std::vector<double>& t,
                                  std::size_t pre, std::size_t last,
                                  const std::vector<double>& vec) {
    std::vector<double> out(pre, 0.0);
    for (std::size_t p = 0; p < pre; ++p) {
        const double* src = t.data() + p * last;
        double s = 0.0;
        for (std::size_t a = 0; a < last; ++a) s += src[a] * vec[a];
        out[p] = s;
    }
    return out;
}

} // namespace

Tape::Node Tape::clique_contract(const Clique& psi, const std::vector<Node>& probs) {
    const std::size_t m = psi.shape.size();
    if (probs.size() != m) throw ShapeMismatch("one probability row per axis required");
    for (std::size_t k = 0; k < m; ++k)
        if (value(probs[k]).size() != static_cast<std::size_t>(psi.shape[k]))
            throw ShapeMismatch("probability row length must match axis length");

    // prefix[k]: psi contracted with probs[0..k-1]; prefix[m] is the scalar
    std::vector<std::vector<double>> prefix(m + 1);
    prefix[0] = psi.table;
    std::size_t rest = psi.table.size();
    for (std::size_t k = 0; k < m; ++k) {
        std::size_t axis0 = static_cast<std::size_t>(psi.shape[k]);
        rest /= axis0;
        prefix[k + 1] = contract_axis0(prefix[k], axis0, rest, value(probs[k]).v);
    }

    Node o = push(Tensor::scalar(prefix[m][0]), nullptr);
    std::vector<Node> ps = probs;
    std::vector<int> shape = psi.shape;
    auto pref = std::make_shared<std::vector<std::vector<double>>>(std::move(prefix));
    nodes_[o].back = [this, ps, shape, pref, o, m] {
        double go = g(o).v[0];
        for (std::size_t k = 0; k < m; ++k) {
            // contract prefix[k]'s trailing axes with probs[k+1..m-1],
            // leaving a vector over axis k
            std::vector<double> t = (*pref)[k];
            std::size_t pre = t.size();
            for (std::size_t j = m; j-- > k + 1;) {
                std::size_t last = static_cast<std::size_t>(shape[j]);
                pre /= last;
                t = contract_last(t, pre, last, value(ps[j]).v);
            }
            for (std::size_t a = 0; a < t.size(); ++a) g(ps[k]).v[a] += go * t[a];
        }
    };
    return o;
}

void Tape::backward(Node loss_node) {
    if (value(loss_node).size() != 1)
        throw NonScalarLoss("backward requires a scalar loss");
    for (auto& n : nodes_) std::fill(n.grad.v.begin(), n.grad.v.end(), 0.0);
    nodes_[loss_node].grad.v[0] = 1.0;
    for (Node n = loss_node; n >= 0; --n)
        if (nodes_[n].back) nodes_[n].back();
}

void AdamState::init(const std::vector<Tensor>& params) {
    step = 0;
    m1.clear();
    m2.clear();
    for (const auto& p : params) {
        m1.emplace_back(p.shape, 0.0);
        m2.emplace_back(p.shape, 0.0);
    }
}

void AdamState::update(std::vector<Tensor>& params, const std::vector<Tensor>& grads) {
    if (params.size() != grads.size() || params.size() != m1.size())
        throw ShapeMismatch("optimizer state does not match parameter list");
    ++step;
    double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step));
    double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step));
    for (std::size_t t = 0; t < params.size(); ++t) {
        if (params[t].shape != grads[t].shape)
            throw ShapeMismatch("gradient shape does not match parameter");
        for (std::size_t i = 0; i < params[t].size(); ++i) {
            double gv = grads[t].v[i];
            double& m = m1[t].v[i];
            double& s = m2[t].v[i];
            m = beta1 * m + (1.0 - beta1) * gv;
            s = beta2 * s + (1.0 - beta2) * gv * gv;
            double mhat = m / bc1;
            double shat = s / bc2;
            params[t].v[i] -= lr * mhat / (std::sqrt(shat) + eps);
        }
    }
}

} // namespace nlift
