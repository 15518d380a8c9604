#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <vector>

#include "common.hpp"
#include "mrf.hpp"

namespace nlift {

// Dense row-major 64-bit tensor. Rank 0 (shape {}) is not used; scalars are
// shape {1}.
struct Tensor {
    std::vector<int> shape;
    std::vector<double> v;

    Tensor() = default;
    Tensor(std::vector<int> s, double fill = 0.0);
    static Tensor scalar(double x);

    std::size_t size() const { return v.size(); }
    int rows() const { return shape.empty() ? 0 : shape[0]; }
    int cols() const { return shape.size() < 2 ? 1 : shape[1]; }
    double& at(int r, int c) { return v[static_cast<std::size_t>(r) * cols() + c]; }
    double at(int r, int c) const { return v[static_cast<std::size_t>(r) * cols() + c]; }
};

// Reverse-mode tape. Nodes are recorded in topological order by
// construction; backward() replays adjoints in reverse.
class Tape {
public:
    using Node = int;

    Node leaf(Tensor t);

    Node matmul(Node a, Node b);        // (m,k) x (k,n) -> (m,n)
    Node add(Node a, Node b);           // elementwise, same shape
    Node add_row_bias(Node a, Node b);  // (m,n) + (n,) broadcast over rows
    Node scalar_mul(Node a, double c);
    Node relu(Node a);
    Node concat_cols(const std::vector<Node>& parts);
    Node neighbor_mean(Node h, const PairwiseGraph& g); // zero vector for isolated nodes
    // out[i] = sum over (j, w) in wadj[i] of w * h[j]; wadj must outlive the tape
    Node adj_weighted_sum(Node h,
                          const std::vector<std::vector<std::pair<int, double>>>& wadj);
    Node row(Node m, int r);            // (n,d) -> (d,)
    Node masked_softmax(Node logits, const Tensor& mask, double temperature);
    Node inner_product(Node a, Node b); // -> scalar
    // <psi, p_0 x p_1 x ... > by iterated axis contraction; probs[k] must
    // have length psi.shape[k].
    Node clique_contract(const Clique& psi, const std::vector<Node>& probs);

    void backward(Node loss_node);

    const Tensor& value(Node n) const { return nodes_[n].val; }
    const Tensor& grad(Node n) const { return nodes_[n].grad; }
    std::size_t num_nodes() const { return nodes_.size(); }

    // Smallest |pre-activation| seen across all relu nodes; used by gradient
    // checks to keep finite-difference probes away from the kink.
    double min_abs_relu_input() const { return min_abs_relu_input_; }

private:
    struct Rec {
        Tensor val;
        Tensor grad;
        std::function<void()> back; // null for leaves
    };

    Node push(Tensor val, std::function<void()> back);
    Tensor& g(Node n) { return nodes_[n].grad; }

    std::vector<Rec> nodes_;
    double min_abs_relu_input_ = std::numeric_limits<double>::infinity();
};

struct AdamState {
    double lr = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    long step = 0;
    std::vector<Tensor> m1, m2;

    void init(const std::vector<Tensor>& params);
    void update(std::vector<Tensor>& params, const std::vector<Tensor>& grads);
};

} // namespace nlift
