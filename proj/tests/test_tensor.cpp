#include <doctest.h>

#include <cmath>
#include <functional>

#include "helpers.hpp"
#include "rng.hpp"
#include "tensor.hpp"

using namespace nlift;
using namespace nlift::testing;

namespace {

Tensor random_tensor(std::vector<int> shape, Rng& rng, double lo = -1.0,
                     double hi = 1.0) {
    Tensor t(shape);
    for (auto& x : t.v) x = rng.uniform(lo, hi);
    return t;
}

// Central finite differences of a scalar function of several tensors,
// compared against the tape gradient. Returns the worst relative error.
double fd_check(const std::vector<Tensor>& inputs,
                const std::function<Tape::Node(Tape&, const std::vector<Tape::Node>&)>& f,
                double h = 1e-5) {
    Tape tape;
    std::vector<Tape::Node> leaves;
    for (const auto& t : inputs) leaves.push_back(tape.leaf(t));
    Tape::Node out = f(tape, leaves);
    tape.backward(out);

    double worst = 0.0;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        for (std::size_t k = 0; k < inputs[i].size(); ++k) {
            auto eval = [&](double delta) {
                Tape t2;
                std::vector<Tape::Node> l2;
                for (std::size_t j = 0; j < inputs.size(); ++j) {
                    Tensor c = inputs[j];
                    if (j == i) c.v[k] += delta;
                    l2.push_back(t2.leaf(std::move(c)));
                }
                return t2.value(f(t2, l2)).v[0];
            };
            double fd = (eval(h) - eval(-h)) / (2.0 * h);
            double an = tape.grad(leaves[i]).v[k];
            worst = std::max(worst, rel_err(fd, an) * (near(fd, an, 1e-9) ? 0.0 : 1.0));
        }
    }
    return worst;
}

// Reduce a matrix output to a scalar with fixed random weights so every
// entry's gradient is exercised.
Tape::Node weighted_sum(Tape& tape, Tape::Node m, std::uint64_t seed) {
    const Tensor& val = tape.value(m);
    Rng rng(seed);
    Tensor w(val.shape);
    for (auto& x : w.v) x = rng.uniform(-1.0, 1.0);
    return tape.inner_product(m, tape.leaf(std::move(w)));
}

} // namespace

TEST_CASE("matmul matches a hand example and finite differences") {
    Tape tape;
    Tensor a({2, 2});
    a.v = {1, 2, 3, 4};
    Tensor b({2, 2});
    b.v = {5, 6, 7, 8};
    auto n = tape.matmul(tape.leaf(a), tape.leaf(b));
    CHECK(tape.value(n).v == std::vector<double>{19, 22, 43, 50});

    Rng rng(11);
    std::vector<Tensor> in{random_tensor({3, 4}, rng), random_tensor({4, 2}, rng)};
    double err = fd_check(in, [](Tape& t, const std::vector<Tape::Node>& l) {
        return weighted_sum(t, t.matmul(l[0], l[1]), 1);
    });
    CHECK(err < 1e-4);
}

TEST_CASE("elementwise ops pass finite differences") {
    Rng rng(12);
    std::vector<Tensor> in{random_tensor({3, 3}, rng), random_tensor({3, 3}, rng)};
    CHECK(fd_check(in, [](Tape& t, const std::vector<Tape::Node>& l) {
              return weighted_sum(t, t.add(l[0], l[1]), 2);
          }) < 1e-4);
    CHECK(fd_check({in[0]}, [](Tape& t, const std::vector<Tape::Node>& l) {
              return weighted_sum(t, t.scalar_mul(l[0], -2.5), 3);
          }) < 1e-4);
    std::vector<Tensor> bias{random_tensor({3, 3}, rng), random_tensor({3}, rng)};
    CHECK(fd_check(bias, [](Tape& t, const std::vector<Tape::Node>& l) {
              return weighted_sum(t, t.add_row_bias(l[0], l[1]), 4);
          }) < 1e-4);
}

TEST_CASE("relu uses subgradient zero at the kink") {
    Tape tape;
    Tensor x({3});
    x.v = {-1.0, 0.0, 2.0};
    auto n = tape.relu(tape.leaf(x));
    CHECK(tape.value(n).v == std::vector<double>{0.0, 0.0, 2.0});
    Tensor w({3});
    w.v = {1.0, 1.0, 1.0};
    auto s = tape.inner_product(n, tape.leaf(w));
    tape.backward(s);
    CHECK(tape.grad(0).v == std::vector<double>{0.0, 0.0, 1.0});
    CHECK(tape.min_abs_relu_input() == 0.0);

    Rng rng(13);
    std::vector<Tensor> in{random_tensor({4, 4}, rng)};
    CHECK(fd_check(in, [](Tape& t, const std::vector<Tape::Node>& l) {
              return weighted_sum(t, t.relu(l[0]), 5);
          }) < 1e-4);
}

TEST_CASE("concat_cols and row pass finite differences") {
    Rng rng(14);
    std::vector<Tensor> in{random_tensor({2, 3}, rng), random_tensor({2, 2}, rng)};
    CHECK(fd_check(in, [](Tape& t, const std::vector<Tape::Node>& l) {
              return weighted_sum(t, t.concat_cols({l[0], l[1]}), 6);
          }) < 1e-4);
    CHECK(fd_check({in[0]}, [](Tape& t, const std::vector<Tape::Node>& l) {
              return weighted_sum(t, t.row(l[0], 1), 7);
          }) < 1e-4);
}

TEST_CASE("neighbor_mean averages neighbours and zeroes isolated nodes") {
    PairwiseGraph g;
    g.n_vars = 3;
    g.edges = {{0, 1}};
    g.adj = {{1}, {0}, {}};
    Tape tape;
    Tensor h({3, 2});
    h.v = {1, 2, 3, 4, 5, 6};
    auto n = tape.neighbor_mean(tape.leaf(h), g);
    CHECK(tape.value(n).v == std::vector<double>{3, 4, 1, 2, 0, 0});

    Rng rng(15);
    std::vector<Tensor> in{random_tensor({3, 2}, rng)};
    CHECK(fd_check(in, [&](Tape& t, const std::vector<Tape::Node>& l) {
              return weighted_sum(t, t.neighbor_mean(l[0], g), 8);
          }) < 1e-4);
}

TEST_CASE("adj_weighted_sum applies the given weights") {
    std::vector<std::vector<std::pair<int, double>>> wadj{
        {{0, 0.5}, {1, 2.0}}, {{1, 1.0}}, {}};
    Tape tape;
    Tensor h({3, 1});
    h.v = {1, 10, 100};
    auto n = tape.adj_weighted_sum(tape.leaf(h), wadj);
    CHECK(tape.value(n).v == std::vector<double>{20.5, 10, 0});

    Rng rng(16);
    std::vector<Tensor> in{random_tensor({3, 2}, rng)};
    CHECK(fd_check(in, [&](Tape& t, const std::vector<Tape::Node>& l) {
              return weighted_sum(t, t.adj_weighted_sum(l[0], wadj), 9);
          }) < 1e-4);
}

TEST_CASE("masked_softmax zeroes masked states and respects temperature") {
    Tape tape;
    Tensor logits({1, 3});
    logits.v = {1.0, 1.0, 1.0};
    Tensor mask({1, 3});
    mask.v = {0.0, 0.0, -std::numeric_limits<double>::infinity()};
    auto p = tape.masked_softmax(tape.leaf(logits), mask, 1.0);
    CHECK(near(tape.value(p).v[0], 0.5, 1e-12));
    CHECK(near(tape.value(p).v[1], 0.5, 1e-12));
    CHECK(tape.value(p).v[2] == 0.0);

    // higher temperature flattens the distribution
    Tensor skew({1, 2});
    skew.v = {0.0, 2.0};
    Tensor m2({1, 2}, 0.0);
    Tape t2;
    auto cold = t2.masked_softmax(t2.leaf(skew), m2, 1.0);
    auto hot = t2.masked_softmax(t2.leaf(skew), m2, 10.0);
    CHECK(t2.value(hot).v[0] > t2.value(cold).v[0]);

    CHECK_THROWS_AS(
        [&] {
            Tape t3;
            t3.masked_softmax(t3.leaf(skew), m2, 0.0);
        }(),
        NonPositiveTemperature);

    Rng rng(17);
    std::vector<Tensor> in{random_tensor({2, 3}, rng)};
    Tensor mk({2, 3}, 0.0);
    mk.v[5] = -std::numeric_limits<double>::infinity();
    CHECK(fd_check(in, [&](Tape& t, const std::vector<Tape::Node>& l) {
              return weighted_sum(t, t.masked_softmax(l[0], mk, 2.5), 10);
          }) < 1e-4);
}

TEST_CASE("inner_product and clique_contract match hand values") {
    Tape tape;
    Tensor a({3});
    a.v = {1, 2, 3};
    Tensor b({3});
    b.v = {4, 5, 6};
    CHECK(tape.value(tape.inner_product(tape.leaf(a), tape.leaf(b))).v[0] == 32.0);

    Clique psi;
    psi.scope = {0, 1};
    psi.shape = {2, 2};
    psi.table = {0, 2, 2, 0};
    Tensor half({2});
    half.v = {0.5, 0.5};
    auto c = tape.clique_contract(psi, {tape.leaf(half), tape.leaf(half)});
    CHECK(tape.value(c).v[0] == 1.0);
}

TEST_CASE("clique_contract agrees with the naive tensor-product oracle") {
    Rng rng(18);
    for (int trial = 0; trial < 20; ++trial) {
        int arity = 2 + trial % 3;
        Clique psi;
        std::size_t total = 1;
        for (int k = 0; k < arity; ++k) {
            psi.scope.push_back(k);
            int s = static_cast<int>(rng.uniform_int(2, 4));
            psi.shape.push_back(s);
            total *= s;
        }
        for (std::size_t t = 0; t < total; ++t) psi.table.push_back(rng.uniform(-2, 2));

        std::vector<Tensor> probs;
        for (int k = 0; k < arity; ++k) {
            Tensor p({psi.shape[k]});
            double sum = 0.0;
            for (auto& x : p.v) {
                x = rng.uniform(0.01, 1.0);
                sum += x;
            }
            for (auto& x : p.v) x /= sum;
            probs.push_back(std::move(p));
        }

        // naive O(prod S) expansion
        double expect = 0.0;
        Assignment idx(arity, 0);
        for (std::size_t t = 0; t < total; ++t) {
            std::size_t rem = t;
            for (int k = arity - 1; k >= 0; --k) {
                idx[k] = static_cast<int>(rem % psi.shape[k]);
                rem /= psi.shape[k];
            }
            double w = psi.table[t];
            for (int k = 0; k < arity; ++k) w *= probs[k].v[idx[k]];
            expect += w;
        }

        Tape tape;
        std::vector<Tape::Node> leaves;
        for (auto& p : probs) leaves.push_back(tape.leaf(p));
        auto out = tape.clique_contract(psi, leaves);
        CHECK(near(tape.value(out).v[0], expect, 1e-10));

        CHECK(fd_check(probs, [&](Tape& t, const std::vector<Tape::Node>& l) {
                  return t.clique_contract(psi, l);
              }) < 1e-4);
    }
}

TEST_CASE("backward requires a scalar loss") {
    Tape tape;
    Tensor m({2, 2}, 1.0);
    auto n = tape.leaf(m);
    CHECK_THROWS_AS(tape.backward(n), NonScalarLoss);
}

TEST_CASE("adam first step moves by about lr and ignores zero gradients") {
    {
        std::vector<Tensor> params{Tensor({2}, 1.0)};
        AdamState adam;
        adam.lr = 0.01;
        adam.init(params);
        std::vector<Tensor> zero{Tensor({2}, 0.0)};
        adam.update(params, zero);
        CHECK(params[0].v == std::vector<double>{1.0, 1.0});
    }

    std::vector<Tensor> params{Tensor({2}, 1.0)};
    AdamState adam;
    adam.lr = 0.01;
    adam.init(params);
    std::vector<Tensor> grads{Tensor({2}, 0.0)};
    grads[0].v = {1.0, -3.0};
    adam.update(params, grads);
    // bias-corrected first effective step is ~lr in the gradient direction
    CHECK(near(params[0].v[0], 1.0 - 0.01, 1e-6));
    CHECK(near(params[0].v[1], 1.0 + 0.01, 1e-6));
}
