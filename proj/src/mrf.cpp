#include "mrf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>

namespace nlift {

std::size_t Clique::table_size() const {
    std::size_t n = 1;
    for (int s : shape) n *= static_cast<std::size_t>(s);
    return n;
}

std::size_t flat_index(const std::vector<int>& scope, const std::vector<int>& shape,
                       const Assignment& x) {
    std::size_t idx = 0;
    for (std::size_t k = 0; k < scope.size(); ++k)
        idx = idx * static_cast<std::size_t>(shape[k]) + static_cast<std::size_t>(x[scope[k]]);
    return idx;
}

double Clique::at(const Assignment& x) const {
    return table[flat_index(scope, shape, x)];
}

bool MrfInstance::valid_assignment(const Assignment& x) const {
    if (static_cast<int>(x.size()) != n_vars) return false;
    for (int i = 0; i < n_vars; ++i)
        if (x[i] < 0 || x[i] >= card[i]) return false;
    return true;
}

int MrfInstance::max_card() const {
    int s = 0;
    for (int c : card) s = std::max(s, c);
    return s;
}

bool MrfInstance::pairwise_only() const {
    for (const auto& c : cliques)
        if (c.scope.size() > 2) return false;
    return true;
}

namespace {

// Reorder a table over `scope` so the scope becomes ascending.
void sort_scope(std::vector<int>& scope, const std::vector<int>& card,
                std::vector<double>& table) {
    const std::size_t m = scope.size();
    std::vector<std::size_t> perm(m);
    std::iota(perm.begin(), perm.end(), 0);
    std::sort(perm.begin(), perm.end(),
              [&](std::size_t a, std::size_t b) { return scope[a] < scope[b]; });

    bool sorted = true;
    for (std::size_t k = 0; k < m; ++k)
        if (perm[k] != k) sorted = false;
    if (sorted) return;

    std::vector<int> old_scope = scope, old_shape(m), new_shape(m);
    for (std::size_t k = 0; k < m; ++k) old_shape[k] = card[old_scope[k]];
    for (std::size_t k = 0; k < m; ++k) {
        scope[k] = old_scope[perm[k]];
        new_shape[k] = old_shape[perm[k]];
    }

    std::vector<double> out(table.size());
    std::vector<int> sub(m, 0); // multi-index over the new (sorted) axes
    for (std::size_t flat = 0; flat < out.size(); ++flat) {
        std::size_t src = 0;
        for (std::size_t k = 0; k < m; ++k) {
            // position of old axis k among the new axes
            std::size_t pos = 0;
            while (perm[pos] != k) ++pos;
            src = src * static_cast<std::size_t>(old_shape[k]) +
                  static_cast<std::size_t>(sub[pos]);
        }
        out[flat] = table[src];
        for (std::size_t k = m; k-- > 0;) {
            if (++sub[k] < new_shape[k]) break;
            sub[k] = 0;
        }
    }
    table = std::move(out);
}

} // namespace

MrfInstance canonicalize(int n_vars, const std::vector<int>& card,
                         const std::vector<EnergyTerm>& terms) {
    if (static_cast<int>(card.size()) != n_vars)
        throw ShapeMismatch("cardinality list length does not match variable count");

    MrfInstance inst;
    inst.n_vars = n_vars;
    inst.card = card;
    inst.unary.assign(n_vars, {});
    for (int i = 0; i < n_vars; ++i)
        inst.unary[i].assign(card[i], 0.0);

    std::map<std::vector<int>, std::size_t> by_scope;
    for (const auto& term : terms) {
        std::vector<int> scope = term.scope;
        std::vector<double> table = term.table;
        for (int v : scope)
            if (v < 0 || v >= n_vars)
                throw IndexOutOfRange("scope index out of range");
        if (std::set<int>(scope.begin(), scope.end()).size() != scope.size())
            throw ShapeMismatch("duplicate variable within one scope");
        std::size_t expect = 1;
        for (int v : scope) expect *= static_cast<std::size_t>(card[v]);
        if (table.size() != expect)
            throw ShapeMismatch("table size does not match scope cardinalities");
        for (double e : table)
            if (!std::isfinite(e)) throw ShapeMismatch("non-finite energy value");

        if (scope.size() == 1) {
            auto& u = inst.unary[scope[0]];
            for (std::size_t a = 0; a < table.size(); ++a) u[a] += table[a];
            continue;
        }
        sort_scope(scope, card, table);
        auto it = by_scope.find(scope);
        if (it == by_scope.end()) {
            Clique c;
            c.scope = scope;
            for (int v : scope) c.shape.push_back(card[v]);
            c.table = std::move(table);
            by_scope.emplace(scope, inst.cliques.size());
            inst.cliques.push_back(std::move(c));
        } else {
            auto& t = inst.cliques[it->second].table;
            for (std::size_t k = 0; k < t.size(); ++k) t[k] += table[k];
        }
    }
    return inst;
}

double energy(const MrfInstance& inst, const Assignment& x) {
    double total = 0.0;
    for (int i = 0; i < inst.n_vars; ++i) total += inst.unary[i][x[i]];
    for (const auto& c : inst.cliques) total += c.at(x);
    return total;
}

PairwiseGraph clique_expansion(const MrfInstance& inst) {
    std::set<std::pair<int, int>> edges;
    for (const auto& c : inst.cliques)
        for (std::size_t a = 0; a < c.scope.size(); ++a)
            for (std::size_t b = a + 1; b < c.scope.size(); ++b) {
                int i = c.scope[a], j = c.scope[b];
                edges.insert({std::min(i, j), std::max(i, j)});
            }
    PairwiseGraph g;
    g.n_vars = inst.n_vars;
    g.edges.assign(edges.begin(), edges.end());
    g.adj.assign(inst.n_vars, {});
    for (auto [i, j] : g.edges) {
        g.adj[i].push_back(j);
        g.adj[j].push_back(i);
    }
    for (auto& a : g.adj) std::sort(a.begin(), a.end());
    return g;
}

PaddedInstance pad(const MrfInstance& inst) {
    PaddedInstance p;
    p.base = inst;
    p.S = inst.max_card();
    p.padded_unary.assign(inst.n_vars, {});
    p.mask.assign(inst.n_vars, {});
    for (int i = 0; i < inst.n_vars; ++i) {
        const auto& u = inst.unary[i];
        double fill = u.empty() ? 0.0 : *std::max_element(u.begin(), u.end());
        p.padded_unary[i].assign(p.S, fill);
        std::copy(u.begin(), u.end(), p.padded_unary[i].begin());
        p.mask[i].assign(p.S, false);
        for (int a = 0; a < inst.card[i]; ++a) p.mask[i][a] = true;
    }
    for (const auto& c : inst.cliques) {
        Clique pc;
        pc.scope = c.scope;
        pc.shape.assign(c.scope.size(), p.S);
        double fill = *std::max_element(c.table.begin(), c.table.end());
        pc.table.assign(pc.table_size(), fill);
        // copy original entries into the enlarged tensor
        const std::size_t m = c.scope.size();
        std::vector<int> sub(m, 0);
        for (std::size_t flat = 0; flat < c.table.size(); ++flat) {
            std::size_t dst = 0;
            for (std::size_t k = 0; k < m; ++k)
                dst = dst * static_cast<std::size_t>(p.S) + static_cast<std::size_t>(sub[k]);
            pc.table[dst] = c.table[flat];
            for (std::size_t k = m; k-- > 0;) {
                if (++sub[k] < c.shape[k]) break;
                sub[k] = 0;
            }
        }
        p.padded_cliques.push_back(std::move(pc));
    }
    return p;
}

std::pair<Assignment, double> brute_force_map(const MrfInstance& inst,
                                              std::uint64_t budget) {
    std::uint64_t total = 1;
    for (int c : inst.card) {
        if (total > budget / static_cast<std::uint64_t>(c))
            throw TooLarge("state space exceeds enumeration budget");
        total *= static_cast<std::uint64_t>(c);
    }

    Assignment x(inst.n_vars, 0), best;
    double best_e = std::numeric_limits<double>::infinity();
    // lexicographic enumeration, strict improvement keeps the smallest argmin
    for (std::uint64_t it = 0; it < total; ++it) {
        double e = energy(inst, x);
        if (e < best_e) {
            best_e = e;
            best = x;
        }
        for (int k = inst.n_vars; k-- > 0;) {
            if (++x[k] < inst.card[k]) break;
            x[k] = 0;
        }
    }
    return {best, best_e};
}

} // namespace nlift
