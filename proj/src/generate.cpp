#include "generate.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "rng.hpp"

namespace nlift {

void GenSpec::validate() const {
    if (n_vars < 1) throw Error("n_vars must be >= 1");
    if (smin < 2 || smax < smin) throw Error("state range must satisfy 2 <= smin <= smax");
    if (edge_prob < 0.0 || edge_prob >= 1.0) throw Error("edge probability must be in [0, 1)");
    if (edge_prob == 0.0 && mean_degree <= 0.0)
        throw Error("either edge_prob or mean_degree must be set");
    if (p_size3 < 0.0 || p_size3 > 1.0) throw Error("p_size3 must be in [0, 1]");
    if (pot_lo <= 0.0 || pot_hi < pot_lo) throw Error("invalid potential range");
    if (potts_lo <= 0.0 || potts_hi < potts_lo) throw Error("invalid potts range");
}

namespace {

// exp(-(alpha+beta)) must stay a positive double; resample the rare
// draws whose sum would underflow.
std::pair<double, double> potts_params(const GenSpec& s, Rng& rng) {
    for (;;) {
        double alpha = rng.log_uniform(s.potts_lo, s.potts_hi);
        double beta = rng.log_uniform(s.potts_lo, s.potts_hi);
        if (alpha + beta <= 700.0) return {alpha, beta};
    }
}

std::vector<double> clique_potential(const GenSpec& s, const std::vector<int>& shape,
                                     Rng& rng) {
    std::size_t size = 1;
    for (int c : shape) size *= static_cast<std::size_t>(c);
    std::vector<double> table(size);
    if (s.potts) {
        auto [alpha, beta] = potts_params(s, rng);
        std::vector<int> sub(shape.size(), 0);
        for (std::size_t flat = 0; flat < size; ++flat) {
            bool all_equal = true;
            for (std::size_t k = 1; k < sub.size(); ++k)
                if (sub[k] != sub[0]) all_equal = false;
            table[flat] = std::exp(-((all_equal ? alpha : 0.0) + beta));
            for (std::size_t k = sub.size(); k-- > 0;) {
                if (++sub[k] < shape[k]) break;
                sub[k] = 0;
            }
        }
    } else {
        for (double& x : table) x = rng.uniform(s.pot_lo, s.pot_hi);
    }
    return table;
}

RawModel gen_attempt(const GenSpec& s, std::uint64_t seed) {
    Rng rng(seed);
    RawModel m;
    m.n_vars = s.n_vars;
    m.card.resize(s.n_vars);
    for (int i = 0; i < s.n_vars; ++i)
        m.card[i] = static_cast<int>(rng.uniform_int(s.smin, s.smax));

    for (int i = 0; i < s.n_vars; ++i) {
        m.scopes.push_back({i});
        std::vector<double> u(m.card[i]);
        for (double& x : u) x = rng.uniform(s.pot_lo, s.pot_hi);
        m.potentials.push_back(std::move(u));
    }

    double p = s.edge_prob > 0.0
                   ? s.edge_prob
                   : std::min(0.999, s.mean_degree / std::max(1, s.n_vars - 1));
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < s.n_vars; ++i)
        for (int j = i + 1; j < s.n_vars; ++j)
            if (rng.uniform() < p) edges.push_back({i, j});
    if (edges.empty()) throw DegenerateTopology("sampled graph has no edges");

    for (auto [i, j] : edges) {
        m.scopes.push_back({i, j});
        m.potentials.push_back(clique_potential(s, {m.card[i], m.card[j]}, rng));
    }

    if (s.highorder) {
        std::set<std::vector<int>> seen;
        int wanted = s.n_hyper > 0 ? s.n_hyper : std::max(1, s.n_vars / 4);
        int made = 0, attempts = 0;
        while (made < wanted && attempts < wanted * 100) {
            ++attempts;
            int size = rng.uniform() < s.p_size3 ? 3 : 4;
            if (size > s.n_vars) size = s.n_vars;
            std::set<int> nodes;
            while (static_cast<int>(nodes.size()) < size)
                nodes.insert(static_cast<int>(rng.uniform_int(0, s.n_vars - 1)));
            std::vector<int> scope(nodes.begin(), nodes.end());
            if (!seen.insert(scope).second) continue;
            std::vector<int> shape;
            for (int v : scope) shape.push_back(m.card[v]);
            m.scopes.push_back(scope);
            m.potentials.push_back(clique_potential(s, shape, rng));
            ++made;
        }
    }
    return m;
}

} // namespace

RawModel gen(const GenSpec& spec) {
    spec.validate();
    std::uint64_t seed = spec.seed;
    for (int attempt = 0;; ++attempt) {
        try {
            return gen_attempt(spec, seed);
        } catch (const DegenerateTopology&) {
            if (attempt >= 9) throw;
            seed = derive_seed(spec.seed, 1000 + static_cast<std::uint64_t>(attempt));
        }
    }
}

namespace {

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

} // namespace

std::string manifest_line(const GenSpec& s, const std::string& name,
                          const RawModel& model) {
    std::ostringstream key;
    key << s.n_vars << '|' << s.edge_prob << '|' << s.mean_degree << '|'
        << s.highorder << '|' << s.n_hyper << '|' << s.p_size3 << '|' << s.potts
        << '|' << s.smin << '|' << s.smax << '|' << s.pot_lo << '|' << s.pot_hi
        << '|' << s.potts_lo << '|' << s.potts_hi;
    std::ostringstream line;
    line << name << ' ' << model.n_vars << ' ' << model.scopes.size() << ' '
         << s.seed << ' ' << std::hex << fnv1a(key.str());
    return line.str();
}

} // namespace nlift
