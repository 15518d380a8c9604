#include "pci.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

namespace nlift {

namespace {

using nlohmann::json;

int state_index(const std::vector<int>& states, int id) {
    auto it = std::find(states.begin(), states.end(), id);
    if (it == states.end()) throw UnknownState("state id not in device domain");
    return static_cast<int>(it - states.begin());
}

} // namespace

PciProblem parse_pci(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SchemaError(std::string("invalid JSON: ") + e.what());
    }
    try {
        PciProblem p;
        std::map<int, int> device_pos;
        for (const auto& d : doc.at("devices")) {
            int id = d.at("id").get<int>();
            if (device_pos.count(id)) throw SchemaError("duplicate device id");
            device_pos[id] = static_cast<int>(p.device_ids.size());
            p.device_ids.push_back(id);
            std::vector<int> states = d.at("states").get<std::vector<int>>();
            if (states.empty()) throw SchemaError("device with empty state set");
            p.states.push_back(std::move(states));
        }
        if (p.device_ids.empty()) throw SchemaError("no devices");
        if (doc.contains("interference")) {
            for (const auto& t : doc.at("interference")) {
                InterferenceTerm term;
                auto it_i = device_pos.find(t.at("i").get<int>());
                auto it_j = device_pos.find(t.at("j").get<int>());
                if (it_i == device_pos.end() || it_j == device_pos.end())
                    throw SchemaError("interference references unknown device");
                term.i = it_i->second;
                term.j = it_j->second;
                if (term.i == term.j) throw SchemaError("self interference");
                term.coeff = t.at("coeff").get<double>();
                if (term.coeff <= 0.0) throw SchemaError("coeff must be > 0");
                for (const auto& c : t.at("conflicts")) {
                    ConflictGroup g;
                    for (int s : c.at("mi").get<std::vector<int>>())
                        g.mi.push_back(state_index(p.states[term.i], s));
                    for (int s : c.at("mj").get<std::vector<int>>())
                        g.mj.push_back(state_index(p.states[term.j], s));
                    term.conflicts.push_back(std::move(g));
                }
                p.interference.push_back(std::move(term));
            }
        }
        return p;
    } catch (const json::exception& e) {
        throw SchemaError(std::string("schema violation: ") + e.what());
    }
}

PciProblem parse_pci_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_pci(ss.str());
}

namespace {

bool conflicts(const InterferenceTerm& t, int xi, int xj) {
    for (const auto& g : t.conflicts) {
        bool in_i = std::find(g.mi.begin(), g.mi.end(), xi) != g.mi.end();
        bool in_j = std::find(g.mj.begin(), g.mj.end(), xj) != g.mj.end();
        if (in_i && in_j) return true;
    }
    return false;
}

} // namespace

MrfInstance pci_to_mrf(const PciProblem& p) {
    int n = static_cast<int>(p.device_ids.size());
    std::vector<int> card(n);
    for (int i = 0; i < n; ++i) card[i] = static_cast<int>(p.states[i].size());

    std::vector<EnergyTerm> terms;
    for (const auto& t : p.interference) {
        EnergyTerm e;
        e.scope = {t.i, t.j};
        e.table.assign(static_cast<std::size_t>(card[t.i]) * card[t.j], 0.0);
        for (int a = 0; a < card[t.i]; ++a)
            for (int b = 0; b < card[t.j]; ++b)
                if (conflicts(t, a, b))
                    e.table[static_cast<std::size_t>(a) * card[t.j] + b] = t.coeff;
        terms.push_back(std::move(e));
    }
    return canonicalize(n, card, terms);
}

double pci_objective(const PciProblem& p, const Assignment& x) {
    double total = 0.0;
    for (const auto& t : p.interference) {
        // minimal feasible L_ij: max over groups of (I(x_i in M_ih) + I(x_j in M_jh) - 1)
        double l = 0.0;
        for (const auto& g : t.conflicts) {
            int in_i = std::find(g.mi.begin(), g.mi.end(), x[t.i]) != g.mi.end();
            int in_j = std::find(g.mj.begin(), g.mj.end(), x[t.j]) != g.mj.end();
            l = std::max(l, static_cast<double>(in_i + in_j - 1));
        }
        total += t.coeff * l;
    }
    return total;
}

} // namespace nlift
