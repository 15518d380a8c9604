#include "uai.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace nlift {

namespace {

// Tokenize after stripping "//" line comments (the annotated-example style).
std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> tokens;
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
        auto pos = line.find("//");
        if (pos != std::string::npos) line.resize(pos);
        std::istringstream words(line);
        std::string w;
        while (words >> w) tokens.push_back(w);
    }
    return tokens;
}

class TokenReader {
public:
    explicit TokenReader(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {}

    const std::string& next() {
        if (pos_ >= tokens_.size()) throw TruncatedFile("unexpected end of file");
        return tokens_[pos_++];
    }

    long next_int() {
        const std::string& t = next();
        long v = 0;
        auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
        if (ec != std::errc{} || p != t.data() + t.size())
            throw ParseError("expected integer, got '" + t + "'");
        return v;
    }

    double next_double() {
        const std::string& t = next();
        char* end = nullptr;
        double v = std::strtod(t.c_str(), &end);
        if (end != t.c_str() + t.size())
            throw ParseError("expected number, got '" + t + "'");
        return v;
    }

private:
    std::vector<std::string> tokens_;
    std::size_t pos_ = 0;
};

} // namespace

RawModel parse_uai(const std::string& text) {
    TokenReader r(tokenize(text));
    if (r.next() != "MARKOV")
        throw UnknownPreamble("expected MARKOV preamble");

    RawModel m;
    m.n_vars = static_cast<int>(r.next_int());
    if (m.n_vars < 0) throw ParseError("negative variable count");
    m.card.resize(m.n_vars);
    for (int i = 0; i < m.n_vars; ++i) {
        m.card[i] = static_cast<int>(r.next_int());
        if (m.card[i] < 1) throw ParseError("cardinality must be >= 1");
    }

    long n_cliques = r.next_int();
    if (n_cliques < 0) throw ParseError("negative clique count");
    m.scopes.resize(n_cliques);
    for (long k = 0; k < n_cliques; ++k) {
        long sz = r.next_int();
        if (sz < 1) throw ParseError("scope size must be >= 1");
        m.scopes[k].resize(sz);
        for (long j = 0; j < sz; ++j) {
            long v = r.next_int();
            if (v < 0 || v >= m.n_vars)
                throw IndexOutOfRange("scope variable index out of range");
            m.scopes[k][j] = static_cast<int>(v);
        }
    }

    m.potentials.resize(n_cliques);
    for (long k = 0; k < n_cliques; ++k) {
        long declared = r.next_int();
        std::size_t expect = 1;
        for (int v : m.scopes[k]) expect *= static_cast<std::size_t>(m.card[v]);
        if (static_cast<std::size_t>(declared) != expect)
            throw TableSizeMismatch("declared table size does not match scope");
        m.potentials[k].resize(declared);
        for (long j = 0; j < declared; ++j) m.potentials[k][j] = r.next_double();
    }
    return m;
}

RawModel parse_uai_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_uai(ss.str());
}

namespace {

// shortest round-trip decimal representation
std::string fmt(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, p);
}

} // namespace

std::string write_uai(const RawModel& m) {
    std::ostringstream out;
    out << "MARKOV\n" << m.n_vars << "\n";
    for (int i = 0; i < m.n_vars; ++i) out << m.card[i] << (i + 1 < m.n_vars ? ' ' : '\n');
    if (m.n_vars == 0) out << "\n";
    out << m.scopes.size() << "\n";
    for (const auto& s : m.scopes) {
        out << s.size();
        for (int v : s) out << ' ' << v;
        out << "\n";
    }
    out << "\n";
    for (const auto& t : m.potentials) {
        out << t.size() << "\n";
        for (std::size_t j = 0; j < t.size(); ++j)
            out << fmt(t[j]) << (j + 1 < t.size() ? ' ' : '\n');
        out << "\n";
    }
    return out.str();
}

void write_uai_file(const RawModel& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << write_uai(m);
    if (!out) throw IoError("write failed: " + path);
}

MrfInstance to_energies(const RawModel& m, std::optional<double> clamp) {
    std::vector<EnergyTerm> terms;
    terms.reserve(m.scopes.size());
    for (std::size_t k = 0; k < m.scopes.size(); ++k) {
        EnergyTerm t;
        t.scope = m.scopes[k];
        t.table.reserve(m.potentials[k].size());
        for (double p : m.potentials[k]) {
            if (p <= 0.0) {
                if (!clamp) throw NonPositivePotential("non-positive potential value");
                p = *clamp;
            }
            t.table.push_back(-std::log(p));
        }
        terms.push_back(std::move(t));
    }
    return canonicalize(m.n_vars, m.card, terms);
}

RawModel from_energies(const MrfInstance& inst) {
    RawModel m;
    m.n_vars = inst.n_vars;
    m.card = inst.card;
    for (int i = 0; i < inst.n_vars; ++i) {
        m.scopes.push_back({i});
        std::vector<double> pot(inst.unary[i].size());
        for (std::size_t a = 0; a < pot.size(); ++a) pot[a] = std::exp(-inst.unary[i][a]);
        m.potentials.push_back(std::move(pot));
    }
    for (const auto& c : inst.cliques) {
        m.scopes.push_back(c.scope);
        std::vector<double> pot(c.table.size());
        for (std::size_t j = 0; j < pot.size(); ++j) pot[j] = std::exp(-c.table[j]);
        m.potentials.push_back(std::move(pot));
    }
    return m;
}

} // namespace nlift
