#include "chaoskit/shift.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <queue>
#include <sstream>

namespace chaoskit {

// ---------------------------------------------------------------- Word

Word Word::parse(const std::string& digits) {
    std::vector<Symbol> out;
    out.reserve(digits.size());
    for (char c : digits) {
        if (c < '0' || c > '9')
            throw ParameterError("word digit string contains non-digit: " + digits);
        out.push_back(static_cast<Symbol>(c - '0'));
    }
    return Word(std::move(out));
}

Word Word::repeated(Symbol s, std::size_t count) {
    return Word(std::vector<Symbol>(count, s));
}

Word Word::prefix(std::size_t len) const {
    return slice(0, len);
}

Word Word::slice(std::size_t begin, std::size_t end) const {
    if (begin > end || end > symbols.size())
        throw ParameterError("word slice out of range");
    return Word(std::vector<Symbol>(symbols.begin() + begin, symbols.begin() + end));
}

Word& Word::append(const Word& other) {
    symbols.insert(symbols.end(), other.symbols.begin(), other.symbols.end());
    return *this;
}

std::string Word::str() const {
    std::string s;
    s.reserve(symbols.size());
    for (Symbol c : symbols) s.push_back(static_cast<char>('0' + c));
    return s;
}

void Word::validate_alphabet(unsigned alphabet_size) const {
    for (Symbol c : symbols)
        if (c >= alphabet_size)
            throw ParameterError("word symbol " + std::to_string(int(c)) +
                                 " outside alphabet of size " + std::to_string(alphabet_size));
}

// ---------------------------------------------------------------- SymbolStream

SymbolStream::SymbolStream(unsigned alphabet, Word w, std::string tag)
    : alphabet_size(alphabet), horizon(w.size()), window(std::move(w)),
      generator_tag(std::move(tag)) {
    window.validate_alphabet(alphabet_size);
}

SymbolStream SymbolStream::shifted(std::size_t n) const {
    if (n > horizon) throw ParameterError("shift exceeds horizon");
    return SymbolStream(alphabet_size, window.slice(n, horizon),
                        generator_tag + "|sigma^" + std::to_string(n));
}

SymbolStream SymbolStream::truncated(std::size_t len) const {
    if (len > horizon) throw ParameterError("truncation exceeds horizon");
    return SymbolStream(alphabet_size, window.prefix(len), generator_tag);
}

SymbolStream SymbolStream::constant(unsigned alphabet, Symbol s, std::size_t horizon,
                                    std::string tag) {
    if (s >= alphabet) throw ParameterError("constant symbol outside alphabet");
    return SymbolStream(alphabet, Word::repeated(s, horizon), std::move(tag));
}

// ---------------------------------------------------------------- Presentation

Presentation::Presentation(unsigned vertices, std::vector<Edge> e)
    : vertex_count(vertices), edges(std::move(e)) {
    if (edges.empty()) throw ParameterError("presentation needs at least one edge");
    for (const Edge& ed : edges)
        if (ed.from >= vertex_count || ed.to >= vertex_count)
            throw ParameterError("presentation edge endpoint out of range");
    std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
        return std::tie(a.from, a.label, a.to) < std::tie(b.from, b.label, b.to);
    });
    if (std::adjacent_find(edges.begin(), edges.end()) != edges.end())
        throw ParameterError("presentation contains a duplicate edge");
}

Presentation Presentation::parse(std::istream& in, unsigned& alphabet_out) {
    std::string line;
    unsigned vertices = 0, alphabet = 0;
    bool have_header = false;
    std::vector<Edge> edges;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        if (!have_header) {
            std::string v_field, a_field;
            if (!(ls >> v_field >> a_field)) continue;  // blank line before header
            if (v_field.rfind("vertices=", 0) != 0 || a_field.rfind("alphabet=", 0) != 0)
                throw ParameterError("presentation header must be 'vertices=<n> alphabet=<m>'");
            vertices = static_cast<unsigned>(std::stoul(v_field.substr(9)));
            alphabet = static_cast<unsigned>(std::stoul(a_field.substr(9)));
            have_header = true;
            continue;
        }
        std::string first;
        if (!(ls >> first)) continue;  // blank or comment-only line
        unsigned from, to, label;
        std::istringstream es(line);
        if (!(es >> from >> to >> label))
            throw ParameterError("malformed presentation edge line: " + line);
        if (label > 255) throw ParameterError("edge label out of range");
        edges.push_back(Edge{from, to, static_cast<Symbol>(label)});
    }
    if (!have_header) throw ParameterError("presentation file has no header");
    alphabet_out = alphabet;
    return Presentation(vertices, std::move(edges));
}

void Presentation::write(std::ostream& out, unsigned alphabet_size) const {
    out << "vertices=" << vertex_count << " alphabet=" << alphabet_size << "\n";
    for (const Edge& e : edges)
        out << e.from << ' ' << e.to << ' ' << unsigned(e.label) << "\n";
}

// ---------------------------------------------------------------- SoficShift

SoficShift::SoficShift(Presentation presentation, unsigned alphabet_size)
    : pres_(std::move(presentation)), alphabet_(alphabet_size) {
    if (alphabet_ == 0) throw ParameterError("alphabet must be nonempty");
    for (const Edge& e : pres_.edges)
        if (e.label >= alphabet_)
            throw ParameterError("presentation label outside alphabet");
    small_ = pres_.vertex_count <= 64;
    if (small_) {
        successor_.assign(std::size_t(pres_.vertex_count) * alphabet_, 0);
        for (const Edge& e : pres_.edges)
            successor_[std::size_t(e.from) * alphabet_ + e.label] |= (1ull << e.to);
    }
}

std::uint64_t SoficShift::step_mask(std::uint64_t from_mask, Symbol label) const {
    std::uint64_t out = 0;
    while (from_mask) {
        unsigned v = static_cast<unsigned>(std::countr_zero(from_mask));
        from_mask &= from_mask - 1;
        out |= successor_[std::size_t(v) * alphabet_ + label];
    }
    return out;
}

std::vector<bool> SoficShift::step_generic(const std::vector<bool>& from, Symbol label) const {
    std::vector<bool> out(pres_.vertex_count, false);
    for (const Edge& e : pres_.edges)
        if (e.label == label && from[e.from]) out[e.to] = true;
    return out;
}

bool SoficShift::word_allowed(const Word& w) const {
    w.validate_alphabet(alphabet_);
    if (small_) {
        std::uint64_t mask = (pres_.vertex_count == 64)
                                 ? ~0ull
                                 : ((1ull << pres_.vertex_count) - 1);
        for (Symbol c : w.symbols) {
            mask = step_mask(mask, c);
            if (!mask) return false;
        }
        return true;
    }
    std::vector<bool> set(pres_.vertex_count, true);
    for (Symbol c : w.symbols) {
        set = step_generic(set, c);
        if (std::find(set.begin(), set.end(), true) == set.end()) return false;
    }
    return true;
}

bool SoficShift::stream_allowed(const SymbolStream& s) const {
    if (s.alphabet_size != alphabet_)
        throw DimensionError("stream alphabet does not match shift");
    return word_allowed(s.window);
}

bool SoficShift::is_mixing() const {
    if (mixing_cache_ >= 0) return mixing_cache_ == 1;
    const unsigned n = pres_.vertex_count;
    std::vector<std::vector<unsigned>> fwd(n), bwd(n);
    for (const Edge& e : pres_.edges) {
        fwd[e.from].push_back(e.to);
        bwd[e.to].push_back(e.from);
    }
    auto reach = [&](const std::vector<std::vector<unsigned>>& adj) {
        std::vector<bool> seen(n, false);
        std::queue<unsigned> q;
        q.push(0);
        seen[0] = true;
        while (!q.empty()) {
            unsigned v = q.front();
            q.pop();
            for (unsigned w : adj[v])
                if (!seen[w]) {
                    seen[w] = true;
                    q.push(w);
                }
        }
        return seen;
    };
    auto f = reach(fwd), b = reach(bwd);
    bool connected = true;
    for (unsigned v = 0; v < n; ++v) connected = connected && f[v] && b[v];
    if (!connected) {
        mixing_cache_ = 0;
        return false;
    }
    // Aperiodicity: gcd over edges of (level difference + 1) under BFS levels.
    std::vector<long> level(n, -1);
    std::queue<unsigned> q;
    q.push(0);
    level[0] = 0;
    while (!q.empty()) {
        unsigned v = q.front();
        q.pop();
        for (unsigned w : fwd[v])
            if (level[w] < 0) {
                level[w] = level[v] + 1;
                q.push(w);
            }
    }
    long g = 0;
    for (const Edge& e : pres_.edges)
        g = std::gcd(g, std::abs(level[e.from] + 1 - level[e.to]));
    mixing_cache_ = (g == 1) ? 1 : 0;
    return mixing_cache_ == 1;
}

unsigned SoficShift::specification_gap() const {
    if (gap_cache_) return gap_cache_;
    if (!is_mixing()) throw StructureError("specification gap requires a mixing shift");
    const unsigned n = pres_.vertex_count;
    std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false)), pw;
    for (const Edge& e : pres_.edges) adj[e.from][e.to] = true;
    pw = adj;
    const unsigned cap = n * n + alphabet_;
    for (unsigned power = 1; power <= cap; ++power) {
        bool all = true;
        for (unsigned i = 0; i < n && all; ++i)
            for (unsigned j = 0; j < n && all; ++j) all = pw[i][j];
        if (all) {
            gap_cache_ = power;
            return power;
        }
        std::vector<std::vector<bool>> next(n, std::vector<bool>(n, false));
        for (unsigned i = 0; i < n; ++i)
            for (unsigned k = 0; k < n; ++k)
                if (pw[i][k])
                    for (unsigned j = 0; j < n; ++j)
                        if (adj[k][j]) next[i][j] = true;
        pw = std::move(next);
    }
    throw StructureError("no exact-length connectivity within the power cap");
}

Word SoficShift::least_completion(const std::vector<std::optional<Symbol>>& constraints) const {
    const std::size_t n = constraints.size();
    for (const auto& c : constraints)
        if (c && *c >= alphabet_) throw ParameterError("constraint symbol outside alphabet");

    if (small_) {
        const std::uint64_t full = (pres_.vertex_count == 64)
                                       ? ~0ull
                                       : ((1ull << pres_.vertex_count) - 1);
        // feas[p]: vertices from which positions p..n-1 can be completed.
        std::vector<std::uint64_t> feas(n + 1);
        feas[n] = full;
        for (std::size_t p = n; p-- > 0;) {
            std::uint64_t mask = 0;
            for (const Edge& e : pres_.edges) {
                if (constraints[p] && *constraints[p] != e.label) continue;
                if (feas[p + 1] & (1ull << e.to)) mask |= (1ull << e.from);
            }
            feas[p] = mask;
        }
        if (!feas[0]) throw StructureError("no allowed word satisfies the constraints");
        std::vector<Symbol> out;
        out.reserve(n);
        std::uint64_t current = feas[0];
        for (std::size_t p = 0; p < n; ++p) {
            bool placed = false;
            const Symbol lo = constraints[p] ? *constraints[p] : Symbol(0);
            const Symbol hi = constraints[p] ? *constraints[p]
                                             : static_cast<Symbol>(alphabet_ - 1);
            for (unsigned a = lo; a <= hi; ++a) {
                std::uint64_t next = step_mask(current, static_cast<Symbol>(a)) & feas[p + 1];
                if (next) {
                    out.push_back(static_cast<Symbol>(a));
                    current = next;
                    placed = true;
                    break;
                }
            }
            if (!placed) throw StructureError("constraint completion dead-ends");
        }
        return Word(std::move(out));
    }

    // Generic (rarely used) path for presentations above 64 vertices.
    std::vector<std::vector<bool>> feas(n + 1, std::vector<bool>(pres_.vertex_count, false));
    feas[n].assign(pres_.vertex_count, true);
    for (std::size_t p = n; p-- > 0;) {
        for (const Edge& e : pres_.edges) {
            if (constraints[p] && *constraints[p] != e.label) continue;
            if (feas[p + 1][e.to]) feas[p][e.from] = true;
        }
    }
    if (std::find(feas[0].begin(), feas[0].end(), true) == feas[0].end())
        throw StructureError("no allowed word satisfies the constraints");
    std::vector<Symbol> out;
    std::vector<bool> current = feas[0];
    for (std::size_t p = 0; p < n; ++p) {
        bool placed = false;
        const Symbol lo = constraints[p] ? *constraints[p] : Symbol(0);
        const Symbol hi = constraints[p] ? *constraints[p]
                                         : static_cast<Symbol>(alphabet_ - 1);
        for (unsigned a = lo; a <= hi && !placed; ++a) {
            std::vector<bool> next = step_generic(current, static_cast<Symbol>(a));
            for (unsigned v = 0; v < pres_.vertex_count; ++v)
                next[v] = next[v] && feas[p + 1][v];
            if (std::find(next.begin(), next.end(), true) != next.end()) {
                out.push_back(static_cast<Symbol>(a));
                current = std::move(next);
                placed = true;
            }
        }
        if (!placed) throw StructureError("constraint completion dead-ends");
    }
    return Word(std::move(out));
}

Word SoficShift::bridge_word(const Word& u, const Word& v, unsigned gap) const {
    if (!word_allowed(u) || !word_allowed(v))
        throw ParameterError("bridge endpoints must be allowed words");
    if (gap < specification_gap())
        throw ParameterError("bridge gap " + std::to_string(gap) +
                             " below specification gap " +
                             std::to_string(specification_gap()));
    std::vector<std::optional<Symbol>> constraints(u.size() + gap + v.size());
    for (std::size_t i = 0; i < u.size(); ++i) constraints[i] = u[i];
    for (std::size_t i = 0; i < v.size(); ++i) constraints[u.size() + gap + i] = v[i];
    Word whole = least_completion(constraints);
    return whole.slice(u.size(), u.size() + gap);
}

// ---------------------------------------------------------------- factories

SoficShift build_pi_shift() {
    // Vertex k hosts the state "last nonzero symbol was k+1".
    std::vector<Edge> edges;
    for (unsigned k = 0; k < 4; ++k) {
        edges.push_back(Edge{k, k, Symbol(0)});
        edges.push_back(Edge{k, k, Symbol(k + 1)});
        unsigned next = (k + 1) % 4;
        edges.push_back(Edge{k, next, Symbol(next + 1)});
    }
    return SoficShift(Presentation(4, std::move(edges)), 5);
}

SoficShift full_shift(unsigned alphabet_size) {
    if (alphabet_size == 0) throw ParameterError("alphabet must be nonempty");
    std::vector<Edge> edges;
    for (unsigned a = 0; a < alphabet_size; ++a)
        edges.push_back(Edge{0, 0, static_cast<Symbol>(a)});
    return SoficShift(Presentation(1, std::move(edges)), alphabet_size);
}

// ---------------------------------------------------------------- metric

double shift_metric(const SymbolStream& x, const SymbolStream& y) {
    if (x.alphabet_size != y.alphabet_size)
        throw DimensionError("shift metric needs equal alphabets");
    if (x.horizon != y.horizon)
        throw DimensionError("shift metric needs equal horizons");
    for (std::size_t i = 0; i < x.horizon; ++i)
        if (x.at(i) != y.at(i)) return std::ldexp(1.0, -static_cast<int>(i));
    return 0.0;
}

}  // namespace chaoskit
