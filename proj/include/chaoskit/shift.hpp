#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "chaoskit/errors.hpp"

namespace chaoskit {

using Symbol = std::uint8_t;

// A finite word over the alphabet {0, ..., alphabet_size-1}. Words do not
// carry their alphabet; operations that need one validate on entry.
// Digit-string I/O covers alphabets up to 10.
struct Word {
    std::vector<Symbol> symbols;

    Word() = default;
    explicit Word(std::vector<Symbol> s) : symbols(std::move(s)) {}

    static Word parse(const std::string& digits);
    static Word repeated(Symbol s, std::size_t count);

    std::size_t size() const { return symbols.size(); }
    bool empty() const { return symbols.empty(); }
    Symbol operator[](std::size_t i) const { return symbols[i]; }

    Word prefix(std::size_t len) const;
    Word slice(std::size_t begin, std::size_t end) const;  // [begin, end)
    Word& append(const Word& other);

    std::string str() const;
    void validate_alphabet(unsigned alphabet_size) const;

    bool operator==(const Word&) const = default;
};

// One-sided window of a point of a shift space, materialized to a finite
// horizon. generator_tag records the rule that produced the window so runs
// can be reproduced from the output alone.
struct SymbolStream {
    unsigned alphabet_size = 0;
    std::size_t horizon = 0;
    Word window;
    std::string generator_tag;

    SymbolStream() = default;
    SymbolStream(unsigned alphabet, Word w, std::string tag);

    Symbol at(std::size_t i) const { return window.symbols[i]; }

    // sigma^n applied to the window: drops n leading symbols.
    SymbolStream shifted(std::size_t n) const;
    // Truncates the window to the first `len` symbols.
    SymbolStream truncated(std::size_t len) const;

    static SymbolStream constant(unsigned alphabet, Symbol s, std::size_t horizon,
                                 std::string tag = "constant");
};

struct Edge {
    unsigned from = 0;
    unsigned to = 0;
    Symbol label = 0;

    friend bool operator==(const Edge&, const Edge&) = default;
    friend auto operator<=>(const Edge&, const Edge&) = default;
};

// Labeled directed graph presenting a sofic shift. Edges are kept sorted by
// (from, label, to); this is the canonical edge ordering every deterministic
// tie-break in the toolkit refers to.
struct Presentation {
    unsigned vertex_count = 0;
    std::vector<Edge> edges;

    Presentation() = default;
    Presentation(unsigned vertices, std::vector<Edge> e);

    // Text format: header "vertices=<n> alphabet=<m>", then one edge per
    // line "from to label". '#' starts a comment.
    static Presentation parse(std::istream& in, unsigned& alphabet_out);
    void write(std::ostream& out, unsigned alphabet_size) const;
};

// Sofic shift given by a labeled-graph presentation. All queries are pure;
// a shift is safe to share across threads once built.
class SoficShift {
public:
    SoficShift(Presentation presentation, unsigned alphabet_size);

    const Presentation& presentation() const { return pres_; }
    unsigned alphabet_size() const { return alphabet_; }

    // True iff some path in the presentation carries the label sequence w.
    bool word_allowed(const Word& w) const;
    bool stream_allowed(const SymbolStream& s) const;

    // Strong connectivity + gcd of cycle lengths = 1.
    bool is_mixing() const;

    // Least n >= 1 such that every ordered vertex pair is joined by a path
    // of length exactly n; this certifies the specification property with
    // gap n. Throws StructureError when the shift is not mixing.
    unsigned specification_gap() const;

    // Lexicographically least w with |w| = gap and u.w.v allowed.
    Word bridge_word(const Word& u, const Word& v, unsigned gap) const;

    // Lexicographically least allowed word matching per-position constraints
    // (nullopt = free position). Throws StructureError when unsatisfiable.
    Word least_completion(const std::vector<std::optional<Symbol>>& constraints) const;

private:
    Presentation pres_;
    unsigned alphabet_ = 0;

    // successor_[from * alphabet + label] = bitmask of targets (vertex_count <= 64),
    // otherwise the generic edge list is walked.
    bool small_ = false;
    std::vector<std::uint64_t> successor_;

    mutable int mixing_cache_ = -1;           // -1 unknown, else 0/1
    mutable unsigned gap_cache_ = 0;          // 0 unknown

    std::uint64_t step_mask(std::uint64_t from_mask, Symbol label) const;
    std::vector<bool> step_generic(const std::vector<bool>& from, Symbol label) const;
};

// The shift over {0,1,2,3,4} defined by the follow rules: after the last
// nonzero symbol k (zeros in between allowed), the next nonzero symbol must
// be k or (k mod 4)+1. Strictly sofic; its presentation has one vertex per
// nonzero symbol, self-loops labeled 0 and k, and cycle edges k -> k+1.
SoficShift build_pi_shift();

// Full shift on n symbols: a single vertex with n self-loops.
SoficShift full_shift(unsigned alphabet_size);

// 2^-k with k the first index where the windows differ; 0 when identical.
double shift_metric(const SymbolStream& x, const SymbolStream& y);

}  // namespace chaoskit
