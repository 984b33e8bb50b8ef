#pragma once

#include <cstddef>
#include <map>
#include <vector>

#include "chaoskit/shift.hpp"

namespace chaoskit {

// Blocks of target words to shadow at given start indices, with a declared
// minimum gap between consecutive blocks.
struct TraceSpec {
    struct Block {
        Word target;
        std::size_t start = 0;
    };
    std::vector<Block> blocks;
    std::size_t min_gap = 0;

    TraceSpec(std::vector<Block> blocks, std::size_t min_gap);
};

// Forced content to paste into a stream under assembly.
struct PasteBlock {
    std::size_t start = 0;
    Word content;
};

// Lexicographically least allowed window of the given horizon carrying every
// paste block verbatim. Conflicting or out-of-range blocks fail.
SymbolStream assemble_stream(const SoficShift& shift, const std::vector<PasteBlock>& blocks,
                             std::size_t horizon, const std::string& tag);

// Realizes the specification property on a shift: each target word appears
// verbatim at its start index; the gaps are filled with bridge content and
// the whole window is allowed.
SymbolStream trace_spec_point(const SoficShift& shift, const TraceSpec& spec,
                              std::size_t horizon);

// z alternating length-N copies of p and q prefixes, N the smallest
// multiple of n covering both the specification gap and the index at which
// p and q first disagree. The measured separation is
// min_i d(sigma^i z, sigma^{i+n} z) over the scan range.
struct ZnResult {
    SymbolStream stream;
    unsigned n = 0;
    std::size_t block_len = 0;
    double separation = 0.0;
};

ZnResult build_z_n(const SoficShift& shift, const SymbolStream& p, const SymbolStream& q,
                   unsigned n, std::size_t horizon);

// z_n for n = 1..n_max with one uniform separation bound, verified by direct
// scan of every member.
struct DistalFamily {
    double eps = 0.0;
    std::size_t horizon = 0;
    std::map<unsigned, ZnResult> members;
    SymbolStream base_p;  // the traced fixed-point-like stream (z_0 role)
};

DistalFamily build_distal_family(const SoficShift& shift, unsigned n_max,
                                 std::size_t horizon);

// Witness pair for the dense relation Q_m^n(z_n, z_n): x' carries the two
// traced blocks at certificate indices (l, s); y' carries the mirrored
// blocks. Both agree with the inputs on declared prefixes.
struct QWitness {
    SymbolStream x;
    SymbolStream y;
    std::size_t l = 0;
    std::size_t s = 0;
    std::size_t x_prefix_len = 0;
    std::size_t y_prefix_len = 0;
    unsigned trace_depth = 0;  // symbols of agreement realizing d < 1/m
};

QWitness build_q_witness(const SoficShift& shift, const DistalFamily& family,
                         const SymbolStream& x, const SymbolStream& y, unsigned m,
                         unsigned n, std::size_t horizon);

// Required horizon for the (l, s) certificate produced by build_q_witness.
std::size_t q_witness_min_horizon(const SoficShift& shift, unsigned m, unsigned n);

// An orbit pair that is empirically DC1 at the reported epsilon: far stages
// trace z_1 against sigma(z_1), a dominating close stage traces the fixed
// point 0^inf, with stage ends planted on the horizon schedule.
struct DC1Pair {
    SymbolStream x;
    SymbolStream y;
    double epsilon = 0.0;
    std::size_t far1_end = 0;     // 0 when the opening far stage is omitted
    std::size_t close_end = 0;    // scheduled horizon certifying closeness
    std::size_t far_start = 0;    // start of the dominating far stage
    double far_separation = 0.0;  // measured min distance on the far stage
};

DC1Pair build_dc1_pair(const SoficShift& shift, std::size_t horizon);

// `count` streams whose pairs -- including sigma^j-shifted pairs up to
// shift_depth -- are all empirically DC1 at one epsilon. Far stages copy a
// common distal pattern at spaced offsets so every shifted pair stays
// separated.
struct InvariantSample {
    std::vector<SymbolStream> points;
    double epsilon = 0.0;
    unsigned shift_depth = 0;
    std::size_t block_len = 0;
    std::size_t far1_end = 0;
    std::size_t close_end = 0;
    std::size_t far_start = 0;
};

InvariantSample build_invariant_sample(const SoficShift& shift, std::size_t count,
                                       std::size_t horizon, unsigned shift_depth = 3);

}  // namespace chaoskit
