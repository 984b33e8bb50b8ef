#include "chaoskit/scrambled.hpp"

#include <algorithm>
#include <cmath>
#include <bit>
#include <optional>

#include "chaoskit/chaos_stats.hpp"

namespace chaoskit {

namespace {

constexpr double kVerdictTol = 0.05;
constexpr unsigned kThresholdDepth = 10;  // dyadic grid floor 2^-10

std::size_t sub_floor(std::size_t a, std::size_t b) { return a > b ? a - b : 0; }

// First index where the windows of p and q disagree, if any.
std::optional<std::size_t> first_difference(const SymbolStream& p, const SymbolStream& q) {
    const std::size_t n = std::min(p.horizon, q.horizon);
    for (std::size_t i = 0; i < n; ++i)
        if (p.at(i) != q.at(i)) return i;
    return std::nullopt;
}

// Least nonzero symbol whose constant stream is allowed. A constant word of
// length vertex_count+1 forces a monochromatic cycle, so that length decides.
std::optional<Symbol> least_nonzero_constant(const SoficShift& shift) {
    const std::size_t probe = shift.presentation().vertex_count + 1;
    for (unsigned c = 1; c < shift.alphabet_size(); ++c)
        if (shift.word_allowed(Word::repeated(static_cast<Symbol>(c), probe)))
            return static_cast<Symbol>(c);
    return std::nullopt;
}

SymbolStream least_stream(const SoficShift& shift, std::size_t horizon,
                          std::optional<Symbol> first, const std::string& tag) {
    std::vector<std::optional<Symbol>> constraints(horizon);
    if (first && horizon > 0) constraints[0] = first;
    return SymbolStream(shift.alphabet_size(), shift.least_completion(constraints), tag);
}

// Stream q differing from p at index 0, preferring a constant stream.
SymbolStream pick_opposing_stream(const SoficShift& shift, const SymbolStream& p,
                                  std::size_t horizon) {
    if (auto c = least_nonzero_constant(shift); c && *c != p.at(0))
        return SymbolStream::constant(shift.alphabet_size(), *c, horizon, "constant");
    for (unsigned c = 0; c < shift.alphabet_size(); ++c) {
        if (c == p.at(0)) continue;
        try {
            return least_stream(shift, horizon, static_cast<Symbol>(c), "least-opposing");
        } catch (const StructureError&) {
        }
    }
    throw StructureError("no stream differs from the least stream at index 0");
}

// Alternating length-N copies of the prefixes of p and q; direct
// concatenation when allowed, bridged blocks otherwise.
SymbolStream build_alternating(const SoficShift& shift, const SymbolStream& p,
                               const SymbolStream& q, std::size_t block_len,
                               std::size_t horizon, const std::string& tag) {
    const std::size_t gap = shift.specification_gap();
    auto make_blocks = [&](std::size_t content_len) {
        std::vector<PasteBlock> blocks;
        for (std::size_t start = 0, r = 0; start < horizon; start += block_len, ++r) {
            const SymbolStream& src = (r % 2 == 0) ? p : q;
            std::size_t len = std::min(content_len, horizon - start);
            if (len == 0) break;
            blocks.push_back(PasteBlock{start, src.window.prefix(len)});
        }
        return blocks;
    };
    try {
        return assemble_stream(shift, make_blocks(block_len), horizon, tag);
    } catch (const StructureError&) {
        if (block_len <= gap)
            throw StructureError("block length leaves no room for bridges");
        return assemble_stream(shift, make_blocks(block_len - gap), horizon,
                               tag + "|bridged");
    }
}

// min_i d(sigma^i z, sigma^{i+n} z) over i < limit, where the scan stops
// early enough that truncated windows still contain a disagreement.
double scan_self_separation(const SymbolStream& z, std::size_t n, std::size_t margin) {
    if (z.horizon <= n + margin + 1)
        throw ParameterError("horizon too small to scan separation");
    DistanceSeries d = DistanceSeries::between(z, z.shifted(n));
    double best = 2.0;
    const std::size_t limit = d.size() - margin;
    for (std::size_t i = 0; i < limit; ++i) best = std::min(best, d.values[i]);
    return best;
}

// Largest dyadic 2^-k not exceeding value/2.
double half_dyadic(double value) {
    return std::ldexp(1.0, std::ilogb(value) - 1);
}

struct StagePlan {
    std::size_t far1_end = 0;   // 0 when omitted
    std::size_t close_end = 0;  // schedule entry certifying closeness
    std::size_t far_start = 0;  // close_end + slack
    std::size_t top = 0;        // schedule entry certifying separation
};

// Stage ends sit on the horizon schedule so that the dominating far stage
// covers all but `tol` of [0, top) and the close stage all but `tol` of
// [0, close_end).
StagePlan plan_stages(const std::vector<std::size_t>& schedule, std::size_t gap,
                      std::size_t far_edge, std::size_t close_edge) {
    StagePlan plan;
    plan.top = schedule.back();
    const double budget_top = kVerdictTol * static_cast<double>(plan.top);
    const std::size_t close_slack = kThresholdDepth + 4;
    std::size_t close_end = 0;
    for (std::size_t n : schedule)
        if (n < plan.top &&
            static_cast<double>(n + close_slack + far_edge + 1) <= budget_top)
            close_end = n;
    if (close_end == 0)
        throw ParameterError("horizon too small to plan the stage schedule");
    plan.close_end = close_end;
    plan.far_start = close_end + close_slack;
    const double budget_close = kVerdictTol * static_cast<double>(close_end) -
                                static_cast<double>(close_edge + kThresholdDepth + 4);
    for (std::size_t n : schedule)
        if (n < close_end && static_cast<double>(n) <= budget_close &&
            n > 2 * gap + 4)
            plan.far1_end = n;
    return plan;
}

}  // namespace

// ---------------------------------------------------------------- assembly

TraceSpec::TraceSpec(std::vector<Block> blocks_in, std::size_t gap)
    : blocks(std::move(blocks_in)), min_gap(gap) {
    for (std::size_t i = 0; i + 1 < blocks.size(); ++i) {
        if (blocks[i].start >= blocks[i + 1].start)
            throw ParameterError("trace blocks must have strictly increasing starts");
        std::size_t end = blocks[i].start + blocks[i].target.size();
        if (end + min_gap > blocks[i + 1].start)
            throw ParameterError("trace blocks closer than the declared gap");
    }
}

SymbolStream assemble_stream(const SoficShift& shift, const std::vector<PasteBlock>& blocks,
                             std::size_t horizon, const std::string& tag) {
    std::vector<std::optional<Symbol>> constraints(horizon);
    for (const PasteBlock& b : blocks) {
        if (b.start + b.content.size() > horizon)
            throw ParameterError("paste block exceeds horizon");
        for (std::size_t i = 0; i < b.content.size(); ++i) {
            auto& slot = constraints[b.start + i];
            if (slot && *slot != b.content[i])
                throw ParameterError("paste blocks conflict at index " +
                                     std::to_string(b.start + i));
            slot = b.content[i];
        }
    }
    return SymbolStream(shift.alphabet_size(), shift.least_completion(constraints), tag);
}

SymbolStream trace_spec_point(const SoficShift& shift, const TraceSpec& spec,
                              std::size_t horizon) {
    if (spec.min_gap < shift.specification_gap())
        throw ParameterError("trace gap below the specification gap");
    std::vector<PasteBlock> blocks;
    for (const TraceSpec::Block& b : spec.blocks) {
        if (!shift.word_allowed(b.target))
            throw ParameterError("trace target word is not allowed");
        blocks.push_back(PasteBlock{b.start, b.target});
    }
    return assemble_stream(shift, blocks, horizon, "trace-spec");
}

// ---------------------------------------------------------------- z_n

ZnResult build_z_n(const SoficShift& shift, const SymbolStream& p, const SymbolStream& q,
                   unsigned n, std::size_t horizon) {
    if (n == 0) throw ParameterError("build_z_n needs n >= 1");
    if (p.alphabet_size != shift.alphabet_size() || q.alphabet_size != shift.alphabet_size())
        throw DimensionError("stream alphabet does not match shift");
    auto diff = first_difference(p, q);
    if (!diff) throw ParameterError("build_z_n needs p != q on their windows");
    const std::size_t gap = shift.specification_gap();
    const std::size_t base = std::max<std::size_t>({gap, *diff + 1, 1});
    const std::size_t block_len = std::size_t(n) * ((base + n - 1) / n);

    ZnResult r;
    r.n = n;
    r.block_len = block_len;
    r.stream = build_alternating(shift, p, q, block_len, horizon,
                                 "z_n|n=" + std::to_string(n) +
                                     "|N=" + std::to_string(block_len));
    r.separation = scan_self_separation(r.stream, n, 4 * block_len + gap + 4);
    if (r.separation <= 0.0)
        throw StructureError("constructed z_n failed the separation scan");
    return r;
}

DistalFamily build_distal_family(const SoficShift& shift, unsigned n_max,
                                 std::size_t horizon) {
    if (n_max == 0) throw ParameterError("build_distal_family needs n_max >= 1");
    if (shift.alphabet_size() < 2)
        throw ParameterError("build_distal_family needs at least two symbols");
    if (!shift.is_mixing()) throw StructureError("shift must be mixing");

    DistalFamily fam;
    fam.horizon = horizon;
    fam.base_p = least_stream(shift, horizon, std::nullopt, "least-stream");
    SymbolStream q = pick_opposing_stream(shift, fam.base_p, horizon);
    fam.eps = 2.0;
    for (unsigned n = 1; n <= n_max; ++n) {
        ZnResult z = build_z_n(shift, fam.base_p, q, n, horizon);
        fam.eps = std::min(fam.eps, z.separation);
        fam.members.emplace(n, std::move(z));
    }
    return fam;
}

// ---------------------------------------------------------------- Q-witness

std::size_t q_witness_min_horizon(const SoficShift& shift, unsigned m, unsigned n) {
    if (m == 0) throw ParameterError("Q-witness needs m >= 1");
    const unsigned L = std::bit_width(m);  // agreement depth for d < 1/m
    const std::size_t gap = shift.specification_gap();
    const std::size_t s = m + 1;
    const std::size_t l =
        (n == 0) ? s : s + (std::size_t(1) << s) + L + gap + n + 1;
    if (l >= 48)
        throw ParameterError("Q-witness block 2^l overflows any practical horizon (l=" +
                             std::to_string(l) + ")");
    return l + n + (std::size_t(1) << l) + L + 1;
}

QWitness build_q_witness(const SoficShift& shift, const DistalFamily& family,
                         const SymbolStream& x, const SymbolStream& y, unsigned m,
                         unsigned n, std::size_t horizon) {
    if (m == 0) throw ParameterError("Q-witness needs m >= 1");
    if (!shift.stream_allowed(x) || !shift.stream_allowed(y))
        throw ParameterError("Q-witness inputs must be allowed windows");
    const SymbolStream* zsrc = nullptr;
    if (n == 0) {
        zsrc = &family.base_p;
    } else {
        auto it = family.members.find(n);
        if (it == family.members.end())
            throw ParameterError("distal family does not cover n = " + std::to_string(n));
        zsrc = &it->second.stream;
    }

    const unsigned L = std::bit_width(m);
    const std::size_t gap = shift.specification_gap();
    const std::size_t s = m + 1;
    const std::size_t l = (n == 0) ? s : s + (std::size_t(1) << s) + L + gap + n + 1;
    const std::size_t need = q_witness_min_horizon(shift, m, n);
    if (horizon < need)
        throw ParameterError("horizon too small for Q-witness; minimal sufficient horizon is " +
                             std::to_string(need));
    const std::size_t block_s_len = (std::size_t(1) << s) + L + 1;
    const std::size_t block_l_len = (std::size_t(1) << l) + L + 1;
    if (zsrc->horizon < l + block_l_len)
        throw ParameterError("distal family horizon too small for Q-witness blocks");

    QWitness w;
    w.l = l;
    w.s = s;
    w.trace_depth = L;
    w.x_prefix_len = sub_floor(s, gap);
    w.y_prefix_len = sub_floor(s + n, gap);

    std::vector<PasteBlock> xb, yb;
    if (w.x_prefix_len > 0)
        xb.push_back(PasteBlock{0, x.window.prefix(std::min(w.x_prefix_len, x.horizon))});
    xb.push_back(PasteBlock{s, zsrc->window.slice(s, s + block_s_len)});
    if (!(n == 0 && l == s))
        xb.push_back(PasteBlock{l + n, zsrc->window.slice(l, l + block_l_len)});

    if (w.y_prefix_len > 0)
        yb.push_back(PasteBlock{0, y.window.prefix(std::min(w.y_prefix_len, y.horizon))});
    yb.push_back(PasteBlock{s + n, zsrc->window.slice(s, s + block_s_len)});
    if (!(n == 0 && l == s))
        yb.push_back(PasteBlock{l, zsrc->window.slice(l, l + block_l_len)});

    const std::string base = "q-witness|m=" + std::to_string(m) + "|n=" + std::to_string(n) +
                             "|l=" + std::to_string(l) + "|s=" + std::to_string(s);
    w.x = assemble_stream(shift, xb, horizon, base + "|x");
    w.y = assemble_stream(shift, yb, horizon, base + "|y");
    w.x_prefix_len = std::min(w.x_prefix_len, x.horizon);
    w.y_prefix_len = std::min(w.y_prefix_len, y.horizon);
    return w;
}

// ---------------------------------------------------------------- DC1 pair

namespace {

void require_zero_loop(const SoficShift& shift) {
    for (const Edge& e : shift.presentation().edges)
        if (e.from == e.to && e.label == 0) return;
    throw StructureError("shift has no self-loop labeled 0 (fixed point 0^inf missing)");
}

// Close-stage content for a follower stream: copy the leader's resolved
// window on [from, to) so both trace the same point there. Falls back to the
// follower's own bridge content when the copy is infeasible.
SymbolStream assemble_follower(const SoficShift& shift, std::vector<PasteBlock> own_blocks,
                               const SymbolStream& leader, std::size_t from, std::size_t to,
                               std::size_t horizon, const std::string& tag) {
    std::vector<PasteBlock> forced = own_blocks;
    forced.push_back(PasteBlock{from, leader.window.slice(from, to)});
    try {
        return assemble_stream(shift, forced, horizon, tag);
    } catch (const StructureError&) {
        const std::size_t gap = shift.specification_gap();
        own_blocks.push_back(
            PasteBlock{from, Word::repeated(0, sub_floor(sub_floor(to, gap), from))});
        return assemble_stream(shift, own_blocks, horizon, tag + "|own-bridge");
    }
}

}  // namespace

DC1Pair build_dc1_pair(const SoficShift& shift, std::size_t horizon) {
    if (horizon < 1024) throw ParameterError("build_dc1_pair needs horizon >= 1024");
    if (!shift.is_mixing()) throw StructureError("shift must be mixing");
    require_zero_loop(shift);

    const std::size_t gap = shift.specification_gap();
    SymbolStream p = SymbolStream::constant(shift.alphabet_size(), 0, horizon, "0^inf");
    SymbolStream q = pick_opposing_stream(shift, p, horizon);
    ZnResult z1 = build_z_n(shift, p, q, 1, horizon);
    const std::size_t sep_index = *first_difference(z1.stream, z1.stream.shifted(1));

    const std::vector<std::size_t> schedule = horizon_schedule_within(horizon);
    StagePlan plan = plan_stages(schedule, gap, sep_index, gap);

    const std::string tag = "dc1-pair|N=" + std::to_string(z1.block_len) +
                            "|far1=" + std::to_string(plan.far1_end) +
                            "|close=" + std::to_string(plan.close_end) +
                            "|far=" + std::to_string(plan.far_start);

    auto far_blocks = [&](std::size_t phase) {
        std::vector<PasteBlock> blocks;
        if (plan.far1_end > 0)
            blocks.push_back(
                PasteBlock{0, z1.stream.window.slice(phase, phase + plan.far1_end - gap)});
        blocks.push_back(PasteBlock{plan.far_start,
                                    z1.stream.window.slice(phase, phase + horizon -
                                                                      plan.far_start)});
        return blocks;
    };

    DC1Pair pair;
    {
        std::vector<PasteBlock> xb = far_blocks(0);
        xb.push_back(PasteBlock{plan.far1_end,
                                Word::repeated(0, plan.far_start - gap - plan.far1_end)});
        pair.x = assemble_stream(shift, xb, horizon, tag + "|x");
    }
    pair.y = assemble_follower(shift, far_blocks(1), pair.x, plan.far1_end, plan.far_start,
                               horizon, tag + "|y");

    DistanceSeries d = DistanceSeries::between(pair.x, pair.y);
    double far_sep = 2.0;
    for (std::size_t i = plan.far_start; i + sep_index + 1 < d.size(); ++i)
        far_sep = std::min(far_sep, d.values[i]);
    if (!(far_sep > 0.0))
        throw StructureError("DC1 far stage failed the separation scan");
    pair.epsilon = half_dyadic(far_sep);
    if (pair.epsilon < std::ldexp(1.0, -int(kThresholdDepth)))
        throw StructureError("DC1 separation too weak for the default threshold grid");
    pair.far1_end = plan.far1_end;
    pair.close_end = plan.close_end;
    pair.far_start = plan.far_start;
    pair.far_separation = far_sep;
    return pair;
}

InvariantSample build_invariant_sample(const SoficShift& shift, std::size_t count,
                                       std::size_t horizon, unsigned shift_depth) {
    if (count < 2) throw ParameterError("invariant sample needs count >= 2");
    if (horizon < 1024) throw ParameterError("build_invariant_sample needs horizon >= 1024");
    if (!shift.is_mixing()) throw StructureError("shift must be mixing");
    require_zero_loop(shift);

    const std::size_t gap = shift.specification_gap();
    const std::size_t offsets_spread = (count - 1) * (shift_depth + 1) + shift_depth;
    SymbolStream p = SymbolStream::constant(shift.alphabet_size(), 0, horizon, "0^inf");
    SymbolStream q = pick_opposing_stream(shift, p, horizon);
    const std::size_t first_pq = *first_difference(p, q);
    const std::size_t block_len =
        std::max<std::size_t>({gap, (offsets_spread + 2) / 2, first_pq + 1});

    SymbolStream pattern = build_alternating(shift, p, q, block_len, horizon,
                                             "invariant-pattern|N=" +
                                                 std::to_string(block_len));

    const std::vector<std::size_t> schedule = horizon_schedule_within(horizon);
    StagePlan plan = plan_stages(schedule, gap, 2 * block_len + shift_depth + 1,
                                 gap + 2 * shift_depth);
    if (offsets_spread >= plan.far_start)
        throw ParameterError("horizon too small for the requested sample size");

    InvariantSample sample;
    sample.shift_depth = shift_depth;
    sample.block_len = block_len;
    sample.far1_end = plan.far1_end;
    sample.close_end = plan.close_end;
    sample.far_start = plan.far_start;

    auto far_blocks = [&](std::size_t phase) {
        std::vector<PasteBlock> blocks;
        if (plan.far1_end > 0)
            blocks.push_back(PasteBlock{
                0, pattern.window.slice(phase, phase + plan.far1_end - gap)});
        blocks.push_back(
            PasteBlock{plan.far_start,
                       pattern.window.slice(phase, phase + horizon - plan.far_start)});
        return blocks;
    };

    for (std::size_t a = 0; a < count; ++a) {
        const std::size_t phase = a * (shift_depth + 1);
        const std::string tag = "invariant-sample|a=" + std::to_string(a) +
                                "|phase=" + std::to_string(phase);
        if (a == 0) {
            std::vector<PasteBlock> blocks = far_blocks(phase);
            blocks.push_back(PasteBlock{
                plan.far1_end, Word::repeated(0, plan.far_start - gap - plan.far1_end)});
            sample.points.push_back(assemble_stream(shift, blocks, horizon, tag));
        } else {
            sample.points.push_back(assemble_follower(shift, far_blocks(phase),
                                                      sample.points[0], plan.far1_end,
                                                      plan.far_start, horizon, tag));
        }
    }

    // Measured minimum far-stage distance over every pair the sample promises,
    // shifted self-pairs included.
    double far_sep = 2.0;
    const std::size_t scan_end =
        horizon - shift_depth - 2 * block_len - 2;
    auto scan_pair = [&](const SymbolStream& u, const SymbolStream& v) {
        DistanceSeries d = DistanceSeries::between(u, v);
        for (std::size_t i = plan.far_start; i < std::min(scan_end, d.size()); ++i)
            far_sep = std::min(far_sep, d.values[i]);
    };
    for (std::size_t a = 0; a < count; ++a)
        for (std::size_t b = a; b < count; ++b)
            for (unsigned j = 0; j <= shift_depth; ++j)
                for (unsigned k = 0; k <= shift_depth; ++k) {
                    if (a == b && j >= k) continue;
                    scan_pair(sample.points[a].shifted(j), sample.points[b].shifted(k));
                }
    if (!(far_sep > 0.0))
        throw StructureError("invariant sample failed the separation scan");
    sample.epsilon = half_dyadic(far_sep);
    if (sample.epsilon < std::ldexp(1.0, -int(kThresholdDepth)))
        throw StructureError("invariant sample separation too weak for the threshold grid");
    return sample;
}

}  // namespace chaoskit
