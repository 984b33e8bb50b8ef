#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "chaoskit/chaos_stats.hpp"
#include "chaoskit/scrambled.hpp"

using namespace chaoskit;

namespace {

SymbolStream zeros(unsigned alphabet, std::size_t h) {
    return SymbolStream::constant(alphabet, 0, h, "0^inf");
}

SymbolStream ones(unsigned alphabet, std::size_t h) {
    return SymbolStream::constant(alphabet, 1, h, "1^inf");
}

// Direct check of the Q_m^n agreement conditions on the materialized windows.
bool traces_within(const SymbolStream& a, std::size_t a_from, const SymbolStream& b,
                   std::size_t b_from, std::size_t count, unsigned depth) {
    for (std::size_t i = 0; i < count; ++i)
        for (unsigned j = 0; j < depth; ++j)
            if (a.at(a_from + i + j) != b.at(b_from + i + j)) return false;
    return true;
}

}  // namespace

TEST_CASE("trace_spec_point plants the blocks") {
    const SoficShift full2 = full_shift(2);
    TraceSpec spec({{Word::parse("11"), 0}, {Word::parse("00"), 3}}, 1);
    SymbolStream z = trace_spec_point(full2, spec, 16);
    CHECK(full2.stream_allowed(z));
    CHECK(z.window.slice(0, 2) == Word::parse("11"));
    CHECK(z.window.slice(3, 5) == Word::parse("00"));

    const SoficShift pi = build_pi_shift();
    const std::size_t g = pi.specification_gap() + 1;
    TraceSpec pspec({{Word::parse("1"), 0}, {Word::parse("3"), g}}, g - 1);
    SymbolStream zp = trace_spec_point(pi, pspec, 32);
    CHECK(pi.stream_allowed(zp));
    CHECK(zp.at(0) == 1);
    CHECK(zp.at(g) == 3);

    // Gap below the specification gap is a precondition violation.
    CHECK_THROWS_AS(
        trace_spec_point(pi, TraceSpec({{Word::parse("1"), 0}, {Word::parse("3"), 2}}, 2),
                         32),
        ParameterError);
    // Blocks violating their own declared gap never construct.
    CHECK_THROWS_AS(TraceSpec({{Word::parse("11"), 0}, {Word::parse("00"), 2}}, 1),
                    ParameterError);
}

TEST_CASE("build_z_n separation on the full 2-shift") {
    const SoficShift full2 = full_shift(2);
    ZnResult z1 = build_z_n(full2, zeros(2, 4096), ones(2, 4096), 1, 4096);
    CHECK(z1.block_len == 1);
    CHECK(z1.separation >= std::ldexp(1.0, -int(z1.block_len)));
    CHECK(z1.separation == 1.0);  // 0101... against 1010... differs at once
    CHECK(full2.stream_allowed(z1.stream));

    // n already a multiple of the base: block length stays n.
    ZnResult z4 = build_z_n(full2, zeros(2, 4096), ones(2, 4096), 4, 4096);
    CHECK(z4.block_len == 4);

    CHECK_THROWS_AS(build_z_n(full2, zeros(2, 64), zeros(2, 64), 1, 64), ParameterError);
}

TEST_CASE("build_z_n on the pi shift") {
    const SoficShift pi = build_pi_shift();
    ZnResult z1 = build_z_n(pi, zeros(5, 4096), ones(5, 4096), 1, 4096);
    CHECK(z1.block_len == 3);  // specification gap of Pi
    CHECK(pi.stream_allowed(z1.stream));
    CHECK(z1.separation == std::ldexp(1.0, -2));  // boundaries every 3 symbols

    // Direct scan oracle over the materialized window.
    DistanceSeries d = DistanceSeries::between(z1.stream, z1.stream.shifted(1));
    double lowest = 2.0;
    for (std::size_t i = 0; i + 64 < d.size(); ++i) lowest = std::min(lowest, d.values[i]);
    CHECK(lowest == z1.separation);
}

TEST_CASE("distal family is uniformly separated and allowed") {
    const SoficShift pi = build_pi_shift();
    DistalFamily fam = build_distal_family(pi, 8, 1 << 14);
    CHECK(fam.eps > 0.0);
    CHECK(fam.eps >= std::ldexp(1.0, -int(2 * 3)));  // >= 2^-(2*gap)
    for (const auto& [n, z] : fam.members) {
        CAPTURE(n);
        CHECK(pi.stream_allowed(z.stream));
        CHECK(z.separation >= fam.eps);
        // Invariant by direct scan away from the truncated tail.
        DistanceSeries d = DistanceSeries::between(z.stream, z.stream.shifted(n));
        const std::size_t margin = 4 * z.block_len + 8;
        for (std::size_t i = 0; i + margin < d.size(); ++i) {
            if (d.values[i] < fam.eps) {
                CAPTURE(i);
                CHECK(d.values[i] >= fam.eps);
                break;
            }
        }
    }
    // n = 1 member equals the direct construction.
    ZnResult direct = build_z_n(pi, fam.base_p, ones(5, 1 << 14), 1, 1 << 14);
    CHECK(fam.members.at(1).stream.window == direct.stream.window);
}

TEST_CASE("q witness realizes both trace conditions") {
    const SoficShift full2 = full_shift(2);
    const std::size_t h = 1 << 17;
    DistalFamily fam = build_distal_family(full2, 2, h);

    SUBCASE("m=1, n=0 reduces to a single fixed-point block") {
        QWitness w = build_q_witness(full2, fam, zeros(2, h), ones(2, h), 1, 0, h);
        CHECK(w.l == w.s);
        CHECK(full2.stream_allowed(w.x));
        CHECK(full2.stream_allowed(w.y));
        const std::size_t span = (std::size_t(1) << w.s) + 1;
        CHECK(traces_within(w.x, w.s, fam.base_p, w.s, span, w.trace_depth));
        CHECK(traces_within(w.y, w.s, fam.base_p, w.s, span, w.trace_depth));
    }

    SUBCASE("m=2, n=1 with x = y still yields a distinguishable pair") {
        const SymbolStream seed = zeros(2, h);
        const std::size_t need = q_witness_min_horizon(full2, 2, 1);
        CHECK(need <= h);
        QWitness w = build_q_witness(full2, fam, seed, seed, 2, 1, h);
        const SymbolStream& zn = fam.members.at(1).stream;
        const std::size_t span_s = (std::size_t(1) << w.s) + 1;
        const std::size_t span_l = (std::size_t(1) << w.l) + 1;
        // Condition (2): x traces z_n at s; y traces it shifted by n.
        CHECK(traces_within(w.x, w.s, zn, w.s, span_s, w.trace_depth));
        CHECK(traces_within(w.y, w.s + 1, zn, w.s, span_s, w.trace_depth));
        // Condition (1): x shifted by n at l; y direct at l.
        CHECK(traces_within(w.x, w.l + 1, zn, w.l, span_l, w.trace_depth));
        CHECK(traces_within(w.y, w.l, zn, w.l, span_l, w.trace_depth));
        CHECK(w.x.window != w.y.window);
        // Prefix preservation.
        for (std::size_t i = 0; i < w.x_prefix_len; ++i) CHECK(w.x.at(i) == seed.at(i));
        for (std::size_t i = 0; i < w.y_prefix_len; ++i) CHECK(w.y.at(i) == seed.at(i));
    }

    SUBCASE("m=1, n=1 on the pi shift") {
        const SoficShift pi = build_pi_shift();
        const std::size_t hp = 1 << 13;
        DistalFamily pfam = build_distal_family(pi, 1, hp);
        QWitness w = build_q_witness(pi, pfam, zeros(5, hp), ones(5, hp), 1, 1, hp);
        CHECK(pi.stream_allowed(w.x));
        CHECK(pi.stream_allowed(w.y));
        const SymbolStream& zn = pfam.members.at(1).stream;
        const std::size_t span_s = (std::size_t(1) << w.s) + 1;
        const std::size_t span_l = (std::size_t(1) << w.l) + 1;
        CHECK(traces_within(w.x, w.s, zn, w.s, span_s, w.trace_depth));
        CHECK(traces_within(w.y, w.s + 1, zn, w.s, span_s, w.trace_depth));
        CHECK(traces_within(w.x, w.l + 1, zn, w.l, span_l, w.trace_depth));
        CHECK(traces_within(w.y, w.l, zn, w.l, span_l, w.trace_depth));
    }

    SUBCASE("insufficient horizon reports the minimal one") {
        const std::size_t need = q_witness_min_horizon(full2, 1, 0);
        CHECK(need > 4);
        try {
            build_q_witness(full2, fam, zeros(2, 8), ones(2, 8), 1, 0, 4);
            FAIL("expected ParameterError");
        } catch (const ParameterError& e) {
            CHECK(std::string(e.what()).find(std::to_string(need)) != std::string::npos);
        }
    }
}

TEST_CASE("dc1 pair on the full 2-shift") {
    const SoficShift full2 = full_shift(2);
    const std::size_t h = horizon_schedule(14).back();
    DC1Pair pair = build_dc1_pair(full2, h);
    CHECK(pair.epsilon == 0.5);
    CHECK(full2.stream_allowed(pair.x));
    CHECK(full2.stream_allowed(pair.y));

    auto verdict = classify_dc1(pair.x, pair.y, pair.epsilon, dyadic_thresholds(10),
                                horizon_schedule_within(h), 0.05);
    CHECK(verdict.is_dc1_empirical);

    // Determinism: rebuilding yields identical windows.
    DC1Pair again = build_dc1_pair(full2, h);
    CHECK(again.x.window == pair.x.window);
    CHECK(again.y.window == pair.y.window);
}

TEST_CASE("dc1 pair on pi, and shift invariance of the verdict") {
    const SoficShift pi = build_pi_shift();
    const std::size_t h = horizon_schedule(14).back() + 2;
    DC1Pair pair = build_dc1_pair(pi, h);
    CHECK(pair.epsilon == 0.125);
    CHECK(pi.stream_allowed(pair.x));
    CHECK(pi.stream_allowed(pair.y));

    const auto thresholds = dyadic_thresholds(10);
    const auto schedule = horizon_schedule_within(h - 1);
    auto verdict = classify_dc1(pair.x.truncated(h - 1), pair.y.truncated(h - 1),
                                pair.epsilon, thresholds, schedule, 0.05);
    CHECK(verdict.is_dc1_empirical);

    auto shifted = classify_dc1(pair.x.shifted(1), pair.y.shifted(1), pair.epsilon,
                                thresholds, schedule, 0.05);
    CHECK(shifted.is_dc1_empirical);

    CHECK_THROWS_AS(build_dc1_pair(pi, 512), ParameterError);
    // No 0 self-loop: the golden-mean-like shift on {0,1} with 0->1 only.
    Presentation no_zero_loop(2, {Edge{0, 1, 0}, Edge{1, 0, 1}, Edge{1, 1, 1}});
    CHECK_THROWS_AS(build_dc1_pair(SoficShift(std::move(no_zero_loop), 2), 2048),
                    StructureError);
}

TEST_CASE("dc1 pair at the minimal admissible horizon") {
    const SoficShift pi = build_pi_shift();
    DC1Pair pair = build_dc1_pair(pi, 1024);
    auto verdict = classify_dc1(pair.x, pair.y, pair.epsilon, dyadic_thresholds(10),
                                horizon_schedule_within(1024), 0.05);
    CHECK(verdict.is_dc1_empirical);
}

TEST_CASE("invariant sample: pairs and shifted pairs settle DC1") {
    const SoficShift pi = build_pi_shift();
    const unsigned depth = 3;
    const std::size_t h = horizon_schedule(14).back() + depth + 1;
    InvariantSample sample = build_invariant_sample(pi, 4, h, depth);
    CHECK(sample.points.size() == 4);
    for (const auto& s : sample.points) CHECK(pi.stream_allowed(s));

    const auto thresholds = dyadic_thresholds(10);
    const std::size_t usable = h - depth;
    const auto schedule = horizon_schedule_within(usable);
    for (std::size_t a = 0; a < sample.points.size(); ++a)
        for (std::size_t b = a; b < sample.points.size(); ++b)
            for (unsigned j = 0; j <= depth; ++j)
                for (unsigned k = 0; k <= depth; ++k) {
                    if (a == b && j >= k) continue;
                    auto u = sample.points[a].shifted(j).truncated(usable);
                    auto v = sample.points[b].shifted(k).truncated(usable);
                    auto verdict =
                        classify_dc1(u, v, sample.epsilon, thresholds, schedule, 0.05);
                    INFO("a=", a, " b=", b, " j=", j, " k=", k);
                    CHECK(verdict.is_dc1_empirical);
                }

    CHECK_THROWS_AS(build_invariant_sample(pi, 1, h, depth), ParameterError);
}
