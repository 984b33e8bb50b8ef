#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "chaoskit/ode.hpp"

using namespace chaoskit;

namespace {

// Samples that keep |z| small enough to survive the tested time spans.
struct SampleSet {
    std::vector<double> sigma, s, t;
    std::vector<Complex> z;
};

SampleSet make_samples(std::size_t count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    SampleSet set;
    const double T = ProcessParams().period();
    for (std::size_t i = 0; i < count; ++i) {
        set.sigma.push_back(unif(rng) * T);
        set.s.push_back(unif(rng) * 3.0);
        set.t.push_back(unif(rng) * 3.0);
        const double r = 0.25 * std::sqrt(unif(rng));
        const double a = 2.0 * std::numbers::pi * unif(rng);
        set.z.push_back(Complex(r * std::cos(a), r * std::sin(a)));
    }
    return set;
}

}  // namespace

TEST_CASE("vector field values and symmetry") {
    ProcessParams p(0.037, 0.001);
    CHECK(vector_field(0.7, Complex(0, 0), p) == Complex(-0.001, 0.0));
    CHECK(vector_field(0.0, Complex(1, 0), p) == Complex(2.0 - 0.001, 0.0));

    ProcessParams p0(0.037, 0.0);
    CHECK(vector_field(3.1, Complex(0, 0), p0) == Complex(0.0, 0.0));

    CubeRootFrame frame(p);
    CHECK(frame.m_scale == doctest::Approx(0.1).epsilon(1e-12));
    for (int k = 0; k < 3; ++k) {
        CHECK(std::abs(frame.roots[k]) == doctest::Approx(1.0).epsilon(1e-14));
        const Complex cube = frame.roots[k] * frame.roots[k] * frame.roots[k];
        CHECK(std::abs(cube - 1.0) < 1e-14);
    }

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (int rep = 0; rep < 200; ++rep) {
        const double t = 100.0 * unif(rng);
        const Complex z(unif(rng), unif(rng));
        const Complex v = vector_field(t, z, p);
        for (int k = 1; k < 3; ++k) {
            const Complex vr = vector_field(t, frame.roots[k] * z, p);
            CHECK(std::abs(vr - v) <= 1e-13 * (1.0 + std::abs(v)));
        }
    }
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(ProcessParams(0.05, 0.001), ParameterError);
    CHECK_THROWS_AS(ProcessParams(0.037, 0.01), ParameterError);
    CHECK_THROWS_AS(ProcessParams(-1.0, 0.0), ParameterError);
    CHECK_NOTHROW(ProcessParams(0.05, 0.002, true));
    CHECK(ProcessParams(0.037, 0.0).period() ==
          doctest::Approx(2.0 * std::numbers::pi / 0.037).epsilon(1e-15));
}

TEST_CASE("flow identity and process axioms") {
    ProcessParams p(0.037, 0.001);
    FlowOptions opts;
    const SampleSet set = make_samples(100, 21);
    const double T = p.period();

    for (std::size_t i = 0; i < set.z.size(); ++i) {
        // (ii): zero-time flow is the identity, exactly.
        CHECK(flow(set.sigma[i], 0.0, set.z[i], p, opts) == set.z[i]);

        // (iii): composition law within 10 * tol.
        const Complex direct = flow(set.sigma[i], set.s[i] + set.t[i], set.z[i], p, opts);
        const Complex mid = flow(set.sigma[i], set.s[i], set.z[i], p, opts);
        const Complex composed = flow(set.sigma[i] + set.s[i], set.t[i], mid, p, opts);
        CHECK(std::abs(direct - composed) <= 10.0 * opts.tol);

        // T-periodicity of the process.
        const Complex shifted = flow(set.sigma[i] + T, set.t[i], set.z[i], p, opts);
        const Complex plain = flow(set.sigma[i], set.t[i], set.z[i], p, opts);
        CHECK(std::abs(shifted - plain) <= 10.0 * opts.tol);
    }
}

TEST_CASE("composition defect scales linearly in the tolerance") {
    // Sampled where the error control binds (field strong enough that the
    // step cap is not the limiter), with spans short enough to stay inside
    // the bailout radius.
    ProcessParams p(0.037, 0.001);
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<double> sigma, s, t;
    std::vector<Complex> z;
    while (z.size() < 100) {
        const double si = unif(rng) * p.period();
        const double a = unif(rng) * 1.0, b = unif(rng) * 1.0;
        const double r = 0.4 + 0.4 * unif(rng);
        const double ang = 2.0 * std::numbers::pi * unif(rng);
        const Complex zi(r * std::cos(ang), r * std::sin(ang));
        try {
            FlowOptions probe;
            probe.tol = 1e-7;
            flow(si, a + b, zi, p, probe);
        } catch (const EscapeError&) {
            continue;
        }
        sigma.push_back(si);
        s.push_back(a);
        t.push_back(b);
        z.push_back(zi);
    }
    auto mean_defect = [&](double tol) {
        FlowOptions opts;
        opts.tol = tol;
        double sum = 0.0;
        for (std::size_t i = 0; i < z.size(); ++i) {
            const Complex direct = flow(sigma[i], s[i] + t[i], z[i], p, opts);
            const Complex mid = flow(sigma[i], s[i], z[i], p, opts);
            const Complex composed = flow(sigma[i] + s[i], t[i], mid, p, opts);
            sum += std::abs(direct - composed);
        }
        return sum / static_cast<double>(z.size());
    };
    const double coarse = mean_defect(1e-7);
    const double fine = mean_defect(5e-8);
    CHECK(fine <= 0.5 * coarse);
}

TEST_CASE("poincare map basics") {
    ProcessParams p0(0.037, 0.0);
    CHECK(poincare(Complex(0, 0), p0) == Complex(0, 0));

    // Deep-interior start at N = 0: the cubic field needs ~1/(2|z|^2) time
    // units to expel it, far beyond two periods.
    FlowOptions opts;
    const Complex z0 = 0.02 * Complex(std::cos(std::numbers::pi / 4),
                                      std::sin(std::numbers::pi / 4));
    const Complex twice = poincare(poincare(z0, p0, opts), p0, opts);
    const Complex direct = flow(0.0, 2.0 * p0.period(), z0, p0, opts);
    CHECK(std::abs(twice - direct) <= 20.0 * opts.tol);
}

TEST_CASE("escape raises past the bailout radius") {
    ProcessParams p(0.037, 0.001);
    CHECK_THROWS_AS(flow(0.0, 5.0, Complex(3.0, 0.0), p), EscapeError);
}

TEST_CASE("periodic solutions for N = 0.001") {
    ProcessParams p(0.037, 0.001);
    auto sols = find_periodic_solutions(p);
    REQUIRE(sols.size() == 3);
    CubeRootFrame frame(p);
    const double bound = 0.004 * std::sqrt(2.0) * frame.m_scale * (1.0 + 1e-3);
    for (const auto& sol : sols) {
        CHECK(sol.residual <= 1e-9);
        CHECK(sol.max_center_distance <= bound);
        CHECK(std::abs(sol.point - frame.center(sol.sector)) <= bound);
    }
    // The three roots sit in distinct cube-root sectors, at least M apart.
    for (int a = 0; a < 3; ++a)
        for (int b = a + 1; b < 3; ++b)
            CHECK(std::abs(sols[a].point - sols[b].point) >= frame.m_scale);
}

TEST_CASE("periodic solution for N = 0") {
    ProcessParams p(0.037, 0.0);
    auto sols = find_periodic_solutions(p);
    REQUIRE(sols.size() == 1);
    CHECK(std::abs(sols[0].point) <= 1e-12);
    CHECK(sols[0].residual <= 1e-12);
}
