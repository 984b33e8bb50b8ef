#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "chaoskit/chaos_stats.hpp"

using namespace chaoskit;

namespace {

SymbolStream random_stream(std::mt19937_64& rng, std::size_t len) {
    std::uniform_int_distribution<int> bit(0, 1);
    std::vector<Symbol> s(len);
    for (auto& c : s) c = static_cast<Symbol>(bit(rng));
    return SymbolStream(2, Word(std::move(s)), "rand");
}

}  // namespace

TEST_CASE("phi_n counts strict closeness") {
    DistanceSeries zero(std::vector<double>(10, 0.0));
    CHECK(phi_n(zero, 0.1) == 1.0);
    CHECK(phi_n(zero, 100.0) == 1.0);

    DistanceSeries ones(std::vector<double>(10, 1.0));
    CHECK(phi_n(ones, 0.5) == 0.0);
    CHECK(phi_n(ones, 1.5) == 1.0);
    CHECK(phi_n(ones, 1.0) == 0.0);  // strict inequality

    std::vector<double> alternating;
    for (int i = 0; i < 12; ++i) alternating.push_back(i % 2 == 0 ? 1.0 : 0.5);
    CHECK(phi_n(DistanceSeries(alternating), 0.6) == 0.5);

    CHECK_THROWS_AS(phi_n(DistanceSeries(std::vector<double>{}), 0.5), DimensionError);
    CHECK_THROWS_AS(phi_n(zero, 0.0), ParameterError);
    CHECK_THROWS_AS(DistanceSeries(std::vector<double>{-1.0}), ParameterError);
}

TEST_CASE("density estimates") {
    std::vector<std::size_t> schedule;
    for (unsigned k = 1; k <= 16; ++k) schedule.push_back(std::size_t(1) << k);
    const std::size_t n = schedule.back();

    std::vector<bool> evens(n);
    for (std::size_t i = 0; i < n; ++i) evens[i] = (i % 2 == 0);
    CHECK(upper_density(evens, schedule) == 0.5);
    CHECK(lower_density(evens, schedule) == 0.5);

    std::vector<bool> empty_set(n, false);
    CHECK(upper_density(empty_set, schedule) == 0.0);
    CHECK(lower_density(empty_set, schedule) == 0.0);

    // A = union of [2^{2k}, 2^{2k+1}): true densities 2/3 and 1/3.
    std::vector<bool> blocks(n, false);
    for (unsigned k = 0; 2 * k + 1 <= 16; ++k)
        for (std::size_t i = std::size_t(1) << (2 * k);
             i < (std::size_t(1) << (2 * k + 1)) && i < n; ++i)
            blocks[i] = true;
    // Closed-form prefix counts at the schedule points as the oracle.
    for (std::size_t idx = 0; idx < schedule.size(); ++idx) {
        std::size_t count = 0;
        for (std::size_t i = 0; i < schedule[idx]; ++i) count += blocks[i];
        std::size_t expected = 0;
        for (unsigned k = 0; (std::size_t(1) << (2 * k)) < schedule[idx]; ++k) {
            const std::size_t b_lo = std::size_t(1) << (2 * k);
            const std::size_t b_hi =
                std::min(schedule[idx], std::size_t(1) << (2 * k + 1));
            if (b_hi > b_lo) expected += b_hi - b_lo;
        }
        CHECK(count == expected);
    }
    CHECK(upper_density(blocks, schedule) >= 0.6);
    CHECK(lower_density(blocks, schedule) <= 0.4);

    CHECK_THROWS_AS(upper_density(evens, std::vector<std::size_t>{n + 1}),
                    DimensionError);
}

TEST_CASE("profile monotone in threshold and symmetric in the pair") {
    std::mt19937_64 rng(11);
    const auto thresholds = dyadic_thresholds(10);
    const std::vector<std::size_t> schedule{4, 16, 64, 256};
    for (int rep = 0; rep < 50; ++rep) {
        auto x = random_stream(rng, 300), y = random_stream(rng, 300);
        auto pxy = DCProfile::compute(DistanceSeries::between(x, y), thresholds, schedule);
        auto pyx = DCProfile::compute(DistanceSeries::between(y, x), thresholds, schedule);
        CHECK(pxy.phi_at == pyx.phi_at);
        for (std::size_t si = 0; si < pxy.schedule.size(); ++si)
            for (std::size_t ti = 0; ti + 1 < pxy.thresholds.size(); ++ti)
                CHECK(pxy.phi_at[ti][si] <= pxy.phi_at[ti + 1][si]);
        for (std::size_t ti = 0; ti < pxy.thresholds.size(); ++ti)
            CHECK(pxy.phi_lower_est[ti] <= pxy.phi_upper_est[ti]);
    }
}

TEST_CASE("shift-metric profiles are dyadic step functions") {
    // Phi^(n)(t) is constant for t in (2^-k, 2^-k+1]: sampling inside the
    // interval equals sampling just above the grid point.
    std::mt19937_64 rng(13);
    for (int rep = 0; rep < 30; ++rep) {
        auto x = random_stream(rng, 200), y = random_stream(rng, 200);
        DistanceSeries d = DistanceSeries::between(x, y);
        for (int k = 1; k <= 8; ++k) {
            const double inside = phi_n(d, 1.5 * std::ldexp(1.0, -k));
            const double just_above = std::nextafter(std::ldexp(1.0, -k), 1.0);
            CHECK(phi_n(d, just_above) == inside);
            CHECK(phi_n(d, std::ldexp(1.0, -k + 1)) == inside);
        }
    }
}

TEST_CASE("classify_dc1 basics") {
    const auto thresholds = dyadic_thresholds(10);
    const std::vector<std::size_t> schedule{4, 16, 64, 256, 1024};

    // Identical orbits: proximal holds, distal cannot.
    SymbolStream x = SymbolStream::constant(2, 0, 1200, "zeros");
    auto v_same = classify_dc1(x, x, 0.5, thresholds, schedule, 0.05);
    CHECK_FALSE(v_same.is_dc1_empirical);
    CHECK(v_same.distal.value == 1.0);

    // Constant distance 1: distal holds at eps=0.5, proximal fails.
    SymbolStream y = SymbolStream::constant(2, 1, 1200, "ones");
    auto v_far = classify_dc1(x, y, 0.5, thresholds, schedule, 0.05);
    CHECK_FALSE(v_far.is_dc1_empirical);
    CHECK(v_far.distal.value == 0.0);
    CHECK(v_far.proximal.value == 0.0);

    CHECK_THROWS_AS(classify_dc1(x, y, 0.5, thresholds, schedule, 0.7), ParameterError);
    CHECK_THROWS_AS(classify_dc1(x, y, 0.3, thresholds, schedule, 0.05), ParameterError);
    CHECK_THROWS_AS(
        classify_dc1(x, y, 0.5, thresholds, std::vector<std::size_t>{4000}, 0.05),
        DimensionError);
}

TEST_CASE("classify_dc1 ignores threshold order") {
    std::mt19937_64 rng(17);
    auto x = random_stream(rng, 2000), y = random_stream(rng, 2000);
    auto thresholds = dyadic_thresholds(6);
    const std::vector<std::size_t> schedule{8, 64, 512};
    auto v1 = classify_dc1(x, y, 0.25, thresholds, schedule, 0.05);
    std::shuffle(thresholds.begin(), thresholds.end(), rng);
    auto v2 = classify_dc1(x, y, 0.25, thresholds, schedule, 0.05);
    CHECK(v1.is_dc1_empirical == v2.is_dc1_empirical);
    CHECK(v1.proximal.threshold == v2.proximal.threshold);
    CHECK(v1.distal.value == v2.distal.value);
}

TEST_CASE("csv exports carry the schemas") {
    std::mt19937_64 rng(19);
    auto x = random_stream(rng, 300), y = random_stream(rng, 300);
    auto profile = DCProfile::compute(DistanceSeries::between(x, y),
                                      dyadic_thresholds(3), {8, 64});
    std::ostringstream pcsv;
    profile.write_csv(pcsv);
    CHECK(pcsv.str().rfind("threshold,horizon,phi_n\n", 0) == 0);

    auto verdict = classify_dc1(x, y, 0.5, dyadic_thresholds(3), {8, 64}, 0.05);
    std::ostringstream vcsv;
    verdict.write_csv(vcsv);
    CHECK(vcsv.str().rfind("epsilon,is_dc1,witness_t,witness_n,value\n", 0) == 0);
}

TEST_CASE("schedule helpers") {
    const auto sched = horizon_schedule(5);
    CHECK(sched == std::vector<std::size_t>{3, 6, 11, 20, 37});
    CHECK(horizon_schedule_within(262162).back() == 262162);
    CHECK(horizon_schedule_within(262161).back() == 131089);
    CHECK_THROWS_AS(horizon_schedule_within(2), ParameterError);
}

TEST_CASE("threshold grids") {
    const auto dyadic = dyadic_thresholds(3);
    CHECK(dyadic == std::vector<double>{0.125, 0.25, 0.5, 1.0});

    const auto ode = ode_default_thresholds();
    CHECK(ode.size() == 12);
    CHECK(ode.front() == 1e-3);
    CHECK(ode.back() == doctest::Approx(3.0 / std::cos(std::numbers::pi / 8)).epsilon(1e-12));
    for (std::size_t i = 0; i + 1 < ode.size(); ++i) CHECK(ode[i] < ode[i + 1]);

    CHECK_THROWS_AS(log_thresholds(0.0, 1.0, 5), ParameterError);
    CHECK_THROWS_AS(log_thresholds(1e-3, 1.0, 1), ParameterError);
}
