#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "chaoskit/segments.hpp"

using namespace chaoskit;

namespace {

constexpr double kPi = std::numbers::pi;

Complex polar(double r, double angle) {
    return Complex(r * std::cos(angle), r * std::sin(angle));
}

}  // namespace

TEST_CASE("octagon membership and nesting") {
    Octagon small(1.0), big(1.3);
    CHECK(small.contains(Complex(0, 0)));
    CHECK(small.contains(Complex(1.0, 0)));          // face point
    CHECK_FALSE(small.contains(Complex(1.0 + 1e-12, 0)));
    CHECK(small.contains(small.vertex(3)));          // corners belong

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    for (int rep = 0; rep < 2000; ++rep) {
        const Complex z(unif(rng), unif(rng));
        if (small.contains(z)) CHECK(big.contains(z));
        // Eight-fold symmetry of membership.
        CHECK(small.contains(z) == small.contains(z * polar(1.0, kPi / 4)));
    }

    // Exterior distance: zero inside, exact on the face axis.
    CHECK(small.exterior_distance(Complex(0.2, 0.1)) == 0.0);
    CHECK(small.exterior_distance(Complex(1.5, 0.0)) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK_THROWS_AS(Octagon(0.0), ParameterError);
}

TEST_CASE("profile values and the kappa = 0.3 degeneracy") {
    ProcessParams p(0.037, 0.001);
    SProfile prof(p.period());
    CHECK(prof.value(0.0) == 1.5);
    CHECK(prof.value(prof.period) == 1.5);
    CHECK(prof.value(prof.delta) == doctest::Approx(0.568).epsilon(1e-15));
    CHECK(prof.value(prof.period / 2) == 0.568);
    CHECK(prof.rate(1.0) == doctest::Approx(-(1.5 - 0.568) / 10.6));
    CHECK(prof.rate(prof.period / 2) == 0.0);
    CHECK(prof.rate(prof.period - 1.0) == doctest::Approx((1.5 - 0.568) / 10.6));

    // Continuity at the ramp joints.
    for (double t : {prof.delta, prof.period - prof.delta})
        CHECK(prof.value(t - 1e-9) == doctest::Approx(prof.value(t + 1e-9)).epsilon(1e-6));

    // kappa = 0.3 gives T/2 < delta: the profile cannot exist.
    CHECK_THROWS_AS(SProfile(2.0 * kPi / 0.3), ParameterError);
}

TEST_CASE("segment membership examples") {
    ProcessParams p(0.037, 0.001);
    const Segment w = Segment::make_w(p);
    const Segment u = Segment::make_u(p);

    CHECK(w.contains(0.3 * p.period(), Complex(0, 0)));
    CHECK_FALSE(w.contains(0.0, Complex(2.0, 0)));

    // At t = delta the plateau radius is 0.568 < 0.6.
    CHECK_FALSE(u.contains(u.profile.delta, Complex(0.6, 0)));
    CHECK(u.contains(0.0, Complex(0.6, 0)));  // U_0 = B(R) is wide

    const Segment v = Segment::make_v(0.568, p);
    CHECK(v.contains(123.0, Complex(0.5, 0)));
    CHECK_FALSE(v.contains(123.0, Complex(0.6, 0)));

    const Segment e0 = Segment::make_e(0, 0.004 * 0.1, p);
    CHECK(e0.contains(11.0, Complex(0.1, 0)));
    CHECK(e0.contains(11.0, Complex(0.1 + 0.00039, 0.00039)));
    CHECK_FALSE(e0.contains(11.0, Complex(0.1 + 0.00041, 0)));
    CHECK_THROWS_AS(Segment::make_e(0, 0.01, ProcessParams(0.037, 0.0)), ParameterError);
}

TEST_CASE("W is T-periodic: quarter-turn rotation maps the section to itself") {
    ProcessParams p(0.037, 0.001);
    const Segment w = Segment::make_w(p);
    const double T = p.period();
    CHECK(p.kappa * T / 4.0 == doctest::Approx(kPi / 2).epsilon(1e-14));
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> unif(-1.8, 1.8);
    for (int rep = 0; rep < 2000; ++rep) {
        const Complex z(unif(rng), unif(rng));
        CHECK(w.contains(0.0, z) == w.contains(T, z));
        const double t = 0.25 * T * unif(rng);
        CHECK(w.contains(t, z) == w.contains(t + T, z));
    }
}

TEST_CASE("boundary classification") {
    ProcessParams p(0.037, 0.001);
    const Segment u = Segment::make_u(p);
    const double mid = u.period / 2;  // plateau, s = r

    auto on_face = classify_boundary(u, mid, Complex(0.568, 0.0));
    CHECK(on_face.where == BoundaryClassification::Where::OnFace);
    CHECK(on_face.face.face == 0);
    CHECK(on_face.face.role == FaceRole::Exit);
    CHECK(on_face.face.exit_component == 1);

    auto e2 = classify_boundary(u, mid, Complex(0.0, 0.568));
    CHECK(e2.where == BoundaryClassification::Where::OnFace);
    CHECK(e2.face.exit_component == 2);

    auto inside = classify_boundary(u, mid, Complex(0.1, 0.1));
    CHECK(inside.where == BoundaryClassification::Where::Interior);
    auto outside = classify_boundary(u, mid, Complex(0.7, 0.0));
    CHECK(outside.where == BoundaryClassification::Where::Outside);

    // True corner of W_0 = B(R): radius R/cos(pi/8) at angle pi/8, shared by
    // the exit face 0 and the entrance face 1.
    const Segment w = Segment::make_w(p);
    const Complex corner = polar(1.5 / std::cos(kPi / 8), kPi / 8);
    auto at_corner = classify_boundary(w, 0.0, corner, 1e-9);
    CHECK(at_corner.where == BoundaryClassification::Where::OnCorner);
    CHECK(at_corner.face.face == 0);
    CHECK(at_corner.face2.face == 1);
    CHECK(at_corner.face.role == FaceRole::Exit);
    CHECK(at_corner.face2.role == FaceRole::Entrance);

    // R e^{i pi/4} is the midpoint of entrance face 1, not a corner.
    auto face1 = classify_boundary(w, 0.0, polar(1.5, kPi / 4));
    CHECK(face1.where == BoundaryClassification::Where::OnFace);
    CHECK(face1.face.face == 1);
    CHECK(face1.face.role == FaceRole::Entrance);
}

TEST_CASE("transversality of W and U at both N values") {
    for (double n_param : {0.0, 0.001}) {
        ProcessParams p(0.037, n_param);
        for (const Segment& seg : {Segment::make_w(p), Segment::make_u(p)}) {
            auto rep = transversality_report(seg, p, 20000);
            INFO(seg.name(), " N=", n_param);
            CHECK(rep.violation_count == 0);
            CHECK(rep.min_margin() > 0.0);
        }
    }
}

TEST_CASE("transversality of V and E at the reference radii") {
    ProcessParams p(0.037, 0.001);
    const double m = std::cbrt(p.n_param);
    std::vector<Segment> segs{Segment::make_v(0.568, p), Segment::make_v(1.3 * m, p)};
    for (int k = 0; k < 3; ++k) {
        segs.push_back(Segment::make_e(k, 0.004 * m, p));
        segs.push_back(Segment::make_e(k, 0.383 * m, p));
    }
    for (const Segment& seg : segs) {
        auto rep = transversality_report(seg, p, 20000);
        INFO(seg.name());
        CHECK(rep.violation_count == 0);
        CHECK(rep.min_margin() > 0.0);
    }
}

TEST_CASE("transversality margins are stable under sample doubling") {
    ProcessParams p(0.037, 0.001);
    for (const Segment& seg : {Segment::make_w(p), Segment::make_u(p)}) {
        const double m1 = transversality_report(seg, p, 100000).min_margin();
        const double m2 = transversality_report(seg, p, 200000).min_margin();
        INFO(seg.name());
        CHECK(std::abs(m2 - m1) <= 0.1 * std::max(m1, m2));
    }
}

TEST_CASE("every non-corner boundary point gets exactly one class") {
    ProcessParams p(0.037, 0.001);
    const double m = std::cbrt(p.n_param);
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (const Segment& seg : {Segment::make_w(p), Segment::make_u(p),
                               Segment::make_v(0.568, p), Segment::make_e(1, 0.383 * m, p)}) {
        for (int rep = 0; rep < 400; ++rep) {
            const int face = static_cast<int>(unif(rng) * seg.face_count());
            const double t = unif(rng) * seg.period;
            const double u = 0.02 + 0.96 * unif(rng);
            const Complex z = seg.boundary_point(face, t, u).z;
            auto cls = classify_boundary(seg, t, z, 1e-10);
            INFO(seg.name(), " face=", face, " t=", t, " u=", u);
            REQUIRE(cls.where == BoundaryClassification::Where::OnFace);
            CHECK(cls.face.face == face);
            CHECK((cls.face.role == FaceRole::Exit) == (face % 2 == 0));
        }
    }
}

TEST_CASE("escape times") {
    ProcessParams p0(0.037, 0.0);
    const Segment u = Segment::make_u(p0);

    // The equilibrium at the origin never leaves.
    auto stay = escape_time(Complex(0, 0), u, p0, 3.0 * p0.period());
    CHECK_FALSE(stay.exited);

    // A start just inside an exit face leaves almost immediately.
    ProcessParams p(0.037, 0.001);
    const Segment v = Segment::make_v(0.568, p);
    auto quick = escape_time(Complex(0.568 - 1e-6, 0.0), v, p, 10.0);
    CHECK(quick.exited);
    CHECK(quick.time < 1e-3);
    CHECK(quick.crossing.face.role == FaceRole::Exit);

    // Empirical Wazewski continuity: nearby transversal starts exit at
    // nearby times.
    auto t1 = escape_time(Complex(0.45, 0.001), v, p, 10.0 * p.period());
    auto t2 = escape_time(Complex(0.45 + 1e-6, 0.001), v, p, 10.0 * p.period());
    CHECK(t1.exited);
    CHECK(t2.exited);
    CHECK(std::abs(t1.time - t2.time) < 1e-3);

    CHECK_THROWS_AS(escape_time(Complex(5.0, 0.0), v, p, 1.0), ParameterError);
}

TEST_CASE("G conditions at the reference parameters") {
    for (double n_param : {0.0, 0.001}) {
        ProcessParams p(0.037, n_param);
        auto rep = check_g_conditions(Segment::make_w(p), Segment::make_u(p), p, 64);
        INFO("N=", n_param);
        CHECK(rep.g1_containment);
        CHECK(rep.g1_min_slack >= -1e-12);  // sections coincide at t = 0
        CHECK(rep.g1_time0_sections_match);
        CHECK(rep.g2_eta > 0.0);
    }
}
