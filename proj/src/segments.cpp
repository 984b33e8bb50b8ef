#include "chaoskit/segments.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "chaoskit/io_util.hpp"

namespace chaoskit {

namespace {

constexpr double kPi = std::numbers::pi;

Complex unit(double angle) { return Complex(std::cos(angle), std::sin(angle)); }

double dot(Complex a, Complex b) { return a.real() * b.real() + a.imag() * b.imag(); }

// R2 low-discrepancy sequence (plastic constant), deterministic coverage of
// the (time, face-parameter) rectangle.
double r2_alpha1() { return 0.7548776662466927; }
double r2_alpha2() { return 0.5698402909980532; }
double frac(double x) { return x - std::floor(x); }

double point_segment_distance(Complex p, Complex a, Complex b) {
    const Complex ab = b - a;
    const double len2 = std::norm(ab);
    double s = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
    s = std::clamp(s, 0.0, 1.0);
    return std::abs(p - (a + s * ab));
}

}  // namespace

// ---------------------------------------------------------------- Octagon

Octagon::Octagon(double s) : scale(s) {
    if (!(s > 0.0)) throw ParameterError("octagon scale must be positive");
}

double Octagon::signed_violation(Complex z) const {
    double worst = -1e300;
    for (int k = 0; k < 8; ++k)
        worst = std::max(worst, dot(z, face_normal(k)) - scale);
    return worst;
}

bool Octagon::contains(Complex z) const { return signed_violation(z) <= 0.0; }

double Octagon::exterior_distance(Complex z) const {
    if (contains(z)) return 0.0;
    double best = 1e300;
    for (int k = 0; k < 8; ++k)
        best = std::min(best, point_segment_distance(z, vertex(k - 1), vertex(k)));
    return best;
}

double Octagon::half_face_width() const { return scale * std::tan(kPi / 8.0); }

double Octagon::circumradius() const { return scale / std::cos(kPi / 8.0); }

Complex Octagon::vertex(int k) const {
    const int kk = ((k % 8) + 8) % 8;
    return circumradius() * unit(kPi / 8.0 + kk * kPi / 4.0);
}

Complex Octagon::face_point(int k, double y) const {
    return Complex(scale, y) * face_normal(k);
}

Complex Octagon::face_normal(int k) {
    const int kk = ((k % 8) + 8) % 8;
    return unit(kk * kPi / 4.0);
}

// ---------------------------------------------------------------- SProfile

SProfile::SProfile(double period_in, double r_in, double R_in, double delta_in)
    : r(r_in), R(R_in), delta(delta_in), period(period_in) {
    if (!(r > 0.0 && R > r)) throw ParameterError("profile needs 0 < r < R");
    if (!(delta > 0.0 && delta < period / 2.0))
        throw ParameterError("profile needs 0 < delta < T/2 (delta = " +
                             std::to_string(delta) + ", T = " + std::to_string(period) +
                             ")");
    omega = (R - r) / delta;
}

double SProfile::value(double t) const {
    if (t <= delta) return R - omega * t;
    if (t < period - delta) return r;
    return R - omega * (period - t);
}

double SProfile::rate(double t) const {
    if (t < delta) return -omega;
    if (t <= period - delta) return 0.0;
    return omega;
}

// ---------------------------------------------------------------- Segment

Segment Segment::make_w(const ProcessParams& p) {
    Segment s;
    s.kind = Kind::W;
    s.period = p.period();
    s.kappa = p.kappa;
    s.profile = SProfile(s.period);
    return s;
}

Segment Segment::make_u(const ProcessParams& p) {
    Segment s;
    s.kind = Kind::U;
    s.period = p.period();
    s.kappa = p.kappa;
    s.profile = SProfile(s.period);
    return s;
}

Segment Segment::make_v(double xi, const ProcessParams& p) {
    if (!(xi > 0.0)) throw ParameterError("V(xi) needs xi > 0");
    Segment s;
    s.kind = Kind::V;
    s.period = p.period();
    s.profile = SProfile(s.period);
    s.xi = xi;
    return s;
}

Segment Segment::make_e(int sector, double eta, const ProcessParams& p) {
    if (sector < 0 || sector > 2) throw ParameterError("E sector must be 0, 1 or 2");
    if (!(eta > 0.0)) throw ParameterError("E(eta) needs eta > 0");
    if (!(p.n_param > 0.0)) throw ParameterError("E segments need N > 0");
    Segment s;
    s.kind = Kind::E;
    s.period = p.period();
    s.profile = SProfile(s.period);
    s.sector = sector;
    s.eta = eta;
    s.m_scale = std::cbrt(p.n_param);
    return s;
}

std::string Segment::name() const {
    switch (kind) {
        case Kind::W: return "W";
        case Kind::U: return "U";
        case Kind::V: return "V(" + io::num(xi) + ")";
        case Kind::E:
            return "E<" + std::to_string(sector) + ">(" + io::num(eta) + ")";
    }
    return "?";
}

int Segment::face_count() const { return kind == Kind::E ? 4 : 8; }

namespace {

double wrap_period(double t, double period) {
    double m = std::fmod(t, period);
    if (m < 0.0) m += period;
    return m;
}

Complex sector_root(int sector) { return unit(2.0 * kPi * sector / 3.0); }

// Square frame of E<k>: w = P<k> (z - M P<k>), membership |re w|,|im w| <= eta.
Complex to_square_frame(const Segment& s, Complex z) {
    const Complex p = sector_root(s.sector);
    return p * (z - s.m_scale * p);
}

Complex from_square_frame(const Segment& s, Complex w) {
    const Complex p = sector_root(s.sector);
    return std::conj(p) * w + s.m_scale * p;
}

// Per-face signed violations in the segment's own frame.
void face_violations(const Segment& s, double t, Complex z, double* g, int& faces,
                     double& scale_hint) {
    const double tm = wrap_period(t, s.period);
    switch (s.kind) {
        case Segment::Kind::W: {
            const Complex zf = unit(-tm * s.kappa / 4.0) * z;
            for (int k = 0; k < 8; ++k)
                g[k] = dot(zf, Octagon::face_normal(k)) - s.profile.R;
            faces = 8;
            scale_hint = s.profile.R;
            return;
        }
        case Segment::Kind::U: {
            const double sv = s.profile.value(tm);
            for (int k = 0; k < 8; ++k) g[k] = dot(z, Octagon::face_normal(k)) - sv;
            faces = 8;
            scale_hint = sv;
            return;
        }
        case Segment::Kind::V: {
            for (int k = 0; k < 8; ++k) g[k] = dot(z, Octagon::face_normal(k)) - s.xi;
            faces = 8;
            scale_hint = s.xi;
            return;
        }
        case Segment::Kind::E: {
            const Complex w = to_square_frame(s, z);
            g[0] = w.real() - s.eta;
            g[1] = w.imag() - s.eta;
            g[2] = -w.real() - s.eta;
            g[3] = -w.imag() - s.eta;
            faces = 4;
            scale_hint = s.eta;
            return;
        }
    }
}

}  // namespace

bool Segment::contains(double t, Complex z) const {
    double g[8];
    int faces = 0;
    double hint = 0.0;
    face_violations(*this, t, z, g, faces, hint);
    return *std::max_element(g, g + faces) <= 0.0;
}

FaceClass Segment::classify_face(int face) const {
    FaceClass fc;
    fc.face = face;
    if (kind == Kind::E) {
        fc.role = (face % 2 == 0) ? FaceRole::Exit : FaceRole::Entrance;
        return fc;
    }
    fc.role = (face % 2 == 0) ? FaceRole::Exit : FaceRole::Entrance;
    if (kind == Kind::U && fc.role == FaceRole::Exit) fc.exit_component = face / 2 + 1;
    return fc;
}

Segment::BoundaryPoint Segment::boundary_point(int face, double t, double u) const {
    if (!(u > 0.0 && u < 1.0))
        throw ParameterError("boundary parameter must lie strictly inside (0,1)");
    const double tm = wrap_period(t, period);
    BoundaryPoint bp;
    switch (kind) {
        case Kind::W: {
            const Octagon oct(profile.R);
            const double y = (2.0 * u - 1.0) * oct.half_face_width();
            const Complex rot = unit(tm * kappa / 4.0);
            bp.z = rot * oct.face_point(face, y);
            bp.normal = rot * Octagon::face_normal(face);
            bp.boundary_velocity = Complex(0.0, kappa / 4.0) * bp.z;
            return bp;
        }
        case Kind::U: {
            const Octagon oct(profile.value(tm));
            const double y = (2.0 * u - 1.0) * oct.half_face_width();
            bp.z = oct.face_point(face, y);
            bp.normal = Octagon::face_normal(face);
            bp.boundary_velocity = profile.rate(tm) * bp.normal;
            return bp;
        }
        case Kind::V: {
            const Octagon oct(xi);
            const double y = (2.0 * u - 1.0) * oct.half_face_width();
            bp.z = oct.face_point(face, y);
            bp.normal = Octagon::face_normal(face);
            bp.boundary_velocity = Complex(0.0, 0.0);
            return bp;
        }
        case Kind::E: {
            const double y = (2.0 * u - 1.0) * eta;
            Complex w, nw;
            switch (face) {
                case 0: w = Complex(eta, y); nw = Complex(1, 0); break;
                case 1: w = Complex(y, eta); nw = Complex(0, 1); break;
                case 2: w = Complex(-eta, y); nw = Complex(-1, 0); break;
                default: w = Complex(y, -eta); nw = Complex(0, -1); break;
            }
            const Complex pbar = std::conj(sector_root(sector));
            bp.z = from_square_frame(*this, w);
            bp.normal = pbar * nw;
            bp.boundary_velocity = Complex(0.0, 0.0);
            return bp;
        }
    }
    throw ParameterError("unknown segment kind");
}

BoundaryClassification classify_boundary(const Segment& seg, double t, Complex z,
                                         double boundary_tol) {
    double g[8];
    int faces = 0;
    double hint = 0.0;
    face_violations(seg, t, z, g, faces, hint);
    const double gmax = *std::max_element(g, g + faces);

    BoundaryClassification out;
    if (gmax < -boundary_tol) {
        out.where = BoundaryClassification::Where::Interior;
        return out;
    }
    if (gmax > boundary_tol) {
        out.where = BoundaryClassification::Where::Outside;
        return out;
    }
    int on[8];
    int count = 0;
    for (int k = 0; k < faces; ++k)
        if (g[k] >= -boundary_tol) on[count++] = k;
    if (count >= 2) {
        out.where = BoundaryClassification::Where::OnCorner;
        out.face = seg.classify_face(on[0]);
        out.face2 = seg.classify_face(on[1]);
    } else {
        out.where = BoundaryClassification::Where::OnFace;
        out.face = seg.classify_face(on[0]);
    }
    return out;
}

double transversality_margin(const Segment& seg, const ProcessParams& p, int face,
                             double t, double u) {
    const Segment::BoundaryPoint bp = seg.boundary_point(face, t, u);
    const Complex v = vector_field(t, bp.z, p);
    const double raw = dot(v - bp.boundary_velocity, bp.normal);
    return seg.classify_face(face).role == FaceRole::Exit ? raw : -raw;
}

double TransversalityReport::min_margin() const {
    double m = 1e300;
    for (const FaceReport& f : faces) m = std::min(m, f.min_margin);
    return m;
}

void TransversalityReport::write_csv(std::ostream& out) const {
    out << "segment,face,t,re,im,margin\n";
    for (const FaceReport& f : faces)
        out << segment << ',' << f.face << ',' << io::num(f.t_at_min) << ','
            << io::num(f.z_at_min.real()) << ',' << io::num(f.z_at_min.imag()) << ','
            << io::num(f.min_margin) << "\n";
}

TransversalityReport transversality_report(const Segment& seg, const ProcessParams& p,
                                           std::size_t samples) {
    if (samples == 0) throw ParameterError("transversality needs samples >= 1");
    const int faces = seg.face_count();
    TransversalityReport rep;
    rep.segment = seg.name();
    rep.faces.resize(static_cast<std::size_t>(faces));
    for (int f = 0; f < faces; ++f) {
        rep.faces[static_cast<std::size_t>(f)].face = f;
        rep.faces[static_cast<std::size_t>(f)].role = seg.classify_face(f).role;
        rep.faces[static_cast<std::size_t>(f)].min_margin = 1e300;
    }
    for (std::size_t i = 0; i < samples; ++i) {
        const int face = static_cast<int>(i % static_cast<std::size_t>(faces));
        const double t = frac(0.5 + r2_alpha1() * static_cast<double>(i)) * seg.period;
        const double u = frac(0.5 + r2_alpha2() * static_cast<double>(i));
        const double margin = transversality_margin(seg, p, face, t, u);
        FaceReport& fr = rep.faces[static_cast<std::size_t>(face)];
        fr.samples++;
        rep.total_samples++;
        if (margin < fr.min_margin) {
            fr.min_margin = margin;
            fr.t_at_min = t;
            fr.z_at_min = seg.boundary_point(face, t, u).z;
        }
        if (margin <= 0.0) {
            fr.violations++;
            rep.violation_count++;
        }
    }
    return rep;
}

EscapeResult escape_time(Complex z, const Segment& seg, const ProcessParams& p,
                         double t_max, const FlowOptions& opts, double time_tol) {
    if (!seg.contains(0.0, z))
        throw ParameterError("escape_time requires a start inside the segment");
    const double substep = seg.period / 500.0;
    double t = 0.0;
    Complex zt = z;
    EscapeResult res;
    while (t < t_max) {
        const double dt = std::min(substep, t_max - t);
        const Complex znext = flow(t, dt, zt, p, opts);
        if (!seg.contains(t + dt, znext)) {
            // Bisect the crossing inside [t, t + dt], restarting from (t, zt).
            double lo = 0.0, hi = dt;
            while (hi - lo > time_tol) {
                const double mid = 0.5 * (lo + hi);
                if (seg.contains(t + mid, flow(t, mid, zt, p, opts)))
                    lo = mid;
                else
                    hi = mid;
            }
            res.exited = true;
            res.time = t + hi;
            const Complex zc = flow(t, 0.5 * (lo + hi), zt, p, opts);
            const double fat_tol =
                std::max(1e-9, 100.0 * time_tol * (1.0 + std::abs(vector_field(res.time, zc, p))));
            res.crossing = classify_boundary(seg, res.time, zc, fat_tol);
            if (res.crossing.where == BoundaryClassification::Where::Interior ||
                res.crossing.where == BoundaryClassification::Where::Outside) {
                // Tolerance miss: fall back to the nearest face.
                double g[8];
                int nf = 0;
                double hint = 0.0;
                face_violations(seg, res.time, zc, g, nf, hint);
                const int best = static_cast<int>(
                    std::max_element(g, g + nf) - g);
                res.crossing.where = BoundaryClassification::Where::OnFace;
                res.crossing.face = seg.classify_face(best);
            }
            return res;
        }
        t += dt;
        zt = znext;
    }
    res.exited = false;
    res.time = t_max;
    return res;
}

namespace {

double spatial_distance(const Segment& seg, double t, Complex z) {
    const double tm = wrap_period(t, seg.period);
    switch (seg.kind) {
        case Segment::Kind::W:
            return Octagon(seg.profile.R).exterior_distance(unit(-tm * seg.kappa / 4.0) * z);
        case Segment::Kind::U:
            return Octagon(seg.profile.value(tm)).exterior_distance(z);
        case Segment::Kind::V:
            return Octagon(seg.xi).exterior_distance(z);
        case Segment::Kind::E: {
            const Complex w = to_square_frame(seg, z);
            const double dx = std::max(std::abs(w.real()) - seg.eta, 0.0);
            const double dy = std::max(std::abs(w.imag()) - seg.eta, 0.0);
            return std::hypot(dx, dy);
        }
    }
    return 0.0;
}

// Space-time distance from (t, z) to the periodic concatenation of the
// segment, with the product metric hypot(dt, dz).
double spacetime_distance(const Segment& seg, double t, Complex z) {
    const double base = spatial_distance(seg, t, z);
    double best = base;
    // The profile moves at most at rate omega (< 0.1); scanning a window of
    // +-base in time is enough to find the minimizer.
    const double window = std::min(base + 0.25, seg.period / 4.0);
    const int steps = 64;
    for (int i = -steps; i <= steps; ++i) {
        const double dt = window * static_cast<double>(i) / steps;
        best = std::min(best, std::hypot(dt, spatial_distance(seg, t + dt, z)));
    }
    return best;
}

// Largest distance from the segment an exit orbit reaches before returning
// (capped); returns the achieved value.
double g2_excursion(const Segment& seg, const ProcessParams& p, double t0, Complex z0,
                    const FlowOptions& opts, double cap, bool& reentered) {
    double achieved = 0.0;
    double t = t0;
    Complex z = z0;
    const double substep = seg.period / 500.0;
    const double t_end = t0 + 1.5 * seg.period;
    reentered = false;
    try {
        while (t < t_end) {
            const Complex znext = flow(t, substep, z, p, opts);
            t += substep;
            z = znext;
            if (seg.contains(t, z)) {
                reentered = true;
                return achieved;
            }
            achieved = std::max(achieved, spacetime_distance(seg, t, z));
            if (achieved >= cap) return cap;
        }
    } catch (const EscapeError&) {
        // Bailout radius is far outside every segment here.
        return cap;
    }
    return achieved;
}

}  // namespace

GConditionReport check_g_conditions(const Segment& w, const Segment& u,
                                    const ProcessParams& p, std::size_t samples,
                                    const FlowOptions& opts) {
    if (w.kind != Segment::Kind::W || u.kind != Segment::Kind::U)
        throw ParameterError("check_g_conditions expects segments of kind W and U");
    GConditionReport rep;
    rep.samples_per_set = samples;
    rep.g2_cap = 2.0;

    // (G1) containment: every corner of U_t inside W_t, on a fine t grid.
    // At t = 0 the sections coincide, so corners touch the boundary exactly;
    // allow rounding noise there.
    const int tgrid = 720;
    const double rounding = 1e-12;
    double min_slack = 1e300;
    bool contained = true;
    for (int i = 0; i <= tgrid; ++i) {
        const double t = w.period * static_cast<double>(i) / tgrid;
        const Octagon ut(u.profile.value(t));
        const Complex rot = unit(-t * w.kappa / 4.0);
        for (int k = 0; k < 8; ++k) {
            const double slack = -Octagon(w.profile.R).signed_violation(rot * ut.vertex(k));
            min_slack = std::min(min_slack, slack);
            contained = contained && (slack >= -rounding);
        }
    }
    rep.g1_containment = contained;
    rep.g1_min_slack = min_slack;
    // Time-0 sections: s(0) = R makes U_0 = W_0 = B(R) and the exit faces of
    // both sit at the even octagon angles.
    rep.g1_time0_sections_match = (u.profile.value(0.0) == w.profile.R);

    // (G2): exit orbits must push away from the periodic segment.
    double eta = rep.g2_cap;
    for (const Segment* seg : {&w, &u}) {
        for (std::size_t i = 0; i < samples; ++i) {
            const int exit_faces[4] = {0, 2, 4, 6};
            const int face = exit_faces[i % 4];
            const double t = frac(0.5 + r2_alpha1() * static_cast<double>(i)) * seg->period;
            const double uu = frac(0.5 + r2_alpha2() * static_cast<double>(i));
            const auto bp = seg->boundary_point(face, t, uu);
            // Nudge just outside so the orbit starts past the boundary.
            const Complex z0 = bp.z + 1e-9 * bp.normal;
            bool reentered = false;
            const double excursion =
                g2_excursion(*seg, p, t, z0, opts, rep.g2_cap, reentered);
            if (reentered) rep.reentries++;
            eta = std::min(eta, excursion);
        }
    }
    rep.g2_eta = eta;
    return rep;
}

}  // namespace chaoskit
