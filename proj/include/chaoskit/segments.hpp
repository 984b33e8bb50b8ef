#pragma once

#include <complex>
#include <iosfwd>
#include <string>
#include <vector>

#include "chaoskit/ode.hpp"

namespace chaoskit {

// Regular octagon centered at the origin in half-plane form: z belongs to
// B(s) iff re(e^{-i k pi/4} z) <= s for k = 0..7. Faces are indexed by the
// angle k pi/4 of their outward normal; corners sit at pi/8 + k pi/4.
struct Octagon {
    double scale = 0.0;

    explicit Octagon(double s);

    bool contains(Complex z) const;
    // Largest half-plane violation; <= 0 inside, > 0 outside.
    double signed_violation(Complex z) const;
    // Exact Euclidean distance to the octagon (0 inside).
    double exterior_distance(Complex z) const;

    double half_face_width() const;   // scale * tan(pi/8)
    double circumradius() const;      // scale / cos(pi/8)
    Complex vertex(int k) const;      // corner at pi/8 + k pi/4
    // Point on face k at offset y in (-half_face_width, half_face_width).
    Complex face_point(int k, double y) const;
    static Complex face_normal(int k);
};

// Time profile of the shrinking octagon U: R on the boundary of the period,
// ramping linearly to r over delta and back.
struct SProfile {
    double r = 0.568;
    double R = 1.5;
    double delta = 10.6;
    double omega = 0.0;  // (R - r) / delta
    double period = 0.0;

    SProfile() = default;
    SProfile(double period, double r = 0.568, double R = 1.5, double delta = 10.6);

    double value(double t) const;  // s(t), t in [0, period]
    double rate(double t) const;   // s'(t): -omega, 0, +omega
};

enum class FaceRole { Exit, Entrance };

struct FaceClass {
    int face = 0;            // octagon: 0..7; E squares: 0..3
    FaceRole role = FaceRole::Exit;
    int exit_component = 0;  // E[1..4] for exit faces of U, else 0
};

struct BoundaryClassification {
    enum class Where { Interior, OnFace, OnCorner, Outside } where = Where::Interior;
    FaceClass face;    // valid for OnFace and OnCorner
    FaceClass face2;   // the second face at a corner
};

// A T-periodic isolating segment candidate: the rotating octagon W, the
// shrinking octagon U, the static octagon V(xi), or the square E<k>(eta)
// around the cube-root center M * P<k>.
struct Segment {
    enum class Kind { W, U, V, E } kind = Kind::W;
    double period = 0.0;
    double kappa = 0.0;    // W
    SProfile profile;      // U
    double xi = 0.0;       // V
    int sector = 0;        // E
    double eta = 0.0;      // E
    double m_scale = 0.0;  // E

    static Segment make_w(const ProcessParams& p);
    static Segment make_u(const ProcessParams& p);
    static Segment make_v(double xi, const ProcessParams& p);
    static Segment make_e(int sector, double eta, const ProcessParams& p);

    std::string name() const;
    int face_count() const;
    bool contains(double t, Complex z) const;

    // Exit faces sit at the axis angles (0, pi/2, pi, 3pi/2) of the octagon
    // frame (even face index); entrance faces at the diagonals. For E the
    // exit sides are |re w| = eta in the rotated square frame.
    FaceClass classify_face(int face) const;

    // Boundary point of the given face at parameter u in (0, 1), corners
    // excluded; also reports the outward normal and the boundary velocity.
    struct BoundaryPoint {
        Complex z;
        Complex normal;
        Complex boundary_velocity;
    };
    BoundaryPoint boundary_point(int face, double t, double u) const;
};

BoundaryClassification classify_boundary(const Segment& seg, double t, Complex z,
                                         double boundary_tol = 1e-12);

// Relative outward normal speed of the flow at a boundary point: positive
// means the orbit crosses outward relative to the moving boundary.
double transversality_margin(const Segment& seg, const ProcessParams& p, int face,
                             double t, double u);

struct FaceReport {
    int face = 0;
    FaceRole role = FaceRole::Exit;
    std::size_t samples = 0;
    double min_margin = 0.0;  // margin is sign-adjusted: > 0 means transversal
    double t_at_min = 0.0;
    Complex z_at_min;
    std::size_t violations = 0;
};

struct TransversalityReport {
    std::string segment;
    std::vector<FaceReport> faces;
    std::size_t total_samples = 0;
    std::size_t violation_count = 0;

    double min_margin() const;
    // CSV schema: segment, face, t, re, im, margin (per-face minima).
    void write_csv(std::ostream& out) const;
};

// Low-discrepancy sample of the lateral boundary; margins are evaluated from
// the analytic formulas, so the report is deterministic.
TransversalityReport transversality_report(const Segment& seg, const ProcessParams& p,
                                           std::size_t samples);

struct EscapeResult {
    bool exited = false;
    double time = 0.0;  // first boundary crossing, bisected to time_tol
    BoundaryClassification crossing;
};

// First time the orbit from (0, z) leaves the segment, or "stayed" when it
// survives to t_max. Membership is checked every integration substep and the
// crossing is bisected to time_tol.
EscapeResult escape_time(Complex z, const Segment& seg, const ProcessParams& p,
                         double t_max, const FlowOptions& opts = {},
                         double time_tol = 1e-9);

struct GConditionReport {
    bool g1_containment = false;
    double g1_min_slack = 0.0;     // min over grid of W-membership slack of U's corners
    bool g1_time0_sections_match = false;
    double g2_eta = 0.0;           // largest uniform eta sustained by every sample
    double g2_cap = 0.0;           // tracking stops once this distance is reached
    std::size_t samples_per_set = 0;
    std::size_t reentries = 0;     // exit orbits that touched the segment again
};

// (G1): U_t inside W_t on a time grid plus equality of the time-0 sections
// and exit sets. (G2): sampled exit orbits must reach space-time distance
// eta from the periodic segment before any return.
GConditionReport check_g_conditions(const Segment& w, const Segment& u,
                                    const ProcessParams& p, std::size_t samples = 256,
                                    const FlowOptions& opts = {});

}  // namespace chaoskit
