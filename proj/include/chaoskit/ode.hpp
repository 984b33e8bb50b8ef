#pragma once

#include <array>
#include <complex>
#include <functional>
#include <vector>

#include "chaoskit/errors.hpp"

namespace chaoskit {

using Complex = std::complex<double>;

// Parameters of dz/dt = (1 + e^{i kappa t} |z|^2) conj(z)^3 - N, with the
// drive period T = 2 pi / kappa. The admissible box is 0 < kappa <= 0.037,
// 0 <= N <= 0.001; set allow_out_of_range to explore beyond it.
struct ProcessParams {
    double kappa = 0.037;
    double n_param = 0.001;
    bool allow_out_of_range = false;

    ProcessParams() = default;
    ProcessParams(double kappa_in, double n_in, bool allow = false);

    double period() const;
};

// M = N^(1/3) and the three unit cube roots P<k> = e^{2 pi i k / 3}.
struct CubeRootFrame {
    double m_scale = 0.0;
    std::array<Complex, 3> roots;

    explicit CubeRootFrame(const ProcessParams& p);
    Complex center(int k) const { return m_scale * roots[static_cast<std::size_t>(k)]; }
};

Complex vector_field(double t, Complex z, const ProcessParams& p);

struct FlowOptions {
    double tol = 1e-9;             // local error per unit time
    double bailout_radius = 10.0;  // leaving this radius raises EscapeError
    double max_step = 0.0;         // 0 = period/100
    double sample_step = 0.0;      // 0 = observer sees natural steps only
};

// Observer invoked at every accepted step endpoint (absolute time, state).
using FlowObserver = std::function<void(double, Complex)>;

// phi_{(sigma,t)}(z): solution at time sigma + t of the Cauchy problem with
// z(sigma) = z. Adaptive embedded Dormand-Prince 5(4) pair; error budget is
// tol per unit time so the accumulated defect scales linearly with tol.
Complex flow(double sigma, double t, Complex z, const ProcessParams& p,
             const FlowOptions& opts = {});
Complex flow(double sigma, double t, Complex z, const ProcessParams& p,
             const FlowOptions& opts, const FlowObserver& observer);

// P_T = phi_{(0,T)}.
Complex poincare(Complex z, const ProcessParams& p, const FlowOptions& opts = {});

struct PeriodicSolution {
    int sector = 0;  // index k of the seed M * P<k>; 0 for the N = 0 root
    Complex point;
    double residual = 0.0;
    double max_center_distance = 0.0;  // max_t |psi(t) - M * P<k>|
};

// Fixed points of the Poincare map by damped Newton with finite-difference
// Jacobians, seeded at M * P<k> (at the origin when N = 0). Each returned
// root satisfies |P_T(psi) - psi| <= residual_tol and carries the measured
// maximum orbit distance from its seed center.
std::vector<PeriodicSolution> find_periodic_solutions(const ProcessParams& p,
                                                      const FlowOptions& opts = {},
                                                      double residual_tol = 1e-9,
                                                      int max_iterations = 60);

}  // namespace chaoskit
