#include "chaoskit/ode.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace chaoskit {

ProcessParams::ProcessParams(double kappa_in, double n_in, bool allow)
    : kappa(kappa_in), n_param(n_in), allow_out_of_range(allow) {
    if (!(kappa > 0.0)) throw ParameterError("kappa must be positive");
    if (!allow_out_of_range) {
        if (kappa > 0.037)
            throw ParameterError("kappa above 0.037 needs allow_out_of_range");
        if (n_param < 0.0 || n_param > 0.001)
            throw ParameterError("N outside [0, 0.001] needs allow_out_of_range");
    }
    if (n_param < 0.0) throw ParameterError("N must be nonnegative");
}

double ProcessParams::period() const { return 2.0 * std::numbers::pi / kappa; }

CubeRootFrame::CubeRootFrame(const ProcessParams& p) : m_scale(std::cbrt(p.n_param)) {
    for (int k = 0; k < 3; ++k) {
        double angle = 2.0 * std::numbers::pi * k / 3.0;
        roots[static_cast<std::size_t>(k)] = Complex(std::cos(angle), std::sin(angle));
    }
}

Complex vector_field(double t, Complex z, const ProcessParams& p) {
    const Complex zb = std::conj(z);
    const Complex drive(std::cos(p.kappa * t), std::sin(p.kappa * t));
    return (1.0 + drive * std::norm(z)) * (zb * zb * zb) - p.n_param;
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// 5th-minus-4th order error weights.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

struct StepResult {
    Complex z;
    double error = 0.0;
    Complex k_last;  // FSAL stage
};

StepResult dopri_step(double t, Complex z, Complex k1, double h, const ProcessParams& p) {
    const Complex k2 = vector_field(t + c2 * h, z + h * (a21 * k1), p);
    const Complex k3 = vector_field(t + c3 * h, z + h * (a31 * k1 + a32 * k2), p);
    const Complex k4 = vector_field(t + c4 * h, z + h * (a41 * k1 + a42 * k2 + a43 * k3), p);
    const Complex k5 =
        vector_field(t + c5 * h, z + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4), p);
    const Complex k6 = vector_field(
        t + h, z + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5), p);
    StepResult r;
    r.z = z + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const Complex k7 = vector_field(t + h, r.z, p);
    const Complex err =
        h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    r.error = std::abs(err);
    r.k_last = k7;
    return r;
}

Complex integrate(double sigma, double t, Complex z, const ProcessParams& p,
                  const FlowOptions& opts, const FlowObserver* observer) {
    if (!(opts.tol > 0.0)) throw ParameterError("flow tolerance must be positive");
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw NumericError("flow started from a nonfinite state");
    if (t == 0.0) return z;

    const double direction = (t > 0.0) ? 1.0 : -1.0;
    const double t_end = sigma + t;
    const double hard_cap = (opts.max_step > 0.0) ? opts.max_step : p.period() / 100.0;
    const double cap = (opts.sample_step > 0.0) ? std::min(hard_cap, opts.sample_step)
                                                : hard_cap;
    double time = sigma;
    double h = direction * std::min(cap, 1e-2 * (1.0 + std::abs(z)) /
                                             (1.0 + std::abs(vector_field(sigma, z, p))));
    Complex k1 = vector_field(time, z, p);

    while (direction * (t_end - time) > 0.0) {
        if (direction * (time + h) > direction * t_end) h = t_end - time;
        const double h_abs = std::abs(h);
        if (h_abs < 1e-14 * (1.0 + std::abs(t)))
            throw NumericError("flow step size collapsed at t = " + std::to_string(time));
        StepResult step = dopri_step(time, z, k1, h, p);
        if (!std::isfinite(step.z.real()) || !std::isfinite(step.z.imag()))
            throw NumericError("flow produced a nonfinite state");
        // Error budget proportional to the step: tol per unit time.
        const double budget = opts.tol * h_abs * (1.0 + std::abs(step.z));
        if (step.error <= budget) {
            time += h;
            z = step.z;
            k1 = step.k_last;
            if (std::abs(z) > opts.bailout_radius)
                throw EscapeError("trajectory left the bailout radius at t = " +
                                      std::to_string(time),
                                  time, std::abs(z));
            if (observer) (*observer)(time, z);
            const double grow =
                0.9 * std::pow(budget / std::max(step.error, 1e-300), 0.25);
            h = direction * std::min(cap, h_abs * std::clamp(grow, 0.2, 5.0));
        } else {
            const double shrink =
                0.9 * std::pow(budget / step.error, 0.25);
            h = direction * std::max(1e-15, h_abs * std::clamp(shrink, 0.1, 0.9));
        }
    }
    return z;
}

}  // namespace

Complex flow(double sigma, double t, Complex z, const ProcessParams& p,
             const FlowOptions& opts) {
    return integrate(sigma, t, z, p, opts, nullptr);
}

Complex flow(double sigma, double t, Complex z, const ProcessParams& p,
             const FlowOptions& opts, const FlowObserver& observer) {
    return integrate(sigma, t, z, p, opts, &observer);
}

Complex poincare(Complex z, const ProcessParams& p, const FlowOptions& opts) {
    return flow(0.0, p.period(), z, p, opts);
}

namespace {

struct Mat2 {
    double a = 0, b = 0, c = 0, d = 0;
};

Complex solve2(const Mat2& m, Complex rhs) {
    const double det = m.a * m.d - m.b * m.c;
    if (std::abs(det) < 1e-300) throw SearchError("singular Jacobian in Newton step");
    return Complex((m.d * rhs.real() - m.b * rhs.imag()) / det,
                   (-m.c * rhs.real() + m.a * rhs.imag()) / det);
}

PeriodicSolution newton_fixed_point(Complex seed, int sector, const ProcessParams& p,
                                    const FlowOptions& opts, double residual_tol,
                                    int max_iterations) {
    Complex z = seed;
    auto F = [&](Complex w) { return poincare(w, p, opts) - w; };
    Complex fz = F(z);
    for (int iter = 0; iter < max_iterations; ++iter) {
        if (std::abs(fz) <= residual_tol) {
            PeriodicSolution sol;
            sol.sector = sector;
            sol.point = z;
            sol.residual = std::abs(fz);
            return sol;
        }
        const double h = 1e-7 * std::max(1.0, std::abs(z));
        const Complex fx = F(z + Complex(h, 0.0));
        const Complex fy = F(z + Complex(0.0, h));
        Mat2 jac{(fx.real() - fz.real()) / h, (fy.real() - fz.real()) / h,
                 (fx.imag() - fz.imag()) / h, (fy.imag() - fz.imag()) / h};
        const Complex dir = solve2(jac, -fz);
        double lambda = 1.0;
        Complex best_z = z;
        Complex best_f = fz;
        bool improved = false;
        for (int halve = 0; halve < 16; ++halve) {
            const Complex trial = z + lambda * dir;
            try {
                const Complex ft = F(trial);
                if (std::abs(ft) < std::abs(best_f)) {
                    best_z = trial;
                    best_f = ft;
                    improved = true;
                    break;
                }
            } catch (const EscapeError&) {
                // Overshot into the unstable region; shorten the step.
            }
            lambda *= 0.5;
        }
        if (!improved)
            throw SearchError("Newton stalled from seed (" + std::to_string(seed.real()) +
                              ", " + std::to_string(seed.imag()) + ")");
        z = best_z;
        fz = best_f;
    }
    throw SearchError("Newton failed to converge from seed (" +
                      std::to_string(seed.real()) + ", " + std::to_string(seed.imag()) +
                      ")");
}

}  // namespace

std::vector<PeriodicSolution> find_periodic_solutions(const ProcessParams& p,
                                                      const FlowOptions& opts,
                                                      double residual_tol,
                                                      int max_iterations) {
    CubeRootFrame frame(p);
    std::vector<PeriodicSolution> out;
    const int seeds = (p.n_param > 0.0) ? 3 : 1;
    for (int k = 0; k < seeds; ++k) {
        const Complex center = (p.n_param > 0.0) ? frame.center(k) : Complex(0.0, 0.0);
        PeriodicSolution sol =
            newton_fixed_point(center, k, p, opts, residual_tol, max_iterations);
        // Dense pass over one period for the center-distance bound.
        double max_dist = std::abs(sol.point - center);
        FlowOptions dense = opts;
        dense.sample_step = p.period() / 1000.0;
        flow(0.0, p.period(), sol.point, p, dense, [&](double, Complex w) {
            max_dist = std::max(max_dist, std::abs(w - center));
        });
        sol.max_center_distance = max_dist;
        out.push_back(sol);
    }
    return out;
}

}  // namespace chaoskit
