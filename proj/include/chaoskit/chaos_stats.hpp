#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "chaoskit/errors.hpp"
#include "chaoskit/shift.hpp"

namespace chaoskit {

// d_i = d(f^i(x), f^i(y)) for 0 <= i < n, for any metric system.
struct DistanceSeries {
    std::vector<double> values;

    explicit DistanceSeries(std::vector<double> v);

    // Shift-metric orbit distances of two windows (truncated to the common
    // horizon). Computed in O(n) via the next-disagreement index.
    static DistanceSeries between(const SymbolStream& x, const SymbolStream& y);
    // Euclidean orbit distances for planar orbits.
    static DistanceSeries between(std::span<const std::complex<double>> x,
                                  std::span<const std::complex<double>> y);

    std::size_t size() const { return values.size(); }
};

// (1/n) * #{ i < n : d_i < t }
double phi_n(const DistanceSeries& series, double t);

// Prefix frequency of an indicator set evaluated along a horizon schedule;
// max (resp. min) estimates the upper (resp. lower) density.
double upper_density(const std::vector<bool>& indicator, const std::vector<std::size_t>& schedule);
double lower_density(const std::vector<bool>& indicator, const std::vector<std::size_t>& schedule);

// Finite-horizon table of Phi^(n)(t) over a threshold grid and a horizon
// schedule, with running extrema as liminf/limsup estimates.
struct DCProfile {
    std::vector<double> thresholds;           // strictly increasing
    std::vector<std::size_t> schedule;        // strictly increasing
    std::vector<std::vector<double>> phi_at;  // [threshold][schedule]
    std::vector<double> phi_lower_est;        // per threshold: min over schedule
    std::vector<double> phi_upper_est;        // per threshold: max over schedule

    static DCProfile compute(const DistanceSeries& series,
                             std::vector<double> thresholds,
                             std::vector<std::size_t> schedule);

    // CSV schema: threshold, horizon, phi_n
    void write_csv(std::ostream& out) const;
};

struct DC1Witness {
    double threshold = 0.0;
    std::size_t horizon = 0;
    double value = 0.0;
};

struct DC1Verdict {
    double epsilon = 0.0;
    bool is_dc1_empirical = false;
    double tolerance = 0.0;
    // (a)-side: the binding threshold and the horizon where it peaks;
    // (b)-side: epsilon and the horizon where Phi^(n)(epsilon) dips lowest.
    DC1Witness proximal;
    DC1Witness distal;

    // CSV schema: epsilon, is_dc1, witness_t, witness_n, value (two rows).
    void write_csv(std::ostream& out) const;
};

// Empirical DC1 test: (a) every threshold reaches Phi^(n) >= 1 - tol at some
// scheduled horizon, and (b) Phi^(n)(epsilon) <= tol at some scheduled
// horizon. Threshold order is irrelevant (set semantics); epsilon must be a
// grid member; tol must lie in (0, 0.5).
DC1Verdict classify_dc1(const DistanceSeries& series, double epsilon,
                        std::vector<double> thresholds,
                        std::vector<std::size_t> schedule, double tol);

DC1Verdict classify_dc1(const SymbolStream& x, const SymbolStream& y, double epsilon,
                        const std::vector<double>& thresholds,
                        const std::vector<std::size_t>& schedule, double tol);

// {2^0, 2^-1, ..., 2^-k_max}, increasing.
std::vector<double> dyadic_thresholds(unsigned k_max);

// Log-spaced grid of `count` thresholds on [lo, hi], increasing.
std::vector<double> log_thresholds(double lo, double hi, std::size_t count);

// Default grid for planar orbits: 12 log-spaced values from 1e-3 up to the
// diameter of W_0 (the octagon of scale 1.5).
std::vector<double> ode_default_thresholds();

// n_l = l + 2^l for l = 1..l_max.
std::vector<std::size_t> horizon_schedule(unsigned l_max);

// The same schedule truncated to entries <= horizon.
std::vector<std::size_t> horizon_schedule_within(std::size_t horizon);

}  // namespace chaoskit
