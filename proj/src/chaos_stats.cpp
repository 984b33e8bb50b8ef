#include "chaoskit/chaos_stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include "chaoskit/io_util.hpp"

namespace chaoskit {

DistanceSeries::DistanceSeries(std::vector<double> v) : values(std::move(v)) {
    for (double d : values)
        if (!(d >= 0.0) || !std::isfinite(d))
            throw ParameterError("distance series entries must be finite and nonnegative");
}

DistanceSeries DistanceSeries::between(const SymbolStream& x, const SymbolStream& y) {
    if (x.alphabet_size != y.alphabet_size)
        throw DimensionError("distance series needs equal alphabets");
    const std::size_t n = std::min(x.horizon, y.horizon);
    // next_dis[i] = least j >= i with x[j] != y[j], or n when none.
    std::vector<double> d(n, 0.0);
    std::size_t next_dis = n;
    for (std::size_t i = n; i-- > 0;) {
        if (x.at(i) != y.at(i)) next_dis = i;
        d[i] = (next_dis == n) ? 0.0 : std::ldexp(1.0, -static_cast<int>(next_dis - i));
    }
    return DistanceSeries(std::move(d));
}

DistanceSeries DistanceSeries::between(std::span<const std::complex<double>> x,
                                       std::span<const std::complex<double>> y) {
    if (x.size() != y.size())
        throw DimensionError("orbit samples must have equal length");
    std::vector<double> d(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) d[i] = std::abs(x[i] - y[i]);
    return DistanceSeries(std::move(d));
}

double phi_n(const DistanceSeries& series, double t) {
    if (series.values.empty()) throw DimensionError("phi_n on empty distance series");
    if (!(t > 0.0)) throw ParameterError("phi_n threshold must be positive");
    std::size_t count = 0;
    for (double d : series.values) count += (d < t);
    return static_cast<double>(count) / static_cast<double>(series.size());
}

namespace {

void check_schedule(const std::vector<std::size_t>& schedule, std::size_t available) {
    if (schedule.empty()) throw ParameterError("empty horizon schedule");
    for (std::size_t i = 0; i + 1 < schedule.size(); ++i)
        if (schedule[i] >= schedule[i + 1])
            throw ParameterError("horizon schedule must be strictly increasing");
    if (schedule.front() == 0) throw ParameterError("horizon schedule starts at zero");
    if (schedule.back() > available)
        throw DimensionError("horizon schedule exceeds available length");
}

double prefix_frequency_extreme(const std::vector<bool>& indicator,
                                const std::vector<std::size_t>& schedule, bool want_max) {
    check_schedule(schedule, indicator.size());
    double best = want_max ? -1.0 : 2.0;
    std::size_t count = 0, at = 0;
    for (std::size_t n : schedule) {
        for (; at < n; ++at) count += indicator[at];
        double freq = static_cast<double>(count) / static_cast<double>(n);
        best = want_max ? std::max(best, freq) : std::min(best, freq);
    }
    return best;
}

}  // namespace

double upper_density(const std::vector<bool>& indicator,
                     const std::vector<std::size_t>& schedule) {
    return prefix_frequency_extreme(indicator, schedule, true);
}

double lower_density(const std::vector<bool>& indicator,
                     const std::vector<std::size_t>& schedule) {
    return prefix_frequency_extreme(indicator, schedule, false);
}

DCProfile DCProfile::compute(const DistanceSeries& series, std::vector<double> thresholds,
                             std::vector<std::size_t> schedule) {
    if (thresholds.empty()) throw ParameterError("empty threshold grid");
    for (double t : thresholds)
        if (!(t > 0.0)) throw ParameterError("thresholds must be positive");
    std::sort(thresholds.begin(), thresholds.end());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
    std::sort(schedule.begin(), schedule.end());
    schedule.erase(std::unique(schedule.begin(), schedule.end()), schedule.end());
    check_schedule(schedule, series.size());

    DCProfile p;
    p.thresholds = std::move(thresholds);
    p.schedule = std::move(schedule);
    p.phi_at.assign(p.thresholds.size(), std::vector<double>(p.schedule.size(), 0.0));
    for (std::size_t ti = 0; ti < p.thresholds.size(); ++ti) {
        const double t = p.thresholds[ti];
        std::size_t count = 0, at = 0, si = 0;
        for (std::size_t n : p.schedule) {
            for (; at < n; ++at) count += (series.values[at] < t);
            p.phi_at[ti][si++] = static_cast<double>(count) / static_cast<double>(n);
        }
    }
    p.phi_lower_est.resize(p.thresholds.size());
    p.phi_upper_est.resize(p.thresholds.size());
    for (std::size_t ti = 0; ti < p.thresholds.size(); ++ti) {
        auto [lo, hi] = std::minmax_element(p.phi_at[ti].begin(), p.phi_at[ti].end());
        p.phi_lower_est[ti] = *lo;
        p.phi_upper_est[ti] = *hi;
    }
    return p;
}

void DCProfile::write_csv(std::ostream& out) const {
    out << "threshold,horizon,phi_n\n";
    for (std::size_t ti = 0; ti < thresholds.size(); ++ti)
        for (std::size_t si = 0; si < schedule.size(); ++si)
            out << io::num(thresholds[ti]) << ',' << schedule[si] << ','
                << io::num(phi_at[ti][si]) << "\n";
}

void DC1Verdict::write_csv(std::ostream& out) const {
    out << "epsilon,is_dc1,witness_t,witness_n,value\n";
    for (const DC1Witness* w : {&proximal, &distal})
        out << io::num(epsilon) << ',' << (is_dc1_empirical ? 1 : 0) << ','
            << io::num(w->threshold) << ',' << w->horizon << ',' << io::num(w->value)
            << "\n";
}

DC1Verdict classify_dc1(const DistanceSeries& series, double epsilon,
                        std::vector<double> thresholds,
                        std::vector<std::size_t> schedule, double tol) {
    if (!(tol > 0.0 && tol < 0.5))
        throw ParameterError("classification tolerance must lie in (0, 0.5)");
    DCProfile profile = DCProfile::compute(series, std::move(thresholds), std::move(schedule));
    auto eps_it = std::find(profile.thresholds.begin(), profile.thresholds.end(), epsilon);
    if (eps_it == profile.thresholds.end())
        throw ParameterError("epsilon must be a member of the threshold grid");
    const std::size_t eps_idx =
        static_cast<std::size_t>(eps_it - profile.thresholds.begin());

    DC1Verdict v;
    v.epsilon = epsilon;
    v.tolerance = tol;

    // (a): every threshold must peak at >= 1 - tol somewhere on the schedule.
    bool proximal_ok = true;
    v.proximal = {0.0, 0, 2.0};
    for (std::size_t ti = 0; ti < profile.thresholds.size(); ++ti) {
        std::size_t best = 0;
        for (std::size_t si = 1; si < profile.schedule.size(); ++si)
            if (profile.phi_at[ti][si] > profile.phi_at[ti][best]) best = si;
        const double peak = profile.phi_at[ti][best];
        proximal_ok = proximal_ok && (peak >= 1.0 - tol);
        if (peak < v.proximal.value)
            v.proximal = {profile.thresholds[ti], profile.schedule[best], peak};
    }

    // (b): Phi^(n)(epsilon) must dip to <= tol somewhere on the schedule.
    std::size_t dip = 0;
    for (std::size_t si = 1; si < profile.schedule.size(); ++si)
        if (profile.phi_at[eps_idx][si] < profile.phi_at[eps_idx][dip]) dip = si;
    v.distal = {epsilon, profile.schedule[dip], profile.phi_at[eps_idx][dip]};
    const bool distal_ok = v.distal.value <= tol;

    v.is_dc1_empirical = proximal_ok && distal_ok;
    return v;
}

DC1Verdict classify_dc1(const SymbolStream& x, const SymbolStream& y, double epsilon,
                        const std::vector<double>& thresholds,
                        const std::vector<std::size_t>& schedule, double tol) {
    if (x.horizon != y.horizon)
        throw DimensionError("classify_dc1 expects orbits of equal length");
    return classify_dc1(DistanceSeries::between(x, y), epsilon, thresholds, schedule, tol);
}

std::vector<double> dyadic_thresholds(unsigned k_max) {
    std::vector<double> t;
    for (unsigned k = 0; k <= k_max; ++k) t.push_back(std::ldexp(1.0, -int(k)));
    std::sort(t.begin(), t.end());
    return t;
}

std::vector<double> log_thresholds(double lo, double hi, std::size_t count) {
    if (!(lo > 0.0 && hi > lo)) throw ParameterError("log grid needs 0 < lo < hi");
    if (count < 2) throw ParameterError("log grid needs at least two thresholds");
    std::vector<double> t(count);
    for (std::size_t i = 0; i < count; ++i)
        t[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1));
    t.front() = lo;
    t.back() = hi;
    return t;
}

std::vector<double> ode_default_thresholds() {
    // Diameter of W_0: twice the circumradius of the octagon with scale 1.5.
    const double diameter = 2.0 * 1.5 / std::cos(std::numbers::pi / 8.0);
    return log_thresholds(1e-3, diameter, 12);
}

std::vector<std::size_t> horizon_schedule(unsigned l_max) {
    std::vector<std::size_t> s;
    for (unsigned l = 1; l <= l_max; ++l) s.push_back(std::size_t(l) + (std::size_t(1) << l));
    return s;
}

std::vector<std::size_t> horizon_schedule_within(std::size_t horizon) {
    std::vector<std::size_t> s;
    for (unsigned l = 1; l < 63; ++l) {
        std::size_t n = std::size_t(l) + (std::size_t(1) << l);
        if (n > horizon) break;
        s.push_back(n);
    }
    if (s.empty()) throw ParameterError("horizon too small for any schedule entry");
    return s;
}

}  // namespace chaoskit
