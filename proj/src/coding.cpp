#include "chaoskit/coding.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <ostream>
#include <random>
#include <thread>

#include "chaoskit/io_util.hpp"

namespace chaoskit {

namespace {

// Exit component of a U-crossing; corners resolve to their exit face.
int exit_component_of(const BoundaryClassification& cls, std::size_t& anomalies) {
    const FaceClass* candidates[2] = {&cls.face, nullptr};
    if (cls.where == BoundaryClassification::Where::OnCorner) candidates[1] = &cls.face2;
    for (const FaceClass* fc : candidates)
        if (fc && fc->role == FaceRole::Exit && fc->exit_component > 0)
            return fc->exit_component;
    // Entrance-side classification of an outward crossing: count it and fall
    // back to the nearest exit face by octagon angle.
    anomalies++;
    const int face = cls.face.face;
    const int lower = (face / 2) * 2;
    return (lower % 8) / 2 + 1;
}

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn) {
    unsigned n = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
    n = std::min<unsigned>(n, 16);
    if (n <= 1 || count < 2) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < n; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
        });
    for (auto& th : pool) th.join();
}

}  // namespace

std::string Itinerary::termination_tag() const {
    switch (terminated_by) {
        case End::Completed: return "completed";
        case End::LeftW: return "left_W";
        case End::Escape: return "escape";
    }
    return "?";
}

Itinerary itinerary(Complex z, std::size_t n_periods, const ProcessParams& p,
                    const FlowOptions& flow_opts, const ItineraryOptions& opts) {
    const Segment w_seg = Segment::make_w(p);
    const Segment u_seg = Segment::make_u(p);
    if (!w_seg.contains(0.0, z))
        throw ParameterError("itinerary start must lie in W_0");

    const double T = p.period();
    const double dt = T / static_cast<double>(opts.grid_per_period);

    Itinerary it;
    double t = 0.0;
    Complex zt = z;

    for (std::size_t period = 0; period < n_periods; ++period) {
        bool in_u = true;  // every period starts in U_0 = W_0
        int symbol = 0;
        std::size_t exits_this_period = 0;
        const double period_end = static_cast<double>(period + 1) * T;

        // Classifies the first U-crossing inside [t, t+step] from state zt.
        // Probes past the bailout radius count as outside.
        auto classify_u_exit = [&](double t0, Complex z0, double step) {
            auto probe_inside = [&](double dt_probe) {
                try {
                    return u_seg.contains(t0 + dt_probe, flow(t0, dt_probe, z0, p, flow_opts));
                } catch (const EscapeError&) {
                    return false;
                }
            };
            double lo = 0.0, hi = step;
            while (hi - lo > opts.time_tol) {
                const double mid = 0.5 * (lo + hi);
                if (probe_inside(mid))
                    lo = mid;
                else
                    hi = mid;
            }
            const Complex zc = flow(t0, 0.5 * (lo + hi), z0, p, flow_opts);
            const double fat_tol = std::max(
                1e-9,
                100.0 * opts.time_tol * (1.0 + std::abs(vector_field(t0 + hi, zc, p))));
            BoundaryClassification cls = classify_boundary(u_seg, t0 + hi, zc, fat_tol);
            if (cls.where != BoundaryClassification::Where::OnFace &&
                cls.where != BoundaryClassification::Where::OnCorner) {
                cls.where = BoundaryClassification::Where::OnFace;
                // Nearest face by violation.
                double best = -1e300;
                int best_face = 0;
                for (int k = 0; k < 8; ++k) {
                    const double g = (zc * std::conj(Octagon::face_normal(k))).real() -
                                     u_seg.profile.value(std::fmod(t0 + hi, T));
                    if (g > best) {
                        best = g;
                        best_face = k;
                    }
                }
                cls.face = u_seg.classify_face(best_face);
            }
            return cls;
        };

        while (t < period_end - 0.5 * opts.time_tol) {
            const double step = std::min(dt, period_end - t);
            Complex znext;
            try {
                znext = flow(t, step, zt, p, flow_opts);
            } catch (const EscapeError&) {
                // The bailout radius lies far outside W, so the orbit left W
                // inside this substep; if it was still in U, that crossing
                // came first and still yields the period's symbol.
                if (in_u) {
                    BoundaryClassification cls = classify_u_exit(t, zt, step);
                    exits_this_period++;
                    if (exits_this_period == 1)
                        symbol = exit_component_of(cls, it.entrance_anomalies);
                }
                it.terminated_by = Itinerary::End::LeftW;
                it.periods_covered = period;
                if (symbol != 0) it.symbols.symbols.push_back(Symbol(symbol));
                it.max_exits_in_period = std::max(it.max_exits_in_period, exits_this_period);
                return it;
            }
            const double tnext = t + step;
            const bool w_next = w_seg.contains(tnext, znext);
            const bool u_next = u_seg.contains(tnext, znext) && w_next;
            if (in_u && !u_next) {
                // The orbit left U inside this substep; U_t lies inside W_t,
                // so this crossing precedes any W-exit in the same substep.
                BoundaryClassification cls = classify_u_exit(t, zt, step);
                exits_this_period++;
                if (exits_this_period == 1)
                    symbol = exit_component_of(cls, it.entrance_anomalies);
            }
            if (!w_next) {
                it.terminated_by = Itinerary::End::LeftW;
                it.periods_covered = period;
                if (symbol != 0) it.symbols.symbols.push_back(Symbol(symbol));
                it.max_exits_in_period = std::max(it.max_exits_in_period, exits_this_period);
                return it;
            }
            in_u = u_next;
            t = tnext;
            zt = znext;
        }
        it.symbols.symbols.push_back(Symbol(symbol));
        it.periods_covered = period + 1;
        it.max_exits_in_period = std::max(it.max_exits_in_period, exits_this_period);
    }
    it.terminated_by = Itinerary::End::Completed;
    return it;
}

SemiconjugacyReport verify_semiconjugacy(Complex z, std::size_t n_periods,
                                         const ProcessParams& p,
                                         const FlowOptions& flow_opts,
                                         const ItineraryOptions& opts) {
    Itinerary base = itinerary(z, n_periods + 1, p, flow_opts, opts);
    if (base.terminated_by != Itinerary::End::Completed)
        throw ParameterError("semiconjugacy check needs an orbit completing n+1 periods");
    const Complex pz = poincare(z, p, flow_opts);
    Itinerary shifted = itinerary(pz, n_periods, p, flow_opts, opts);

    SemiconjugacyReport rep;
    rep.word_z = base.symbols;
    rep.word_pz = shifted.symbols;
    rep.ok = shifted.terminated_by == Itinerary::End::Completed &&
             shifted.symbols.size() == n_periods;
    if (rep.ok) {
        for (std::size_t i = 0; i < n_periods; ++i)
            if (base.symbols[i + 1] != shifted.symbols[i]) {
                rep.ok = false;
                rep.mismatch_period = static_cast<long>(i);
                break;
            }
    }
    static const SoficShift pi_shift = build_pi_shift();
    rep.pi_allowed = pi_shift.word_allowed(base.symbols);
    rep.ok = rep.ok && rep.pi_allowed;
    return rep;
}

namespace {

struct UExitProbe {
    bool survived = true;
    int exit_period = -1;
    int exit_component = 0;
};

// Follows the orbit until it leaves U or completes n_periods.
UExitProbe probe_u_residence(Complex z, std::size_t n_periods, const ProcessParams& p,
                             const Segment& u_seg, const FlowOptions& flow_opts,
                             double substep, double time_tol) {
    UExitProbe res;
    double t = 0.0;
    Complex zt = z;
    const double t_end = static_cast<double>(n_periods) * p.period();
    std::size_t anomalies = 0;
    while (t < t_end) {
        const double step = std::min(substep, t_end - t);
        bool outside = false;
        Complex znext;
        try {
            znext = flow(t, step, zt, p, flow_opts);
            outside = !u_seg.contains(t + step, znext);
        } catch (const EscapeError&) {
            outside = true;  // bailout radius is far outside U
        }
        if (outside) {
            auto probe_inside = [&](double dtp) {
                try {
                    return u_seg.contains(t + dtp, flow(t, dtp, zt, p, flow_opts));
                } catch (const EscapeError&) {
                    return false;
                }
            };
            double lo = 0.0, hi = step;
            while (hi - lo > time_tol) {
                const double mid = 0.5 * (lo + hi);
                if (probe_inside(mid))
                    lo = mid;
                else
                    hi = mid;
            }
            const Complex zc = flow(t, 0.5 * (lo + hi), zt, p, flow_opts);
            const double fat_tol = std::max(
                1e-9, 100.0 * time_tol * (1.0 + std::abs(vector_field(t + hi, zc, p))));
            BoundaryClassification cls = classify_boundary(u_seg, t + hi, zc, fat_tol);
            res.survived = false;
            res.exit_period = static_cast<int>((t + hi) / p.period());
            if (cls.where == BoundaryClassification::Where::OnFace ||
                cls.where == BoundaryClassification::Where::OnCorner)
                res.exit_component = exit_component_of(cls, anomalies);
            return res;
        }
        t += step;
        zt = znext;
    }
    return res;
}

}  // namespace

void CensusReport::write_csv(std::ostream& out) const {
    out << "re,im,survived,exit_period,exit_component\n";
    for (const CensusCell& c : cells) {
        if (!c.in_grid) continue;
        out << io::num(c.re) << ',' << io::num(c.im) << ',' << (c.survived ? 1 : 0) << ','
            << c.exit_period << ',' << c.exit_component << "\n";
    }
}

std::string CensusReport::render_svg() const {
    const double px = 2.0;
    io::SvgCanvas svg(resolution * px, resolution * px);
    for (unsigned row = 0; row < resolution; ++row)
        for (unsigned col = 0; col < resolution; ++col) {
            const CensusCell& c = cells[std::size_t(row) * resolution + col];
            if (!c.in_grid) continue;
            std::string fill = "#d9d9d9";
            if (c.survived)
                fill = "#b40426";
            else if (c.exit_period >= 1)
                fill = (c.exit_period == 1) ? "#6788ee" : "#3b4cc0";
            svg.rect(col * px, (resolution - 1 - row) * px, px, px, fill);
        }
    svg.text(4, 12, "census: red = stayed in U, blue = exit in period >= 1");
    return svg.render();
}

CensusReport census_g_inverse_zero(const ProcessParams& p, unsigned grid_resolution,
                                   std::size_t n_periods, const FlowOptions& flow_opts,
                                   const CensusOptions& opts) {
    if (grid_resolution < 2) throw ParameterError("census grid resolution too small");
    if (n_periods < 3) throw ParameterError("census needs n_periods >= 3");

    const Segment u_seg = Segment::make_u(p);
    const SProfile prof(p.period());
    const Octagon inner(prof.r);
    const Octagon outer(prof.R);
    const double substep = p.period() * opts.substep_fraction;
    const double time_tol = 1e-9;

    CensusReport rep;
    rep.resolution = grid_resolution;
    rep.n_periods = n_periods;
    rep.cells.assign(std::size_t(grid_resolution) * grid_resolution, CensusCell{});

    const double lo = -prof.r, hi = prof.r;
    const double cell = (hi - lo) / static_cast<double>(grid_resolution);
    for (unsigned row = 0; row < grid_resolution; ++row)
        for (unsigned col = 0; col < grid_resolution; ++col) {
            CensusCell& c = rep.cells[std::size_t(row) * grid_resolution + col];
            c.re = lo + (col + 0.5) * cell;
            c.im = lo + (row + 0.5) * cell;
            c.in_grid = inner.contains(Complex(c.re, c.im));
        }

    parallel_for(rep.cells.size(), opts.threads, [&](std::size_t i) {
        CensusCell& c = rep.cells[i];
        if (!c.in_grid) return;
        UExitProbe probe = probe_u_residence(Complex(c.re, c.im), n_periods, p, u_seg,
                                             flow_opts, substep, time_tol);
        c.survived = probe.survived;
        c.exit_period = probe.exit_period;
        c.exit_component = probe.exit_component;
    });

    for (const CensusCell& c : rep.cells)
        if (c.in_grid && c.survived) rep.survivor_count++;

    // Cluster survivors over the 8-neighborhood.
    const auto idx = [&](unsigned row, unsigned col) {
        return std::size_t(row) * grid_resolution + col;
    };
    std::vector<int> cluster_of(rep.cells.size(), -1);
    CubeRootFrame frame(p);
    for (unsigned row = 0; row < grid_resolution; ++row)
        for (unsigned col = 0; col < grid_resolution; ++col) {
            const std::size_t start = idx(row, col);
            const CensusCell& c0 = rep.cells[start];
            if (!c0.in_grid || !c0.survived || cluster_of[start] >= 0) continue;
            const int id = static_cast<int>(rep.clusters.size());
            CensusCluster cl;
            std::vector<std::size_t> stack{start};
            cluster_of[start] = id;
            Complex sum(0, 0);
            while (!stack.empty()) {
                const std::size_t at = stack.back();
                stack.pop_back();
                cl.size++;
                const CensusCell& cc = rep.cells[at];
                sum += Complex(cc.re, cc.im);
                const unsigned r0 = static_cast<unsigned>(at / grid_resolution);
                const unsigned c0i = static_cast<unsigned>(at % grid_resolution);
                for (int dr = -1; dr <= 1; ++dr)
                    for (int dc = -1; dc <= 1; ++dc) {
                        if (dr == 0 && dc == 0) continue;
                        const long rr = long(r0) + dr, ccol = long(c0i) + dc;
                        if (rr < 0 || ccol < 0 || rr >= long(grid_resolution) ||
                            ccol >= long(grid_resolution))
                            continue;
                        const std::size_t nb = idx(unsigned(rr), unsigned(ccol));
                        if (rep.cells[nb].in_grid && rep.cells[nb].survived &&
                            cluster_of[nb] < 0) {
                            cluster_of[nb] = id;
                            stack.push_back(nb);
                        }
                    }
            }
            cl.centroid = sum / static_cast<double>(cl.size);
            if (p.n_param > 0.0) {
                cl.dist_to_center = 1e300;
                for (int k = 0; k < 3; ++k) {
                    const double d = std::abs(cl.centroid - frame.center(k));
                    if (d < cl.dist_to_center) {
                        cl.dist_to_center = d;
                        cl.nearest_center = k;
                    }
                }
            } else {
                cl.dist_to_center = std::abs(cl.centroid);
                cl.nearest_center = 0;
            }
            rep.clusters.push_back(cl);
        }

    // Step (v) evidence: starts in the annulus (U \ V(r))_0 must leave U.
    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> unif(-outer.circumradius(), outer.circumradius());
    std::vector<Complex> annulus;
    while (annulus.size() < opts.annulus_samples) {
        const Complex z(unif(rng), unif(rng));
        if (outer.contains(z) && !inner.contains(z)) annulus.push_back(z);
    }
    rep.annulus_samples = annulus.size();
    std::atomic<std::size_t> left{0};
    parallel_for(annulus.size(), opts.threads, [&](std::size_t i) {
        UExitProbe probe = probe_u_residence(annulus[i], n_periods, p, u_seg, flow_opts,
                                             substep, time_tol);
        if (!probe.survived) left.fetch_add(1);
    });
    rep.annulus_left = left.load();
    return rep;
}

}  // namespace chaoskit
