#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "chaoskit/segments.hpp"
#include "chaoskit/shift.hpp"

namespace chaoskit {

// Per-period symbol record of an orbit against the segments W and U:
// 0 when the orbit stays in U_t through the whole open period, otherwise the
// index of the exit component E[k] it leaves U through. A symbol is emitted
// at the moment of the U-exit, so an orbit that later leaves W in the same
// period still carries that period's symbol.
struct Itinerary {
    Word symbols;  // over {0,1,2,3,4}
    std::size_t periods_covered = 0;
    enum class End { Completed, LeftW, Escape } terminated_by = End::Completed;
    std::size_t max_exits_in_period = 0;  // outward U-crossings, for the
                                          // at-most-once check
    std::size_t entrance_anomalies = 0;   // exits classified on an entrance face

    std::string termination_tag() const;
};

struct ItineraryOptions {
    std::size_t grid_per_period = 1000;  // membership checks per period
    double time_tol = 1e-9;              // crossing bisection tolerance
};

Itinerary itinerary(Complex z, std::size_t n_periods, const ProcessParams& p,
                    const FlowOptions& flow_opts = {},
                    const ItineraryOptions& opts = {});

struct SemiconjugacyReport {
    bool ok = false;
    long mismatch_period = -1;  // -1 when none
    Word word_z;                // n_periods + 1 symbols of z
    Word word_pz;               // n_periods symbols of P_T(z)
    bool pi_allowed = false;
};

// Checks sigma(g(z)) = g(P_T(z)) symbol-for-symbol over n_periods symbols and
// that the itinerary word is allowed in the shift Pi.
SemiconjugacyReport verify_semiconjugacy(Complex z, std::size_t n_periods,
                                         const ProcessParams& p,
                                         const FlowOptions& flow_opts = {},
                                         const ItineraryOptions& opts = {});

struct CensusCell {
    double re = 0.0, im = 0.0;
    bool in_grid = false;    // cell center inside V(r)_0
    bool survived = false;   // stayed in U for all n_periods
    int exit_period = -1;    // period of the first U-exit
    int exit_component = 0;  // E[k] component of that exit
};

struct CensusCluster {
    std::size_t size = 0;
    Complex centroid;
    double dist_to_center = 0.0;  // to the nearest M*P<k> (or to 0 when N = 0)
    int nearest_center = 0;
};

struct CensusReport {
    unsigned resolution = 0;
    std::size_t n_periods = 0;
    std::vector<CensusCell> cells;  // row-major over the grid square
    std::size_t survivor_count = 0;
    std::vector<CensusCluster> clusters;
    std::size_t annulus_samples = 0;  // starts in (U \ V(r))_0
    std::size_t annulus_left = 0;     // of those, how many left U in time

    // CSV schema: re, im, survived, exit_period, exit_component
    void write_csv(std::ostream& out) const;
    std::string render_svg() const;
};

struct CensusOptions {
    std::size_t annulus_samples = 1000;
    unsigned threads = 0;  // 0 = hardware concurrency
    std::uint64_t seed = 1;
    double substep_fraction = 1.0 / 200.0;  // membership check spacing
};

// Grid census over V(r)_0: integrates every cell center for n_periods and
// records whether the orbit stayed in U throughout; survivors are clustered
// (8-neighborhood) and located against the cube-root centers. Also samples
// the annulus (U \ V(r))_0 and counts how many starts leave U in time.
CensusReport census_g_inverse_zero(const ProcessParams& p, unsigned grid_resolution,
                                   std::size_t n_periods, const FlowOptions& flow_opts = {},
                                   const CensusOptions& opts = {});

}  // namespace chaoskit
