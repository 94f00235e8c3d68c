#ifndef ATLAS_SWEEP_HPP
#define ATLAS_SWEEP_HPP

#include <string>
#include <vector>

#include "atlas/integrate.hpp"
#include "atlas/mesh.hpp"
#include "atlas/models.hpp"

namespace atlas {

enum class InitialStatePolicy {
    fixed,              // every cell starts from the same state
    previous_cell,      // cells inherit the previous cell's final state, row by row
};

struct SCConfig {
    double t_transient = 1000.0;   // discarded settle time
    double t_observe = 2000.0;     // observation window
    double x_threshold = 0.0;      // spike = up-crossing of the fast variable
    double return_tol = 1e-5;      // Poincare near-return tolerance (scaled norm)
    int max_spikes = 64;           // spikes-per-period cap
    InitialStatePolicy policy = InitialStatePolicy::fixed;
    State3 initial_state{-1.6, 4.0, 0.0};
    IntegratorConfig integ;

    void validate() const;
};

enum class SCClass { equilibrium, periodic, chaotic_unresolved, blow_up };

std::string sc_class_token(SCClass c);
SCClass parse_sc_class(const std::string& token);

struct SpikeCountResult {
    SCClass cls = SCClass::chaotic_unresolved;
    int spikes = 0;      // valid iff periodic
    double period = 0.0; // valid iff periodic
};

// Settles through t_transient, observes spikes as threshold up-crossings of
// the fast variable over t_observe, and detects periodicity by near-return of
// the full state on the spike section.
SpikeCountResult count_spikes(const ModelParams& params, const SCConfig& cfg);

struct AxisSpec {
    std::string name;
    double lo = 0.0, hi = 1.0;
};

struct SliceSpec {
    ModelParams base;  // fixed parameters, including eps
    AxisSpec axis1, axis2;
};

struct SpikeGrid {
    SliceSpec slice;
    int nx = 0, ny = 0;
    std::vector<SpikeCountResult> cells;  // row-major, index = j*nx + i

    const SpikeCountResult& at(int i, int j) const { return cells[static_cast<size_t>(j) * nx + i]; }
    // cell centers
    double coord1(int i) const {
        return slice.axis1.lo + (i + 0.5) * (slice.axis1.hi - slice.axis1.lo) / nx;
    }
    double coord2(int j) const {
        return slice.axis2.lo + (j + 0.5) * (slice.axis2.hi - slice.axis2.lo) / ny;
    }
    int distinct_positive_spike_counts() const;
};

// Evaluates count_spikes at every cell center. Deterministic and
// bit-identical for any worker count; with the previous-cell policy rows are
// swept left to right, each row seeded from the fixed initial state.
SpikeGrid sc_sweep(const SliceSpec& slice, int nx, int ny, const SCConfig& cfg, int workers = 1);

// Marching-squares boundary between n-spike and (n+1)-spike periodic cells.
// Vertices lie on grid edges whose endpoint counts are exactly n and n+1;
// closed polylines are isolas. The slice's fixed eps becomes the third
// coordinate.
std::vector<Polyline3> find_sc_boundary(const SpikeGrid& grid, int n);

}  // namespace atlas

#endif
