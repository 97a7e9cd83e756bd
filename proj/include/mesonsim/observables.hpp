#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "mesonsim/hamiltonian.hpp"
#include "mesonsim/ising.hpp"
#include "mesonsim/state.hpp"

namespace mesonsim {

// Which quantities a trajectory records at each snapshot time.
struct ObservableSet {
    bool magnetization = true;
    bool correlations = false;
    bool domain_walls = false;
    bool keep_states = false;
};

struct Snapshot {
    std::vector<double> sz;    // per-site <sigma^z>
    std::vector<double> corr;  // row-major n x n connected correlations, if recorded
    double p_dw = 0.0;
};

// Time-indexed sequence of observable snapshots (optionally with states).
struct Trajectory {
    int n_sites = 0;
    std::vector<double> times;
    std::vector<Snapshot> snapshots;
    std::vector<StateVector> states;  // filled only when keep_states is set
};

// Exact per-site <sigma^z> from amplitudes (sz |bit=0> = +1).
std::vector<double> magnetization(const StateVector& state);

// Full connected correlation matrix C(i,j) = <z_i z_j> - <z_i><z_j>,
// row-major n x n. Diagonal = 1 - <z_i>^2.
std::vector<double> connected_correlation(const StateVector& state);

// p_dw = (1 - mean_{nn bonds} <z_i z_j>) / 2, over spec.nn_bonds.
double domain_wall_density(const StateVector& state, const IsingSpec& spec);

Snapshot record_snapshot(const StateVector& state, const IsingSpec& spec,
                         const ObservableSet& obs);

// C(d, t): connected correlation averaged over site pairs at separation d.
// Chains use graph distance (PBC: min(|i-j|, N-|i-j|)); ladders use
// intra-leg distance, averaged over both legs.
struct CorrelationMap {
    std::vector<double> times;
    std::vector<int> distances;              // ascending, d >= 0
    std::vector<std::vector<double>> values; // [time][distance]
};

CorrelationMap correlation_map_chain(const Trajectory& traj, Boundary boundary);
CorrelationMap correlation_map_ladder_intra_leg(const Trajectory& traj, int n_per_leg);

// First-arrival front fit. For each separation d >= 1, t*(d) is the first
// time with |C(d,t)| >= threshold; only the longest strictly increasing
// prefix of arrivals is kept (wrapped or boundary-reflected separations
// arrive out of order). The velocity is the slope of the least-squares fit
// of d versus t*. Throws FrontNotDetected when fewer than 4 usable
// separations cross the threshold.
struct FrontEstimate {
    double velocity = 0.0;
    double velocity_stderr = 0.0;
    std::vector<std::pair<int, double>> arrivals;  // (d, t*)
};

FrontEstimate light_cone_front(const CorrelationMap& map, double threshold = 0.05);

// Per-site <sigma^z> estimated from measured bitstrings (bit i of each
// word is site i; bit 0 means sz = +1).
std::vector<double> magnetization_from_bitstrings(const std::vector<std::uint64_t>& shots,
                                                  int n_sites);
double domain_wall_density_from_bitstrings(const std::vector<std::uint64_t>& shots,
                                           const IsingSpec& spec);

} // namespace mesonsim
