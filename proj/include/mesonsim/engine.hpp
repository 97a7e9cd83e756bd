#pragma once

#include <vector>

#include "mesonsim/hamiltonian.hpp"
#include "mesonsim/ising.hpp"
#include "mesonsim/observables.hpp"
#include "mesonsim/state.hpp"

namespace mesonsim {

// Piecewise-linear uniform field schedule, in the model frame of the spec
// it is applied to (build_tfic argument convention). Optional per-site
// offsets are added on top of the uniform values.
struct Schedule {
    struct Segment {
        double duration;  // tJ, > 0
        double hx_start, hx_end;
        double hz_start, hz_end;
    };
    std::vector<Segment> segments;
    std::vector<double> hx_site_offset;  // empty or n_sites
    std::vector<double> hz_site_offset;

    double total_duration() const;
    // Uniform (hx, hz) at time t in [0, total_duration].
    std::pair<double, double> fields_at(double t) const;

    static Schedule constant(double hx, double hz, double duration);
    // Ramp hz from hz0 to hz1 over ramp_duration, then hold (hx constant
    // throughout): the two-stage quench protocol.
    static Schedule two_stage(double hx, double hz0, double hz1, double ramp_duration,
                              double hold_duration);
};

struct GroundStateResult {
    double energy = 0.0;
    StateVector state;
    int iterations = 0;
    double residual = 0.0;
};

// Lowest eigenpair via thick-restart Lanczos (real arithmetic; H is real
// in the z basis). Residual ||H psi - E0 psi|| < tol on return.
GroundStateResult ground_state(const IsingSpec& spec, double tol = 1e-9, int max_iter = 5000);

// exp(-i H dt) |state> by adaptive short-iterative Lanczos (dimension up
// to 40, automatic sub-stepping). tol is the total error budget for dt.
StateVector evolve_constant(const HamiltonianOp& op, const StateVector& state, double dt,
                            double tol = 1e-10);
StateVector evolve_constant(const IsingSpec& spec, const StateVector& state, double dt,
                            double tol = 1e-10);

// Piecewise propagation: ramps discretized with midpoint fields at
// micro_step resolution; snapshots recorded at the grid times.
Trajectory evolve_schedule(const IsingSpec& spec_base, const Schedule& schedule,
                           const StateVector& initial, const std::vector<double>& grid,
                           const ObservableSet& obs = {}, double micro_step = 0.01,
                           double tol = 1e-10);

// Quench from |00...0> under a constant spec, observables on the grid.
Trajectory quench_all_zeros(const IsingSpec& spec, const std::vector<double>& grid,
                            const ObservableSet& obs = {}, double tol = 1e-10);

// n_points uniformly spaced times over [0, t_max], endpoints included.
std::vector<double> uniform_grid(double t_max, int n_points = 200);

// <state|H|state>, real part.
double energy_expectation(const HamiltonianOp& op, const StateVector& state);

} // namespace mesonsim
