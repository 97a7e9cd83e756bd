#include <random>

#include "dense_oracle.hpp"
#include "doctest.h"
#include "mesonsim/engine.hpp"
#include "mesonsim/errors.hpp"

using namespace mesonsim;

TEST_CASE("krylov propagation matches the dense matrix exponential") {
    std::mt19937_64 rng(11);
    for (int rep = 0; rep < 3; ++rep) {
        const IsingSpec spec = oracle::random_spec(6, rng);
        const StateVector psi0 = all_zeros_state(6);
        const StateVector got = evolve_constant(spec, psi0, 1.0, 1e-12);
        const StateVector want = oracle::dense_evolve(spec, psi0, 1.0);
        CHECK(fidelity(got, want) >= 1.0 - 1e-10);
        CHECK(std::abs(norm(got) - 1.0) < 1e-10);
    }
}

TEST_CASE("energy and norm are conserved along a quench") {
    const IsingSpec spec = build_tfic(8, 1.0, 0.4, Boundary::PBC);
    const HamiltonianOp op(spec);
    StateVector psi = all_zeros_state(8);
    const double e0 = energy_expectation(op, psi);
    for (int step = 0; step < 10; ++step) {
        psi = evolve_constant(op, psi, 0.5, 1e-11);
        CHECK(std::abs(norm(psi) - 1.0) < 1e-9);
        CHECK(std::abs(energy_expectation(op, psi) - e0) < 1e-8);
    }
}

TEST_CASE("ground state agrees with dense diagonalization") {
    const IsingSpec spec = build_tfic(8, 1.2, 0.3, Boundary::PBC);
    const GroundStateResult gs = ground_state(spec, 1e-10);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(oracle::dense_hamiltonian(spec),
                                                      Eigen::EigenvaluesOnly);
    CHECK(gs.energy == doctest::Approx(es.eigenvalues()(0)).epsilon(1e-10));
    CHECK(gs.residual < 1e-10);
    CHECK(std::abs(norm(gs.state) - 1.0) < 1e-12);
}

TEST_CASE("two-stage schedule fields") {
    const Schedule s = Schedule::two_stage(1.0, 0.0, 4.0, 0.4, 3.6);
    CHECK(s.total_duration() == doctest::Approx(4.0));
    CHECK(s.fields_at(0.0).second == doctest::Approx(0.0));
    CHECK(s.fields_at(0.2).second == doctest::Approx(2.0));
    CHECK(s.fields_at(0.4).second == doctest::Approx(4.0));
    CHECK(s.fields_at(3.0).second == doctest::Approx(4.0));
    for (double t : {0.0, 0.2, 1.0, 4.0}) CHECK(s.fields_at(t).first == doctest::Approx(1.0));
}

TEST_CASE("schedule evolution reduces to the constant propagator") {
    const IsingSpec base = build_tfic(6, 0.0, 0.0, Boundary::PBC);
    const Schedule sched = Schedule::constant(1.0, 0.6, 2.0);
    const std::vector<double> grid = {0.5, 1.0, 2.0};
    ObservableSet obs;
    obs.keep_states = true;
    const Trajectory traj =
        evolve_schedule(base, sched, all_zeros_state(6), grid, obs, 0.01, 1e-11);

    const IsingSpec full = build_tfic(6, 1.0, 0.6, Boundary::PBC);
    StateVector ref = all_zeros_state(6);
    double cur = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        ref = evolve_constant(full, ref, grid[i] - cur, 1e-12);
        cur = grid[i];
        CHECK(fidelity(traj.states[i], ref) >= 1.0 - 1e-9);
    }
}

TEST_CASE("ramped schedule matches a dense piecewise reference") {
    // Fine piecewise-constant dense integration as an independent oracle
    // for the midpoint-ramp discretization.
    const IsingSpec base = build_tfic(5, 0.0, 0.0, Boundary::OBC);
    const Schedule sched = Schedule::two_stage(1.0, 0.0, 2.0, 1.0, 0.5);
    ObservableSet obs;
    obs.keep_states = true;
    const std::vector<double> grid = {1.5};
    const Trajectory traj =
        evolve_schedule(base, sched, all_zeros_state(5), grid, obs, 0.005, 1e-11);

    StateVector ref = all_zeros_state(5);
    const int steps = 3000;
    const double dt = 1.5 / steps;
    for (int k = 0; k < steps; ++k) {
        const auto [hx, hz] = sched.fields_at((k + 0.5) * dt);
        ref = oracle::dense_evolve(build_tfic(5, hx, hz, Boundary::OBC), ref, dt);
    }
    CHECK(fidelity(traj.states[0], ref) >= 1.0 - 1e-6);
}

TEST_CASE("quench grid bookkeeping") {
    const auto grid = uniform_grid(2.0, 4);
    REQUIRE(grid.size() == 4);
    CHECK(grid.front() == doctest::Approx(0.0));
    CHECK(grid[1] == doctest::Approx(2.0 / 3.0));
    CHECK(grid.back() == doctest::Approx(2.0));

    const IsingSpec spec = build_tfic(4, 1.0, 0.0, Boundary::PBC);
    const Trajectory traj = quench_all_zeros(spec, grid);
    REQUIRE(traj.times.size() == 4);
    REQUIRE(traj.snapshots.size() == 4);
    CHECK(traj.snapshots[0].sz.size() == 4);
}
