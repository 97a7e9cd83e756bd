#include <cmath>

#include "doctest.h"
#include "mesonsim/errors.hpp"
#include "mesonsim/ising.hpp"
#include "mesonsim/observables.hpp"
#include "mesonsim/state.hpp"

using namespace mesonsim;

TEST_CASE("magnetization of basis states") {
    // |b=5> = bits 0 and 2 set -> sz = -1 on sites 0 and 2.
    const StateVector psi = basis_state(3, 5);
    const auto m = magnetization(psi);
    CHECK(m[0] == doctest::Approx(-1.0));
    CHECK(m[1] == doctest::Approx(+1.0));
    CHECK(m[2] == doctest::Approx(-1.0));
}

TEST_CASE("connected correlations") {
    // Product states have zero connected off-diagonal correlations.
    const auto c_prod = connected_correlation(basis_state(3, 5));
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(std::abs(c_prod[i * 3 + j]) < 1e-14);

    // GHZ-like (|00> + |11>)/sqrt(2): <z_i> = 0, <z_0 z_1> = 1.
    StateVector ghz;
    ghz.n_sites = 2;
    ghz.amp = {cplx(std::sqrt(0.5), 0), 0, 0, cplx(std::sqrt(0.5), 0)};
    const auto c = connected_correlation(ghz);
    CHECK(c[0 * 2 + 1] == doctest::Approx(1.0));
    CHECK(c[0 * 2 + 0] == doctest::Approx(1.0));  // 1 - <z>^2
}

TEST_CASE("domain wall density") {
    const IsingSpec spec = build_tfic(4, 1.0, 0.0, Boundary::PBC);
    CHECK(domain_wall_density(all_zeros_state(4), spec) == doctest::Approx(0.0));
    // Neel pattern 0101 -> every one of the 4 PBC bonds is a wall.
    CHECK(domain_wall_density(basis_state(4, 0b0101), spec) == doctest::Approx(1.0));
    // Single flipped site -> 2 walls out of 4 bonds.
    CHECK(domain_wall_density(basis_state(4, 0b0001), spec) == doctest::Approx(0.5));

    IsingSpec none = spec;
    none.nn_bonds.clear();
    CHECK_THROWS_AS(domain_wall_density(all_zeros_state(4), none), ConfigInvalid);
}

TEST_CASE("bitstring estimators agree with exact values on deterministic shots") {
    const IsingSpec spec = build_tfic(4, 1.0, 0.0, Boundary::PBC);
    const std::vector<std::uint64_t> shots(100, 0b0101);
    const auto m = magnetization_from_bitstrings(shots, 4);
    CHECK(m[0] == doctest::Approx(-1.0));
    CHECK(m[1] == doctest::Approx(+1.0));
    CHECK(domain_wall_density_from_bitstrings(shots, spec) == doctest::Approx(1.0));
}

namespace {

// Synthetic map: |C(d, t)| crosses 0.05 at t = d / v exactly.
CorrelationMap synthetic_map(double v, int dmax, double t_max, double dt) {
    CorrelationMap map;
    for (double t = 0.0; t <= t_max + 1e-12; t += dt) map.times.push_back(t);
    for (int d = 0; d <= dmax; ++d) map.distances.push_back(d);
    map.values.resize(map.times.size());
    for (std::size_t it = 0; it < map.times.size(); ++it)
        for (int d = 0; d <= dmax; ++d)
            map.values[it].push_back(map.times[it] * v >= d ? 0.2 : 0.0);
    return map;
}

} // namespace

TEST_CASE("light cone front recovers a linear arrival slope") {
    const auto map = synthetic_map(2.0, 6, 5.0, 0.001);
    const FrontEstimate est = light_cone_front(map, 0.05);
    CHECK(est.velocity == doctest::Approx(2.0).epsilon(2e-3));
    CHECK(est.arrivals.size() == 6);
}

TEST_CASE("wrapped arrivals are dropped by the monotonic prefix rule") {
    auto map = synthetic_map(2.0, 6, 5.0, 0.001);
    // Make the largest separation arrive unphysically early (PBC wrap).
    for (std::size_t it = 0; it < map.times.size(); ++it)
        map.values[it][6] = map.times[it] >= 0.3 ? 0.2 : 0.0;
    const FrontEstimate est = light_cone_front(map, 0.05);
    CHECK(est.arrivals.size() == 5);
    CHECK(est.velocity == doctest::Approx(2.0).epsilon(2e-3));
}

TEST_CASE("undetected front throws") {
    const auto map = synthetic_map(2.0, 6, 0.5, 0.01);  // front reaches d = 1 only
    CHECK_THROWS_AS(light_cone_front(map, 0.05), FrontNotDetected);
}

TEST_CASE("chain correlation map distance classes") {
    Trajectory traj;
    traj.n_sites = 6;
    traj.times = {0.0};
    Snapshot snap;
    snap.corr.assign(36, 0.0);
    for (int i = 0; i < 6; ++i) snap.corr[i * 6 + i] = 1.0;
    traj.snapshots.push_back(snap);
    const auto pbc = correlation_map_chain(traj, Boundary::PBC);
    CHECK(pbc.distances.back() == 3);  // N/2
    const auto obc = correlation_map_chain(traj, Boundary::OBC);
    CHECK(obc.distances.back() == 5);
    CHECK(pbc.values[0][0] == doctest::Approx(1.0));
}

TEST_CASE("ladder map averages intra-leg pairs over both legs") {
    Trajectory traj;
    traj.n_sites = 6;  // 2 x 3
    traj.times = {0.0};
    Snapshot snap;
    snap.corr.assign(36, 0.0);
    snap.corr[0 * 6 + 1] = 0.4;  // leg 0, d = 1
    snap.corr[3 * 6 + 4] = 0.2;  // leg 1, d = 1
    snap.corr[1 * 6 + 2] = 0.4;
    snap.corr[4 * 6 + 5] = 0.2;
    traj.snapshots.push_back(snap);
    const auto map = correlation_map_ladder_intra_leg(traj, 3);
    const std::size_t d1 = 1;  // distances = {0, 1, 2}
    CHECK(map.values[0][d1] == doctest::Approx(0.3));
}
