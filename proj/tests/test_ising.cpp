#include <cmath>

#include "doctest.h"
#include "mesonsim/errors.hpp"
#include "mesonsim/ising.hpp"

using namespace mesonsim;

TEST_CASE("ferromagnetic chain stores literal signs") {
    const IsingSpec spec = build_tfic(4, 0.5, 2.0, Boundary::PBC);
    CHECK(spec.frame_factor() == -1.0);
    REQUIRE(spec.couplings.size() == 4);
    for (const auto& c : spec.couplings) CHECK(c.value == -1.0);
    for (double v : spec.hx) CHECK(v == -0.5);
    for (double v : spec.hz) CHECK(v == -2.0);
    CHECK(spec.nn_bonds.size() == 4);

    const IsingSpec obc = build_tfic(4, 0.5, 0.0, Boundary::OBC);
    CHECK(obc.couplings.size() == 3);
}

TEST_CASE("ladder wiring") {
    const int n = 5;
    const IsingSpec spec = build_tfil(n, 1.0, 0.7, Boundary::OBC);
    CHECK(spec.n_sites == 2 * n);
    // 2 (n-1) leg bonds with J = -1 and n rungs with -lambda.
    int legs = 0, rungs = 0;
    for (const auto& c : spec.couplings) {
        if (c.j - c.i == n) {
            CHECK(c.value == doctest::Approx(-0.7));
            ++rungs;
        } else {
            CHECK(c.j - c.i == 1);
            CHECK(c.value == doctest::Approx(-1.0));
            ++legs;
        }
    }
    CHECK(legs == 2 * (n - 1));
    CHECK(rungs == n);
    CHECK_THROWS_AS(build_tfil(4, 1.0, 1.0, Boundary::PBC), PBCUnsupportedForLadder);
}

TEST_CASE("rydberg couplings follow the r^-6 chord law") {
    const int n = 12;
    const Register reg = build_ring_register(n, 9.0);
    const CouplingMatrix cm = rydberg_couplings(reg, units::c6_rb87_rad_per_us_um6, 1e-4);
    const double jnn = units::c6_rb87_rad_per_us_um6 / (4.0 * std::pow(9.0, 6));
    CHECK(cm.max_abs == doctest::Approx(jnn).epsilon(1e-12));
    // Second-neighbor coupling: chord ratio to the sixth power.
    const double ratio = std::pow(std::sin(units::pi / n) / std::sin(2.0 * units::pi / n), 6);
    CHECK(ratio == doctest::Approx(0.019239).epsilon(1e-3));
    CHECK(cm.at(0, 2) / cm.at(0, 1) == doctest::Approx(ratio).epsilon(1e-12));
    // rel_cutoff >= 1 keeps nearest neighbors only.
    const CouplingMatrix nn_only = rydberg_couplings(reg, units::c6_rb87_rad_per_us_um6, 1.0);
    CHECK(nn_only.entries.size() == static_cast<std::size_t>(n));
    CHECK(nn_only.dropped_count > 0);
}

TEST_CASE("rydberg mapping normalizes to the nearest-neighbor bond") {
    const Register reg = build_ring_register(10, 10.4452);
    RydbergParams p;
    p.c6 = units::c6_rb87_rad_per_us_um6;
    p.omega = units::mhz_to_rad_per_us(0.75);
    p.delta = {1.3};
    const RydbergMapping map = rydberg_to_ising(p, reg);
    CHECK(map.spec.sign == SignFrame::Antiferro);
    CHECK(map.spec.hx[0] == doctest::Approx(0.5 * p.omega / map.j_nn_rad_per_us));
    CHECK(map.spec.hz[3] == doctest::Approx(0.5 * 1.3 / map.j_nn_rad_per_us));
    // Spacing solved offline for hx = 1 at Omega/2pi = 0.75 MHz.
    CHECK(map.spec.hx[0] == doctest::Approx(1.0).epsilon(1e-4));
    double max_c = 0.0;
    for (const auto& c : map.spec.couplings) max_c = std::max(max_c, c.value);
    CHECK(max_c == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(map.spec.nn_bonds.size() == 10);
}

TEST_CASE("compensated detuning zeroes the boundary residual") {
    const Register reg = build_ladder_register(5, 9.3, 9.3);
    const CouplingMatrix cm = rydberg_couplings(reg, units::c6_rb87_rad_per_us_um6, 1e-4);
    const double hz_target = 4.0 * cm.max_abs;
    const auto delta = compensated_detuning(cm, hz_target);
    const auto res = compensation_residual(cm, delta, hz_target);
    for (double r : res) CHECK(std::abs(r) < 1e-12 * cm.max_abs);
    // Edge sites need less compensation than bulk sites (smaller row sum).
    CHECK(delta[0] < delta[2]);
}
