#include <cmath>
#include <sstream>

#include "doctest.h"
#include "mesonsim/errors.hpp"
#include "mesonsim/register.hpp"

using namespace mesonsim;

TEST_CASE("ring register geometry") {
    const int n = 12;
    const double spacing = 9.0;
    const Register reg = build_ring_register(n, spacing);
    REQUIRE(reg.size() == n);
    CHECK(reg.boundary == Boundary::PBC);
    CHECK(reg.geometry.kind == GeometryKind::Ring);
    CHECK(reg.geometry.radius_um == doctest::Approx(spacing / (2.0 * std::sin(units::pi / n))));
    // All nearest-neighbor chords equal the requested spacing.
    for (int i = 0; i < n; ++i)
        CHECK(reg.distance(i, (i + 1) % n) == doctest::Approx(spacing).epsilon(1e-12));
    // Second-neighbor chord follows the chord-length ratio.
    const double expected = spacing * std::sin(2.0 * units::pi / n) / std::sin(units::pi / n);
    CHECK(reg.distance(0, 2) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("ladder register geometry") {
    const Register reg = build_ladder_register(6, 9.0, 7.0);
    REQUIRE(reg.size() == 12);
    CHECK(reg.boundary == Boundary::OBC);
    CHECK(reg.distance(0, 1) == doctest::Approx(9.0));   // along a leg
    CHECK(reg.distance(0, 6) == doctest::Approx(7.0));   // rung
    CHECK(reg.distance(0, 7) == doctest::Approx(std::hypot(9.0, 7.0)));
}

TEST_CASE("register validation") {
    CHECK_THROWS_AS(build_ring_register(2, 9.0), InvalidCount);
    CHECK_THROWS_AS(build_ring_register(8, 1.0), SpacingTooSmall);
    CHECK_THROWS_AS(build_ladder_register(4, 9.0, 0.5), SpacingTooSmall);

    Register bad = build_ladder_register(3, 9.0, 9.0);
    bad.positions[1] = bad.positions[0];
    bad.geometry.kind = GeometryKind::Custom;
    CHECK_THROWS_AS(validate_register(bad), SpacingTooSmall);
}

TEST_CASE("register serialization round trip") {
    const Register reg = build_ring_register(10, 10.4452);
    std::stringstream ss;
    write_register(ss, reg);
    const Register back = read_register(ss);
    REQUIRE(back.size() == reg.size());
    CHECK(back.boundary == reg.boundary);
    for (int i = 0; i < reg.size(); ++i) {
        // The format keeps 9 significant digits.
        CHECK(back.positions[i][0] == doctest::Approx(reg.positions[i][0]).epsilon(1e-7));
        CHECK(back.positions[i][1] == doctest::Approx(reg.positions[i][1]).epsilon(1e-7));
    }
    // A second pass through the format is bit-exact.
    std::stringstream once, twice;
    write_register(once, back);
    write_register(twice, read_register(once));
    CHECK(once.str() == twice.str());
}
