#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "mesonsim/units.hpp"

namespace mesonsim {

enum class Boundary { PBC, OBC };

enum class GeometryKind { Ring, Ladder, Custom };

// Geometry metadata. Only the fields relevant to `kind` are meaningful.
struct Geometry {
    GeometryKind kind = GeometryKind::Custom;
    int n = 0;                 // Ring: atom count; Ladder: atoms per leg
    double radius_um = 0.0;    // Ring
    double leg_spacing_um = 0.0;   // Ladder: distance between neighbors on a leg
    double rung_spacing_um = 0.0;  // Ladder: distance between the two legs
};

// Atom positions in the plane, in um. The source of all couplings.
struct Register {
    std::vector<std::array<double, 2>> positions;
    Geometry geometry;
    Boundary boundary = Boundary::OBC;

    int size() const { return static_cast<int>(positions.size()); }
    double distance(int i, int j) const;
    double min_pairwise_distance() const;

    // For a Ladder register, site index = leg * n_per_leg + rung.
    // For a Ring register, site index runs around the circle.
};

// n atoms on a circle with nearest-neighbor chord equal to `spacing_um`,
// radius = spacing / (2 sin(pi/n)). Boundary is PBC.
Register build_ring_register(int n, double spacing_um,
                             double hardware_floor_um = units::default_hardware_floor_um);

// 2 x n_per_leg atoms on two parallel lines. Boundary is OBC.
Register build_ladder_register(int n_per_leg, double leg_spacing_um, double rung_spacing_um,
                               double hardware_floor_um = units::default_hardware_floor_um);

// Validates the invariants of an arbitrary register (distances, geometry tags).
// Throws on violation.
void validate_register(const Register& reg,
                       double hardware_floor_um = units::default_hardware_floor_um);

// Plain-text serialization: a header line naming geometry and boundary,
// then one `index x_um y_um` row per atom with fixed 9-significant-digit
// decimals. Bit-exact round trip.
void write_register(std::ostream& os, const Register& reg);
Register read_register(std::istream& is);

std::string boundary_name(Boundary b);
std::string geometry_name(GeometryKind k);

} // namespace mesonsim
