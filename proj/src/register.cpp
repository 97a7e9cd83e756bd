#include "mesonsim/register.hpp"

#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "mesonsim/errors.hpp"

namespace mesonsim {

double Register::distance(int i, int j) const {
    const double dx = positions[i][0] - positions[j][0];
    const double dy = positions[i][1] - positions[j][1];
    return std::hypot(dx, dy);
}

double Register::min_pairwise_distance() const {
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < size(); ++i)
        for (int j = i + 1; j < size(); ++j) best = std::min(best, distance(i, j));
    return best;
}

Register build_ring_register(int n, double spacing_um, double hardware_floor_um) {
    if (n < 3) throw InvalidCount("ring register needs n >= 3, got n = " + std::to_string(n));
    if (spacing_um < hardware_floor_um)
        throw SpacingTooSmall("ring spacing " + std::to_string(spacing_um) +
                              " um is below the hardware floor of " +
                              std::to_string(hardware_floor_um) + " um");
    Register reg;
    const double radius = spacing_um / (2.0 * std::sin(units::pi / n));
    reg.geometry = {GeometryKind::Ring, n, radius, 0.0, 0.0};
    reg.boundary = Boundary::PBC;
    reg.positions.reserve(n);
    for (int i = 0; i < n; ++i) {
        const double phi = units::two_pi * i / n;
        reg.positions.push_back({radius * std::cos(phi), radius * std::sin(phi)});
    }
    return reg;
}

Register build_ladder_register(int n_per_leg, double leg_spacing_um, double rung_spacing_um,
                               double hardware_floor_um) {
    if (n_per_leg < 2)
        throw InvalidCount("ladder register needs n_per_leg >= 2, got " +
                           std::to_string(n_per_leg));
    if (leg_spacing_um < hardware_floor_um || rung_spacing_um < hardware_floor_um)
        throw SpacingTooSmall("ladder spacings (" + std::to_string(leg_spacing_um) + ", " +
                              std::to_string(rung_spacing_um) +
                              ") um fall below the hardware floor of " +
                              std::to_string(hardware_floor_um) + " um");
    Register reg;
    reg.geometry = {GeometryKind::Ladder, n_per_leg, 0.0, leg_spacing_um, rung_spacing_um};
    reg.boundary = Boundary::OBC;
    reg.positions.reserve(2 * n_per_leg);
    for (int leg = 0; leg < 2; ++leg)
        for (int i = 0; i < n_per_leg; ++i)
            reg.positions.push_back({i * leg_spacing_um, leg * rung_spacing_um});
    return reg;
}

void validate_register(const Register& reg, double hardware_floor_um) {
    if (reg.size() < 2) throw InvalidCount("register has fewer than 2 atoms");
    const double dmin = reg.min_pairwise_distance();
    if (dmin <= 0.0) throw SpacingTooSmall("register contains coincident atoms");
    if (dmin < hardware_floor_um)
        throw SpacingTooSmall("minimum pairwise distance " + std::to_string(dmin) +
                              " um is below the hardware floor of " +
                              std::to_string(hardware_floor_um) + " um");
    if (reg.geometry.kind == GeometryKind::Ring) {
        const int n = reg.size();
        const double chord0 = reg.distance(0, 1 % n);
        for (int i = 0; i < n; ++i) {
            const double chord = reg.distance(i, (i + 1) % n);
            if (std::abs(chord - chord0) > 1e-9)
                throw SpacingTooSmall("ring register has unequal nearest-neighbor chords");
        }
    }
    if (reg.geometry.kind == GeometryKind::Ladder) {
        if (reg.size() != 2 * reg.geometry.n)
            throw InvalidCount("ladder register must hold exactly 2 legs of equal length");
    }
}

std::string boundary_name(Boundary b) { return b == Boundary::PBC ? "pbc" : "obc"; }

std::string geometry_name(GeometryKind k) {
    switch (k) {
        case GeometryKind::Ring: return "ring";
        case GeometryKind::Ladder: return "ladder";
        default: return "custom";
    }
}

namespace {

std::string fmt9(double x) {
    std::ostringstream ss;
    ss.precision(9);
    ss << std::defaultfloat << x;
    return ss.str();
}

} // namespace

void write_register(std::ostream& os, const Register& reg) {
    os << "# geometry=" << geometry_name(reg.geometry.kind)
       << " boundary=" << boundary_name(reg.boundary) << " n=" << reg.geometry.n;
    if (reg.geometry.kind == GeometryKind::Ring) os << " radius_um=" << fmt9(reg.geometry.radius_um);
    if (reg.geometry.kind == GeometryKind::Ladder)
        os << " leg_spacing_um=" << fmt9(reg.geometry.leg_spacing_um)
           << " rung_spacing_um=" << fmt9(reg.geometry.rung_spacing_um);
    os << "\n";
    for (int i = 0; i < reg.size(); ++i)
        os << i << " " << fmt9(reg.positions[i][0]) << " " << fmt9(reg.positions[i][1]) << "\n";
}

Register read_register(std::istream& is) {
    Register reg;
    std::string header;
    if (!std::getline(is, header) || header.empty() || header[0] != '#')
        throw ConfigInvalid("register", "missing header line");
    std::istringstream hs(header.substr(1));
    std::string tok;
    while (hs >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = tok.substr(0, eq);
        const std::string val = tok.substr(eq + 1);
        if (key == "geometry") {
            if (val == "ring") reg.geometry.kind = GeometryKind::Ring;
            else if (val == "ladder") reg.geometry.kind = GeometryKind::Ladder;
            else reg.geometry.kind = GeometryKind::Custom;
        } else if (key == "boundary") {
            reg.boundary = (val == "pbc") ? Boundary::PBC : Boundary::OBC;
        } else if (key == "n") {
            reg.geometry.n = std::stoi(val);
        } else if (key == "radius_um") {
            reg.geometry.radius_um = std::stod(val);
        } else if (key == "leg_spacing_um") {
            reg.geometry.leg_spacing_um = std::stod(val);
        } else if (key == "rung_spacing_um") {
            reg.geometry.rung_spacing_um = std::stod(val);
        }
    }
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        int idx;
        double x, y;
        if (!(ls >> idx >> x >> y)) throw ConfigInvalid("register", "malformed row: " + line);
        reg.positions.push_back({x, y});
    }
    return reg;
}

} // namespace mesonsim
