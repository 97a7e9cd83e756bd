#include "mesonsim/ising.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mesonsim/errors.hpp"

namespace mesonsim {

double CouplingMatrix::at(int i, int j) const {
    if (i == j) return 0.0;
    if (i > j) std::swap(i, j);
    for (const auto& c : entries)
        if (c.i == i && c.j == j) return c.value;
    return 0.0;
}

std::vector<double> CouplingMatrix::row_sums() const {
    std::vector<double> s(n_sites, 0.0);
    for (const auto& c : entries) {
        s[c.i] += c.value;
        s[c.j] += c.value;
    }
    return s;
}

CouplingMatrix rydberg_couplings(const Register& reg, double c6, double rel_cutoff) {
    validate_register(reg);
    if (c6 <= 0.0) throw ConfigInvalid("c6", "must be > 0 (antiferromagnetic)");
    const int n = reg.size();
    CouplingMatrix m;
    m.n_sites = n;
    double max_j = 0.0;
    std::vector<Coupling> all;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double r = reg.distance(i, j);
            const double jij = c6 / (4.0 * std::pow(r, 6));
            all.push_back({i, j, jij});
            max_j = std::max(max_j, jij);
        }
    }
    m.max_abs = max_j;
    m.cutoff = rel_cutoff * max_j;
    for (const auto& c : all) {
        // Tolerance so rel_cutoff = 1 keeps every nearest-neighbor bond in
        // the presence of floating-point spread among equal distances.
        if (c.value >= m.cutoff * (1.0 - 1e-12)) {
            m.entries.push_back(c);
        } else {
            ++m.dropped_count;
            m.dropped_max_abs = std::max(m.dropped_max_abs, c.value);
        }
    }
    return m;
}

RydbergMapping rydberg_to_ising(const RydbergParams& params, const Register& reg,
                                double rel_cutoff) {
    if (params.omega < 0.0) throw ConfigInvalid("omega", "must be >= 0");
    const int n = reg.size();
    if (!(params.delta.size() == 1 || static_cast<int>(params.delta.size()) == n))
        throw ScheduleNotScalarAtTime("delta must be a single scalar or one value per site");

    CouplingMatrix cm = rydberg_couplings(reg, params.c6, rel_cutoff);
    const double j_nn = cm.max_abs;  // nearest-neighbor bond sets the unit of J

    RydbergMapping out;
    out.j_nn_rad_per_us = j_nn;
    IsingSpec& spec = out.spec;
    spec.n_sites = n;
    spec.sign = SignFrame::Antiferro;
    spec.boundary = reg.boundary;
    spec.hx.assign(n, 0.5 * params.omega / j_nn);
    spec.hz.resize(n);
    for (int i = 0; i < n; ++i) {
        const double d = params.delta.size() == 1 ? params.delta[0] : params.delta[i];
        spec.hz[i] = 0.5 * d / j_nn;
    }
    spec.couplings.reserve(cm.entries.size());
    for (const auto& c : cm.entries) {
        spec.couplings.push_back({c.i, c.j, c.value / j_nn});
        if (std::abs(c.value - j_nn) < 1e-9 * j_nn) spec.nn_bonds.emplace_back(c.i, c.j);
    }
    const auto sums = cm.row_sums();
    out.shift.shift.resize(n);
    for (int i = 0; i < n; ++i) out.shift.shift[i] = sums[i] / j_nn;
    return out;
}

std::vector<double> compensated_detuning(const CouplingMatrix& couplings, double hz_target) {
    auto s = couplings.row_sums();
    for (auto& v : s) v = 2.0 * (hz_target + v);
    return s;
}

std::vector<double> compensation_residual(const CouplingMatrix& couplings,
                                          const std::vector<double>& delta,
                                          double hz_target) {
    const auto s = couplings.row_sums();
    std::vector<double> res(couplings.n_sites);
    for (int i = 0; i < couplings.n_sites; ++i) res[i] = 0.5 * delta[i] - s[i] - hz_target;
    return res;
}

IsingSpec build_tfic(int n, double hx, double hz, Boundary boundary, SignFrame sign) {
    if (n < 2) throw InvalidCount("chain needs n >= 2, got " + std::to_string(n));
    IsingSpec spec;
    spec.n_sites = n;
    spec.sign = sign;
    spec.boundary = boundary;
    const double s = spec.frame_factor();
    spec.hx.assign(n, s * hx);
    spec.hz.assign(n, s * hz);
    const int n_bonds = boundary == Boundary::PBC ? n : n - 1;
    for (int b = 0; b < n_bonds; ++b) {
        int i = b, j = (b + 1) % n;
        if (i > j) std::swap(i, j);
        spec.couplings.push_back({i, j, s * 1.0});
        spec.nn_bonds.emplace_back(i, j);
    }
    return spec;
}

IsingSpec build_tfil(int n_per_leg, double hx, double lambda, Boundary boundary,
                     SignFrame sign) {
    if (n_per_leg < 2)
        throw InvalidCount("ladder needs n_per_leg >= 2, got " + std::to_string(n_per_leg));
    if (boundary == Boundary::PBC)
        throw PBCUnsupportedForLadder("the ladder supports OBC only");
    IsingSpec spec;
    spec.n_sites = 2 * n_per_leg;
    spec.sign = sign;
    spec.boundary = Boundary::OBC;
    const double s = spec.frame_factor();
    spec.hx.assign(spec.n_sites, s * hx);
    spec.hz.assign(spec.n_sites, 0.0);
    for (int leg = 0; leg < 2; ++leg) {
        for (int r = 0; r + 1 < n_per_leg; ++r) {
            const int i = leg * n_per_leg + r;
            spec.couplings.push_back({i, i + 1, s * 1.0});
            spec.nn_bonds.emplace_back(i, i + 1);
        }
    }
    for (int r = 0; r < n_per_leg; ++r) {
        spec.couplings.push_back({r, n_per_leg + r, s * lambda});
        spec.nn_bonds.emplace_back(r, n_per_leg + r);
    }
    return spec;
}

} // namespace mesonsim
