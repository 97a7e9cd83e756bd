#pragma once

#include <utility>
#include <vector>

#include "mesonsim/register.hpp"

namespace mesonsim {

// Which physical frame the stored coefficients realize. Coefficients are
// always stored literally, so the tag is bookkeeping for reports and for
// schedule field signs (see IsingSpec below).
enum class SignFrame { Ferro, Antiferro };

struct Coupling {
    int i, j;      // i < j
    double value;  // coefficient of sigma^z_i sigma^z_j
};

// Sparse symmetric coupling set with zero diagonal, plus a record of what
// the truncation dropped.
struct CouplingMatrix {
    int n_sites = 0;
    std::vector<Coupling> entries;  // i < j, deduplicated
    double max_abs = 0.0;
    double cutoff = 0.0;            // absolute threshold used
    int dropped_count = 0;
    double dropped_max_abs = 0.0;

    double at(int i, int j) const;        // 0 if absent
    std::vector<double> row_sums() const; // S_i = sum_j J_ij
};

// One Hamiltonian representation for every engine. The operator is
//
//   H = sum_{i<j} J_ij sz_i sz_j + sum_i hz[i] sz_i + sum_i hx[i] sx_i
//
// with the basis convention sz |bit=0> = +|bit=0>, so the all-zeros
// product state has sz = +1 on every site. Constructors do the sign
// bookkeeping: a Ferro-tagged transverse-field chain stores J = -1,
// hx = -h_x, hz = -h_z, so that H is literally the ferromagnetic model.
struct IsingSpec {
    int n_sites = 0;
    std::vector<Coupling> couplings;  // i < j
    std::vector<double> hx;           // per-site sigma^x coefficient
    std::vector<double> hz;           // per-site sigma^z coefficient
    SignFrame sign = SignFrame::Ferro;
    Boundary boundary = Boundary::OBC;
    std::vector<std::pair<int, int>> nn_bonds;  // nearest-neighbor bonds (domain walls)

    // -1 for Ferro, +1 for Antiferro: the factor mapping model-frame field
    // values (the arguments of build_tfic and schedule segments) onto stored
    // coefficients.
    double frame_factor() const { return sign == SignFrame::Ferro ? -1.0 : 1.0; }

    std::size_t dim() const { return std::size_t{1} << n_sites; }
};

// Rydberg control parameters at a fixed instant. Schedules live in the
// engine; the mapping is instantaneous.
struct RydbergParams {
    double c6 = 0.0;                  // rad/us * um^6, > 0
    double omega = 0.0;               // rad/us, >= 0
    std::vector<double> delta;        // rad/us; size 1 (uniform) or n_sites
};

// Per-site effective longitudinal offsets produced by rewriting n_i n_j in
// Pauli form: shift[i] = sum_{j != i} J_ij (units of the nearest-neighbor J).
// The effective longitudinal coefficient on site i is hz[i] - shift[i].
struct BoundaryShift {
    std::vector<double> shift;
};

struct RydbergMapping {
    IsingSpec spec;           // couplings normalized to nearest-neighbor J = 1
    BoundaryShift shift;
    double j_nn_rad_per_us;   // the physical scale of one unit of J
};

// J_ij = C6 / (4 r_ij^6) in rad/us. Entries below rel_cutoff * max J_ij are
// dropped and the truncation recorded. rel_cutoff >= 1 keeps nearest
// neighbors only.
CouplingMatrix rydberg_couplings(const Register& reg, double c6, double rel_cutoff = 1e-4);

// Instantaneous mapping H_Ryd -> Ising form: hx = Omega/2, hz = delta/2,
// couplings from rydberg_couplings, everything normalized by the nearest-
// neighbor J. The spec is tagged Antiferro; ferromagnetic dynamics follow
// from the -H equivalence for real initial states.
RydbergMapping rydberg_to_ising(const RydbergParams& params, const Register& reg,
                                double rel_cutoff = 1e-4);

// Per-site detuning delta_i = 2 * (hz_target + S_i), S_i = sum_j J_ij, which
// makes the effective longitudinal coefficient equal hz_target on every site
// under PBC. couplings and hz_target in rad/us; hz_target is expressed in
// the stored-coefficient (Antiferro) convention.
std::vector<double> compensated_detuning(const CouplingMatrix& couplings, double hz_target);

// Residual effective longitudinal field per site when delta_i is applied.
std::vector<double> compensation_residual(const CouplingMatrix& couplings,
                                          const std::vector<double>& delta,
                                          double hz_target);

// Idealized nearest-neighbor transverse-field Ising chain, |J| = 1.
IsingSpec build_tfic(int n, double hx, double hz, Boundary boundary,
                     SignFrame sign = SignFrame::Ferro);

// Idealized two-leg ladder: leg couplings J = 1, rung couplings lambda,
// hz = 0. OBC only. Site index = leg * n_per_leg + rung.
IsingSpec build_tfil(int n_per_leg, double hx, double lambda, Boundary boundary,
                     SignFrame sign = SignFrame::Ferro);

} // namespace mesonsim
