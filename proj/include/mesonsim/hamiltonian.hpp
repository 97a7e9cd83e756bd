#pragma once

#include "mesonsim/ising.hpp"
#include "mesonsim/state.hpp"

namespace mesonsim {

// Matrix-free application of an Ising Hamiltonian. The diagonal part
// (ZZ + per-site hz) is precomputed per basis state; the off-diagonal
// part (hx) is applied as single-bit flips. Uniform field additions on
// top of the static spec are supported for schedule ramps without
// rebuilding the diagonal.
class HamiltonianOp {
public:
    explicit HamiltonianOp(const IsingSpec& spec);

    // Uniform fields added to every site on top of the static coefficients.
    void set_uniform_fields(double hx_u, double hz_u) {
        hx_uniform_ = hx_u;
        hz_uniform_ = hz_u;
    }

    void apply(const cplx* in, cplx* out) const;
    void apply(const std::vector<cplx>& in, std::vector<cplx>& out) const;
    StateVector apply(const StateVector& v) const;

    // Cheap upper bound on the spectral radius: sum of |coefficients|.
    double norm_bound() const;

    double diagonal(std::size_t b) const {
        return diag_static_[b] + hz_uniform_ * diag_zsum_[b];
    }

    int n_sites() const { return n_; }
    std::size_t dim() const { return std::size_t{1} << n_; }

private:
    int n_;
    std::vector<double> diag_static_;  // couplings + static hz
    std::vector<double> diag_zsum_;    // sum_i z_i(b), for uniform hz
    std::vector<double> hx_site_;
    double max_diag_static_ = 0.0;
    double hx_uniform_ = 0.0;
    double hz_uniform_ = 0.0;
};

// One-shot H * v per the module contract. Throws DimensionMismatch.
StateVector hamiltonian_apply(const IsingSpec& spec, const StateVector& v);

} // namespace mesonsim
