#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace mesonsim {

using cplx = std::complex<double>;

// Complex amplitude array over the 2^n computational basis.
// Basis convention: bit i of the index is site i, sz |bit=0> = +1.
struct StateVector {
    int n_sites = 0;
    std::vector<cplx> amp;

    std::size_t dim() const { return amp.size(); }
};

// |00...0> (all sz = +1).
StateVector all_zeros_state(int n_sites);

// Product basis state |b>.
StateVector basis_state(int n_sites, std::size_t b);

// Reductions below use fixed-size chunk partial sums so results are
// bitwise independent of any outer parallel decomposition.
double norm(const StateVector& v);
double norm_sq(const std::vector<cplx>& v);
cplx dot(const std::vector<cplx>& a, const std::vector<cplx>& b);  // <a|b>
void scale(std::vector<cplx>& v, cplx s);
void axpy(std::vector<cplx>& y, cplx a, const std::vector<cplx>& x);  // y += a x
void normalize(StateVector& v);

double fidelity(const StateVector& a, const StateVector& b);  // |<a|b>|^2

} // namespace mesonsim
