#include "mesonsim/state.hpp"

#include <cmath>

#include "mesonsim/errors.hpp"

namespace mesonsim {

namespace {
constexpr std::size_t kChunk = 4096;
}

StateVector all_zeros_state(int n_sites) { return basis_state(n_sites, 0); }

StateVector basis_state(int n_sites, std::size_t b) {
    StateVector v;
    v.n_sites = n_sites;
    v.amp.assign(std::size_t{1} << n_sites, cplx(0.0, 0.0));
    v.amp[b] = cplx(1.0, 0.0);
    return v;
}

double norm_sq(const std::vector<cplx>& v) {
    double total = 0.0;
    for (std::size_t c = 0; c < v.size(); c += kChunk) {
        const std::size_t end = std::min(c + kChunk, v.size());
        double part = 0.0;
        for (std::size_t i = c; i < end; ++i) part += std::norm(v[i]);
        total += part;
    }
    return total;
}

double norm(const StateVector& v) { return std::sqrt(norm_sq(v.amp)); }

cplx dot(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    cplx total(0.0, 0.0);
    for (std::size_t c = 0; c < a.size(); c += kChunk) {
        const std::size_t end = std::min(c + kChunk, a.size());
        cplx part(0.0, 0.0);
        for (std::size_t i = c; i < end; ++i) part += std::conj(a[i]) * b[i];
        total += part;
    }
    return total;
}

void scale(std::vector<cplx>& v, cplx s) {
    for (auto& x : v) x *= s;
}

void axpy(std::vector<cplx>& y, cplx a, const std::vector<cplx>& x) {
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

void normalize(StateVector& v) {
    const double n = norm(v);
    if (n <= 0.0) throw UnnormalizedState("cannot normalize the zero vector");
    scale(v.amp, cplx(1.0 / n, 0.0));
}

double fidelity(const StateVector& a, const StateVector& b) {
    return std::norm(dot(a.amp, b.amp));
}

} // namespace mesonsim
