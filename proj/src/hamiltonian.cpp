#include "mesonsim/hamiltonian.hpp"

#include <cmath>

#include "mesonsim/errors.hpp"

namespace mesonsim {

namespace {

inline double z_of(std::size_t b, int i) { return (b >> i) & 1u ? -1.0 : 1.0; }

} // namespace

HamiltonianOp::HamiltonianOp(const IsingSpec& spec) : n_(spec.n_sites), hx_site_(spec.hx) {
    const std::size_t d = dim();
    diag_static_.resize(d);
    diag_zsum_.resize(d);
    for (std::size_t b = 0; b < d; ++b) {
        double e = 0.0;
        double zsum = 0.0;
        for (int i = 0; i < n_; ++i) {
            const double z = z_of(b, i);
            e += spec.hz[i] * z;
            zsum += z;
        }
        for (const auto& c : spec.couplings) e += c.value * z_of(b, c.i) * z_of(b, c.j);
        diag_static_[b] = e;
        diag_zsum_[b] = zsum;
        max_diag_static_ = std::max(max_diag_static_, std::abs(e));
    }
}

void HamiltonianOp::apply(const cplx* in, cplx* out) const {
    const std::size_t d = dim();
    if (hz_uniform_ == 0.0) {
        for (std::size_t b = 0; b < d; ++b) out[b] = diag_static_[b] * in[b];
    } else {
        for (std::size_t b = 0; b < d; ++b)
            out[b] = (diag_static_[b] + hz_uniform_ * diag_zsum_[b]) * in[b];
    }
    for (int i = 0; i < n_; ++i) {
        const double c = hx_site_[i] + hx_uniform_;
        if (c == 0.0) continue;
        const std::size_t bit = std::size_t{1} << i;
        const std::size_t block = bit << 1;
        for (std::size_t base = 0; base < d; base += block) {
            for (std::size_t b = base; b < base + bit; ++b) {
                out[b] += c * in[b | bit];
                out[b | bit] += c * in[b];
            }
        }
    }
}

void HamiltonianOp::apply(const std::vector<cplx>& in, std::vector<cplx>& out) const {
    if (in.size() != dim()) throw DimensionMismatch("state dimension != 2^n_sites");
    out.resize(dim());
    apply(in.data(), out.data());
}

StateVector HamiltonianOp::apply(const StateVector& v) const {
    StateVector out;
    out.n_sites = n_;
    apply(v.amp, out.amp);
    return out;
}

double HamiltonianOp::norm_bound() const {
    double s = max_diag_static_ + std::abs(hz_uniform_) * n_;
    for (int i = 0; i < n_; ++i) s += std::abs(hx_site_[i] + hx_uniform_);
    return s;
}

StateVector hamiltonian_apply(const IsingSpec& spec, const StateVector& v) {
    if (v.dim() != spec.dim() || v.n_sites != spec.n_sites)
        throw DimensionMismatch("state dimension does not match 2^n_sites of the spec");
    HamiltonianOp op(spec);
    return op.apply(v);
}

} // namespace mesonsim
