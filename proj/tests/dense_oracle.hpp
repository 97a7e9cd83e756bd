#pragma once

// Independent dense reference for the matrix-free engine: Hamiltonians are
// assembled from explicit single-site Pauli matrices embedded in the full
// Hilbert space, and propagators come from a dense eigendecomposition.
// Nothing here shares code with HamiltonianOp or the Krylov engine.

#include <complex>
#include <cstddef>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "mesonsim/ising.hpp"
#include "mesonsim/state.hpp"

namespace oracle {

// Single-site operator A (2x2, z-basis row/col 0 = bit 0 = sz +1) embedded
// on site `site` of an n-site register.
inline Eigen::MatrixXd embed_site(int n, int site, const Eigen::Matrix2d& a) {
    const std::size_t dim = std::size_t{1} << n;
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
    for (std::size_t b = 0; b < dim; ++b) {
        const std::size_t rest = b & ~(std::size_t{1} << site);
        const int col_bit = (b >> site) & 1u;
        for (int row_bit = 0; row_bit < 2; ++row_bit) {
            const double v = a(row_bit, col_bit);
            if (v == 0.0) continue;
            const std::size_t r = rest | (std::size_t{row_bit} << site);
            m(r, b) += v;
        }
    }
    return m;
}

inline Eigen::Matrix2d pauli_z() {
    Eigen::Matrix2d z;
    z << 1, 0, 0, -1;
    return z;
}

inline Eigen::Matrix2d pauli_x() {
    Eigen::Matrix2d x;
    x << 0, 1, 1, 0;
    return x;
}

inline Eigen::MatrixXd dense_hamiltonian(const mesonsim::IsingSpec& spec) {
    const int n = spec.n_sites;
    const std::size_t dim = std::size_t{1} << n;
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    for (const auto& c : spec.couplings)
        h += c.value * (embed_site(n, c.i, pauli_z()) * embed_site(n, c.j, pauli_z()));
    for (int i = 0; i < n; ++i) {
        if (spec.hz[i] != 0.0) h += spec.hz[i] * embed_site(n, i, pauli_z());
        if (spec.hx[i] != 0.0) h += spec.hx[i] * embed_site(n, i, pauli_x());
    }
    return h;
}

// exp(-i H t) |psi> via dense eigendecomposition.
inline mesonsim::StateVector dense_evolve(const mesonsim::IsingSpec& spec,
                                          const mesonsim::StateVector& psi, double t) {
    const Eigen::MatrixXd h = dense_hamiltonian(spec);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    const auto& v = es.eigenvectors();
    const auto& e = es.eigenvalues();
    Eigen::VectorXcd in(psi.dim());
    for (std::size_t b = 0; b < psi.dim(); ++b) in(b) = psi.amp[b];
    Eigen::VectorXcd coeff = v.transpose() * in;
    for (Eigen::Index k = 0; k < coeff.size(); ++k)
        coeff(k) *= std::exp(std::complex<double>(0.0, -e(k) * t));
    Eigen::VectorXcd out = v * coeff;
    mesonsim::StateVector res;
    res.n_sites = psi.n_sites;
    res.amp.resize(psi.dim());
    for (std::size_t b = 0; b < psi.dim(); ++b) res.amp[b] = out(b);
    return res;
}

// Random dense-ish spec: random couplings on a chain plus a few long bonds,
// random site-resolved fields.
inline mesonsim::IsingSpec random_spec(int n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    mesonsim::IsingSpec spec;
    spec.n_sites = n;
    spec.boundary = mesonsim::Boundary::OBC;
    spec.hx.resize(n);
    spec.hz.resize(n);
    for (int i = 0; i < n; ++i) {
        spec.hx[i] = u(rng);
        spec.hz[i] = u(rng);
    }
    for (int i = 0; i + 1 < n; ++i) {
        spec.couplings.push_back({i, i + 1, u(rng)});
        spec.nn_bonds.emplace_back(i, i + 1);
    }
    for (int i = 0; i + 2 < n; i += 2) spec.couplings.push_back({i, i + 2, 0.3 * u(rng)});
    return spec;
}

} // namespace oracle
