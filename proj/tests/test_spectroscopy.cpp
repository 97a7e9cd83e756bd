#include <cmath>
#include <random>

#include "dense_oracle.hpp"
#include "doctest.h"
#include "mesonsim/errors.hpp"
#include "mesonsim/spectroscopy.hpp"

using namespace mesonsim;

TEST_CASE("dense spectrum matches the Pauli-assembled oracle") {
    std::mt19937_64 rng(5);
    const IsingSpec spec = oracle::random_spec(6, rng);
    const Spectrum sp = full_spectrum(spec);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(oracle::dense_hamiltonian(spec),
                                                      Eigen::EigenvaluesOnly);
    REQUIRE(sp.energies.size() == 64);
    for (int k = 0; k < 64; ++k)
        CHECK(sp.energies[k] == doctest::Approx(es.eigenvalues()(k)).epsilon(1e-10));
    CHECK(sp.has_eigenvectors);
}

TEST_CASE("iterative low end agrees with the dense spectrum") {
    const IsingSpec spec = build_tfic(10, 1.0, 0.25, Boundary::PBC);
    const auto low = lowest_eigenvalues(spec, 6, 1e-9);
    const Spectrum sp = full_spectrum(spec, false);
    REQUIRE(low.size() == 6);
    for (int k = 0; k < 6; ++k) CHECK(low[k] == doctest::Approx(sp.energies[k]).epsilon(1e-8));
}

TEST_CASE("momentum labels on a translation-invariant ring") {
    const IsingSpec spec = build_tfic(8, 0.7, 0.3, Boundary::PBC);
    Spectrum sp = full_spectrum(spec);
    label_momenta(sp, spec);
    REQUIRE(sp.momentum.size() == sp.energies.size());
    // Unique ground state of the ferromagnetic chain is uniform: k = 0.
    CHECK(sp.momentum[0] == 0);
    for (int m : sp.momentum) CHECK(m >= 0);
    for (int m : sp.momentum) CHECK(m < 8);
}

TEST_CASE("lehmann sum rule accounts for the inelastic weight") {
    const IsingSpec spec = build_tfic(8, 1.0, 0.5, Boundary::PBC);
    const Spectrum sp = full_spectrum(spec);
    // Wide grid, small eta: integrated S(k, w) approaches the connected
    // equal-time structure factor at that momentum.
    std::vector<double> omega;
    for (int i = 0; i <= 6000; ++i) omega.push_back(-30.0 + 0.02 * i);
    const double k = 2.0 * units::pi * 2 / 8;
    const auto s = dsf_lehmann(sp, spec, k, omega, 0.02);
    double integral = 0.0;
    for (std::size_t i = 1; i < s.size(); ++i)
        integral += 0.5 * (s[i] + s[i - 1]) * (omega[i] - omega[i - 1]);

    // Oracle: || (sz_k - <sz_k>) |0> ||^2 from the dense ground state.
    Eigen::VectorXd gs = sp.eigenvectors.col(0);
    Eigen::VectorXcd szk = Eigen::VectorXcd::Zero(gs.size());
    for (int b = 0; b < gs.size(); ++b) {
        cplx acc = 0.0;
        for (int j = 0; j < 8; ++j) {
            const double z = (b >> j) & 1 ? -1.0 : 1.0;
            acc += z * std::exp(cplx(0.0, k * j));
        }
        szk(b) = acc / std::sqrt(8.0) * gs(b);
    }
    const cplx mean = gs.cast<cplx>().dot(szk);
    const double w = (szk - mean * gs.cast<cplx>()).squaredNorm();
    CHECK(integral == doctest::Approx(w).epsilon(0.02));
}

TEST_CASE("time-domain DSF reproduces the Lehmann peak positions") {
    const IsingSpec spec = build_tfic(6, 1.0, 2.0, Boundary::PBC);
    const Spectrum sp = full_spectrum(spec);
    std::vector<double> omega;
    for (int i = 0; i <= 1500; ++i) omega.push_back(0.01 * i);
    const auto ref = dsf_lehmann_grid(sp, spec, omega, 0.15);

    TimeDomainOptions opts;
    opts.t_max = 25.0;
    opts.dt_sample = 0.05;
    opts.eta = 0.15;
    opts.omega_max = 15.0;
    opts.omega_points = 1500;
    opts.tol = 1e-8;
    const auto got = dsf_time_domain(spec, opts);
    REQUIRE(got.k.size() == ref.k.size());
    CHECK(got.clamp_floor > -1e-6);

    for (std::size_t ik = 1; ik < got.k.size(); ++ik) {  // skip elastic-ish k = 0 row
        const auto p_ref = peak_extract(ref.omega, ref.s[ik], 0.05, 0.5);
        const auto p_got = peak_extract(got.omega, got.s[ik], 0.05, 0.5);
        REQUIRE(!p_ref.empty());
        REQUIRE(!p_got.empty());
        CHECK(std::abs(p_got[0].omega - p_ref[0].omega) < 0.05);
    }
}

TEST_CASE("peak extraction on synthetic Lorentzians") {
    std::vector<double> omega, s;
    auto lor = [](double x, double x0, double g) { return g / (g * g + (x - x0) * (x - x0)); };
    for (int i = 0; i <= 4000; ++i) {
        const double w = 0.005 * i;
        omega.push_back(w);
        s.push_back(lor(w, 4.0, 0.1) + 0.4 * lor(w, 9.0, 0.1) + 1e-4 * lor(w, 14.0, 0.1));
    }
    const auto peaks = peak_extract(omega, s, 1e-5, 0.0);
    REQUIRE(peaks.size() == 3);
    CHECK(peaks[0].omega == doctest::Approx(4.0).epsilon(1e-3));
    CHECK(peaks[1].omega == doctest::Approx(9.0).epsilon(1e-3));
    CHECK(peaks[2].omega == doctest::Approx(14.0).epsilon(1e-3));

    // Prominence floor removes the small peak; omega_min removes the first.
    CHECK(peak_extract(omega, s, 1e-2, 0.0).size() == 2);
    CHECK(peak_extract(omega, s, 1e-2, 5.0).size() == 1);
    CHECK_THROWS_AS(peak_extract(omega, std::vector<double>(omega.size(), 0.0), 0.01, 0.0),
                    NoPeaks);
}

TEST_CASE("ridge and group velocity on a synthetic dispersion") {
    SkwGrid grid;
    auto lor = [](double x, double x0, double g) { return g / (g * g + (x - x0) * (x - x0)); };
    for (int i = 0; i <= 1200; ++i) grid.omega.push_back(0.005 * i);
    for (int m = 0; m <= 8; ++m) {
        const double k = units::pi * m / 8.0;
        const double ek = std::sqrt(1.0 + 4.0 * std::sin(0.5 * k) * std::sin(0.5 * k));
        grid.k.push_back(k);
        grid.k_label.push_back("synthetic");
        std::vector<double> row;
        for (double w : grid.omega) row.push_back(lor(w, ek, 0.05) + 0.2 * lor(w, 2.0 * ek, 0.05));
        grid.s.push_back(row);
    }
    const auto ridge = dispersion_extract(grid, 0.05);
    REQUIRE(ridge.size() == grid.k.size());
    for (const auto& p : ridge) {
        const double ek = std::sqrt(1.0 + 4.0 * std::sin(0.5 * p.k) * std::sin(0.5 * p.k));
        CHECK(p.omega == doctest::Approx(ek).epsilon(5e-3));
    }
    // Max |d e(k)/dk| = max sin(k)/e(k) ~ 0.62 for this band.
    const double vg = group_velocity(ridge);
    CHECK(vg > 0.5);
    CHECK(vg < 0.7);

    CHECK_THROWS_AS(group_velocity(std::vector<RidgePoint>(3)), InsufficientRidge);
}
