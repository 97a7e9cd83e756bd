#include "mesonsim/spectroscopy.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>

#include "mesonsim/errors.hpp"
#include "mesonsim/units.hpp"

namespace mesonsim {

namespace {

std::size_t rotate_bits(std::size_t b, int n) {
    const std::size_t mask = (std::size_t{1} << n) - 1;
    return ((b << 1) | (b >> (n - 1))) & mask;
}

} // namespace

Spectrum full_spectrum(const IsingSpec& spec, bool want_vectors) {
    if (spec.n_sites > 14)
        throw DimensionTooLarge("dense diagonalization capped at n = 14, got n = " +
                                std::to_string(spec.n_sites));
    const HamiltonianOp op(spec);
    const lapack_int dim = static_cast<lapack_int>(op.dim());
    std::vector<double> a(static_cast<std::size_t>(dim) * dim, 0.0);
    for (lapack_int b = 0; b < dim; ++b)
        a[static_cast<std::size_t>(b) * dim + b] = op.diagonal(b);
    for (int i = 0; i < spec.n_sites; ++i) {
        const double c = spec.hx[i];
        if (c == 0.0) continue;
        const lapack_int bit = lapack_int{1} << i;
        for (lapack_int b = 0; b < dim; ++b)
            a[static_cast<std::size_t>(b) * dim + (b ^ bit)] += c;
    }
    std::vector<double> w(dim);
    const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, want_vectors ? 'V' : 'N', 'L',
                                           dim, a.data(), dim, w.data());
    if (info != 0)
        throw NoConvergence("dsyevd failed with info = " + std::to_string(info), 0, 0.0);

    Spectrum out;
    out.n_sites = spec.n_sites;
    out.energies = std::move(w);
    out.momentum.assign(dim, -1);
    if (want_vectors) {
        out.eigenvectors = Eigen::Map<Eigen::MatrixXd>(a.data(), dim, dim);
        out.has_eigenvectors = true;
    }
    return out;
}

std::vector<double> lowest_eigenvalues(const IsingSpec& spec, int count, double tol) {
    if (spec.n_sites > 20)
        throw DimensionTooLarge("iterative eigenpairs capped at n = 20, got n = " +
                                std::to_string(spec.n_sites));
    const HamiltonianOp op(spec);
    const std::size_t d = op.dim();
    if (static_cast<std::size_t>(count) >= d) throw DimensionTooLarge("count >= dim");
    const int m_max = static_cast<int>(std::min<std::size_t>(std::max(40, 3 * count), d));
    const int k_keep = std::min(count + 10, m_max - 2);

    std::mt19937_64 rng(0x6c616e637aULL);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<std::vector<cplx>> basis;
    Eigen::MatrixXd t_mat = Eigen::MatrixXd::Zero(m_max, m_max);
    std::vector<cplx> w(d);

    auto fresh = [&]() {
        std::vector<cplx> v(d);
        for (auto& x : v) x = cplx(gauss(rng), 0.0);
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& u : basis) axpy(v, -dot(u, v), u);
        const double nv = std::sqrt(norm_sq(v));
        for (auto& x : v) x /= nv;
        return v;
    };

    basis.push_back(fresh());
    int n_cols = 1;
    int matvecs = 0;
    const int max_matvecs = 20000;

    while (true) {
        double beta = 0.0;
        while (n_cols < m_max && matvecs < max_matvecs) {
            const int c = n_cols - 1;
            op.apply(basis[c].data(), w.data());
            ++matvecs;
            for (int pass = 0; pass < 2; ++pass) {
                for (int j = 0; j < n_cols; ++j) {
                    const cplx h = dot(basis[j], w);
                    if (pass == 0) {
                        t_mat(j, c) += h.real();
                        t_mat(c, j) = t_mat(j, c);
                    }
                    axpy(w, -h, basis[j]);
                }
            }
            beta = std::sqrt(norm_sq(w));
            if (beta < 1e-12 * std::max(1.0, op.norm_bound())) {
                beta = 0.0;
                break;
            }
            std::vector<cplx> v(d);
            for (std::size_t i = 0; i < d; ++i) v[i] = w[i] / beta;
            basis.push_back(std::move(v));
            ++n_cols;
        }

        const int m = beta == 0.0 ? n_cols : n_cols - 1;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t_mat.topLeftCorner(m, m));
        const auto& theta = es.eigenvalues();
        const auto& s = es.eigenvectors();

        bool converged = m >= count;
        if (converged && beta != 0.0)
            for (int r = 0; r < count; ++r)
                if (beta * std::abs(s(m - 1, r)) >= tol) {
                    converged = false;
                    break;
                }
        if (converged || matvecs >= max_matvecs) {
            if (!converged)
                throw NoConvergence("lowest_eigenvalues failed to converge", matvecs,
                                    beta);
            return {theta.data(), theta.data() + count};
        }

        const int k = std::min(k_keep, m);
        std::vector<std::vector<cplx>> kept;
        kept.reserve(k + 1);
        for (int r = 0; r < k; ++r) {
            std::vector<cplx> y(d, cplx(0.0, 0.0));
            for (int j = 0; j < m; ++j) axpy(y, cplx(s(j, r), 0.0), basis[j]);
            kept.push_back(std::move(y));
        }
        std::vector<cplx> v_next = beta == 0.0 ? fresh() : std::move(basis[m]);
        basis = std::move(kept);
        basis.push_back(std::move(v_next));
        t_mat.setZero();
        for (int r = 0; r < k; ++r) t_mat(r, r) = theta[r];
        n_cols = k + 1;
    }
}

void label_momenta(Spectrum& spectrum, const IsingSpec& spec) {
    if (spec.boundary != Boundary::PBC)
        throw ConfigInvalid("spec", "momentum labels require PBC");
    if (!spectrum.has_eigenvectors)
        throw MissingEigenvectors("momentum labels require dense eigenvectors");
    const int n = spec.n_sites;
    const std::size_t d = std::size_t{1} << n;
    const auto& psi = spectrum.eigenvectors;
    spectrum.momentum.assign(d, -1);

    std::size_t g0 = 0;
    while (g0 < d) {
        std::size_t g1 = g0 + 1;
        while (g1 < d && spectrum.energies[g1] - spectrum.energies[g1 - 1] < 1e-9) ++g1;
        const int g = static_cast<int>(g1 - g0);
        Eigen::MatrixXd m_block(g, g);
        for (int r = 0; r < g; ++r) {
            for (int c = 0; c < g; ++c) {
                double acc = 0.0;
                for (std::size_t b = 0; b < d; ++b)
                    acc += psi(rotate_bits(b, n), g0 + r) * psi(b, g0 + c);
                m_block(r, c) = acc;
            }
        }
        Eigen::EigenSolver<Eigen::MatrixXd> es(m_block);
        std::vector<int> ks;
        for (int j = 0; j < g; ++j) {
            const double phase = std::arg(es.eigenvalues()[j]);
            int m = static_cast<int>(std::lround(phase * n / units::two_pi));
            m = ((m % n) + n) % n;
            ks.push_back(m);
        }
        std::sort(ks.begin(), ks.end());
        for (int j = 0; j < g; ++j) spectrum.momentum[g0 + j] = ks[j];
        g0 = g1;
    }
}

// ---------------------------------------------------------------------------
// Lehmann DSF
// ---------------------------------------------------------------------------

namespace {

// psi_k = (sz_k - <0|sz_k|0>) |0> for a plane-wave momentum k.
std::vector<cplx> mode_state_plane_wave(const StateVector& gs, double k) {
    const int n = gs.n_sites;
    const std::size_t d = gs.dim();
    std::vector<cplx> phase(n);
    for (int j = 0; j < n; ++j) phase[j] = std::exp(cplx(0.0, k * j)) / std::sqrt(double(n));
    std::vector<cplx> out(d);
    cplx mean(0.0, 0.0);
    for (std::size_t b = 0; b < d; ++b) {
        cplx f(0.0, 0.0);
        for (int j = 0; j < n; ++j) f += (b >> j) & 1u ? -phase[j] : phase[j];
        out[b] = f * gs.amp[b];
        mean += std::conj(gs.amp[b]) * out[b];
    }
    for (std::size_t b = 0; b < d; ++b) out[b] -= mean * gs.amp[b];
    return out;
}

// Weighted sz sum with arbitrary real site profile, connected part.
std::vector<cplx> mode_state_profile(const StateVector& gs, const std::vector<double>& f) {
    const int n = gs.n_sites;
    const std::size_t d = gs.dim();
    std::vector<cplx> out(d);
    cplx mean(0.0, 0.0);
    for (std::size_t b = 0; b < d; ++b) {
        double acc = 0.0;
        for (int j = 0; j < n; ++j) acc += (b >> j) & 1u ? -f[j] : f[j];
        out[b] = acc * gs.amp[b];
        mean += std::conj(gs.amp[b]) * out[b];
    }
    for (std::size_t b = 0; b < d; ++b) out[b] -= mean * gs.amp[b];
    return out;
}

double lorentzian(double x, double eta) {
    return (eta / units::pi) / (x * x + eta * eta);
}

} // namespace

std::vector<double> dsf_lehmann(const Spectrum& spectrum, const IsingSpec& spec, double k,
                                const std::vector<double>& omega_grid, double eta) {
    if (!spectrum.has_eigenvectors)
        throw MissingEigenvectors("dsf_lehmann requires dense eigenvectors");
    const std::size_t d = std::size_t{1} << spec.n_sites;
    StateVector gs;
    gs.n_sites = spec.n_sites;
    gs.amp.resize(d);
    for (std::size_t b = 0; b < d; ++b) gs.amp[b] = cplx(spectrum.eigenvectors(b, 0), 0.0);

    const std::vector<cplx> phi = mode_state_plane_wave(gs, k);
    // Overlaps <n|phi> for all eigenstates: two real mat-vecs.
    Eigen::VectorXd re(d), im(d);
    for (std::size_t b = 0; b < d; ++b) {
        re[b] = phi[b].real();
        im[b] = phi[b].imag();
    }
    const Eigen::VectorXd ov_re = spectrum.eigenvectors.transpose() * re;
    const Eigen::VectorXd ov_im = spectrum.eigenvectors.transpose() * im;

    std::vector<double> s(omega_grid.size(), 0.0);
    const double e0 = spectrum.energies[0];
    for (std::size_t n = 1; n < d; ++n) {
        const double w2 = ov_re[n] * ov_re[n] + ov_im[n] * ov_im[n];
        if (w2 < 1e-14) continue;
        const double gap = spectrum.energies[n] - e0;
        for (std::size_t i = 0; i < omega_grid.size(); ++i)
            s[i] += w2 * lorentzian(omega_grid[i] - gap, eta);
    }
    return s;
}

SkwGrid dsf_lehmann_grid(const Spectrum& spectrum, const IsingSpec& spec,
                         const std::vector<double>& omega_grid, double eta) {
    SkwGrid grid;
    grid.omega = omega_grid;
    grid.eta = eta;
    const int n = spec.n_sites;
    const double domega =
        omega_grid.size() > 1 ? omega_grid[1] - omega_grid[0] : 1.0;
    for (int m = 0; m <= n / 2; ++m) {
        const double k = units::two_pi * m / n;
        grid.k.push_back(k);
        grid.k_label.push_back("2pi*" + std::to_string(m) + "/" + std::to_string(n));
        grid.s.push_back(dsf_lehmann(spectrum, spec, k, omega_grid, eta));
        double sum = 0.0;
        for (double v : grid.s.back()) sum += v * domega;
        grid.sum_rule.push_back(sum);
    }
    return grid;
}

// ---------------------------------------------------------------------------
// Time-domain DSF
// ---------------------------------------------------------------------------

SkwGrid dsf_time_domain(const IsingSpec& spec, const TimeDomainOptions& opts) {
    if (spec.n_sites > 24)
        throw DimensionTooLarge("time-domain DSF capped at n = 24");
    const auto gs = ground_state(spec, 1e-9);
    const HamiltonianOp op(spec);

    // Mode profiles.
    std::vector<std::vector<cplx>> mode_states;
    SkwGrid grid;
    grid.eta = opts.eta;
    if (spec.boundary == Boundary::PBC) {
        const int n = spec.n_sites;
        for (int m = 0; m <= n / 2; ++m) {
            const double k = units::two_pi * m / n;
            grid.k.push_back(k);
            grid.k_label.push_back("2pi*" + std::to_string(m) + "/" + std::to_string(n));
            mode_states.push_back(mode_state_plane_wave(gs.state, k));
        }
    } else {
        // Reflection-symmetric sine modes; ladders use the rung index on
        // both legs, plain chains use the site index.
        const bool ladder = !spec.nn_bonds.empty() && spec.n_sites % 2 == 0 &&
                            [&] {
                                for (const auto& [i, j] : spec.nn_bonds)
                                    if (j - i == spec.n_sites / 2) return true;
                                return false;
                            }();
        const int len = ladder ? spec.n_sites / 2 : spec.n_sites;
        const int legs = ladder ? 2 : 1;
        for (int m = 1; m <= len; ++m) {
            const double k = units::pi * m / (len + 1);
            std::vector<double> f(spec.n_sites, 0.0);
            double norm2 = 0.0;
            for (int leg = 0; leg < legs; ++leg)
                for (int r = 0; r < len; ++r) {
                    const double v = std::sin(k * (r + 1));
                    f[leg * len + r] = v;
                    norm2 += v * v;
                }
            for (auto& v : f) v /= std::sqrt(norm2);
            grid.k.push_back(k);
            grid.k_label.push_back("sine m=" + std::to_string(m));
            mode_states.push_back(mode_state_profile(gs.state, f));
        }
        {
            std::vector<double> f(spec.n_sites, 1.0 / std::sqrt(double(spec.n_sites)));
            grid.k.push_back(0.0);
            grid.k_label.push_back("uniform");
            mode_states.push_back(mode_state_profile(gs.state, f));
        }
    }

    const int n_t = static_cast<int>(std::round(opts.t_max / opts.dt_sample)) + 1;
    grid.omega.resize(opts.omega_points);
    for (int i = 0; i < opts.omega_points; ++i)
        grid.omega[i] = opts.omega_max * i / (opts.omega_points - 1);
    const double domega = grid.omega.size() > 1 ? grid.omega[1] - grid.omega[0] : 1.0;

    for (std::size_t mi = 0; mi < mode_states.size(); ++mi) {
        const auto& psi0 = mode_states[mi];
        const double w0 = std::sqrt(norm_sq(psi0));
        std::vector<cplx> corr(n_t);
        if (w0 < 1e-12) {
            std::fill(corr.begin(), corr.end(), cplx(0.0, 0.0));
        } else {
            StateVector cur;
            cur.n_sites = spec.n_sites;
            cur.amp = psi0;
            for (auto& x : cur.amp) x /= w0;
            const std::vector<cplx> ref = cur.amp;
            for (int it = 0; it < n_t; ++it) {
                const double t = it * opts.dt_sample;
                if (it > 0)
                    cur = evolve_constant(op, cur, opts.dt_sample, opts.tol / n_t);
                corr[it] = w0 * w0 * std::exp(cplx(0.0, gs.energy * t)) * dot(ref, cur.amp);
            }
        }
        // Hann window + exponential damping, half-line cosine transform.
        std::vector<double> s(grid.omega.size(), 0.0);
        for (std::size_t i = 0; i < grid.omega.size(); ++i) {
            cplx acc(0.0, 0.0);
            for (int it = 0; it < n_t; ++it) {
                const double t = it * opts.dt_sample;
                const double hann = 0.5 * (1.0 + std::cos(units::pi * t / opts.t_max));
                const double wq = (it == 0 || it == n_t - 1) ? 0.5 : 1.0;
                acc += wq * hann * std::exp(-opts.eta * t) *
                       std::exp(cplx(0.0, grid.omega[i] * t)) * corr[it];
            }
            s[i] = acc.real() * opts.dt_sample / units::pi;
        }
        for (auto& v : s) {
            if (v < 0.0) {
                grid.clamp_floor = std::min(grid.clamp_floor, v);
                v = 0.0;
            }
        }
        grid.s.push_back(std::move(s));
        double sum = 0.0;
        for (double v : grid.s.back()) sum += v * domega;
        grid.sum_rule.push_back(sum);
    }
    return grid;
}

// ---------------------------------------------------------------------------
// Ridge, velocity, peaks
// ---------------------------------------------------------------------------

namespace {

// Quadratic vertex through three points on log scale; returns (x, value).
std::pair<double, double> refine_log_quadratic(double x0, double dx, double ym, double y0,
                                               double yp) {
    const double lm = std::log(std::max(ym, 1e-300));
    const double l0 = std::log(std::max(y0, 1e-300));
    const double lp = std::log(std::max(yp, 1e-300));
    const double denom = lm - 2.0 * l0 + lp;
    if (denom >= -1e-300) return {x0, y0};
    const double shift = 0.5 * (lm - lp) / denom;
    const double lv = l0 - 0.25 * (lm - lp) * shift;
    return {x0 + shift * dx, std::exp(lv)};
}

} // namespace

std::vector<RidgePoint> dispersion_extract(const SkwGrid& grid, double noise_floor_rel) {
    if (grid.k.size() < 5) throw InsufficientRidge("need >= 5 k points");
    double global_max = 0.0;
    for (const auto& row : grid.s)
        for (double v : row) global_max = std::max(global_max, v);

    std::vector<RidgePoint> ridge;
    for (std::size_t ki = 0; ki < grid.k.size(); ++ki) {
        if (grid.k_label[ki] == "uniform") continue;
        const auto& s = grid.s[ki];
        // Per-row floor: rows far from the dominant momentum carry little
        // absolute weight but still have a clean lowest excitation.
        double row_max = 0.0;
        for (double v : s) row_max = std::max(row_max, v);
        const double floor = noise_floor_rel * row_max;
        // Rows without a qualifying interior maximum (e.g. the lowest mode
        // pushed past omega_max, or a monotonic tail) are skipped.
        for (std::size_t i = 1; i + 1 < s.size(); ++i) {
            if (s[i] >= floor && s[i] > 0.0 && s[i] >= s[i - 1] && s[i] > s[i + 1]) {
                const double dx = grid.omega[1] - grid.omega[0];
                const auto [x, v] = refine_log_quadratic(grid.omega[i], dx, s[i - 1], s[i],
                                                         s[i + 1]);
                ridge.push_back({grid.k[ki], x, v / global_max});
                break;
            }
        }
    }
    if (ridge.size() < 5)
        throw RidgeNotFound("only " + std::to_string(ridge.size()) +
                            " rows carry a resolvable lowest excitation (need >= 5)");
    std::sort(ridge.begin(), ridge.end(),
              [](const RidgePoint& a, const RidgePoint& b) { return a.k < b.k; });
    return ridge;
}

double group_velocity(const std::vector<RidgePoint>& ridge) {
    if (ridge.size() < 5) throw InsufficientRidge("need >= 5 ridge points");
    const int n = static_cast<int>(ridge.size());
    double vmax = 0.0;
    for (int i = 1; i + 1 < n; ++i) {
        const double dk = ridge[i + 1].k - ridge[i - 1].k;
        if (dk <= 0.0) continue;
        vmax = std::max(vmax, std::abs((ridge[i + 1].omega - ridge[i - 1].omega) / dk));
    }
    if (vmax == 0.0) throw InsufficientRidge("ridge is flat or unordered");
    return vmax;
}

std::vector<Peak> peak_extract(const std::vector<double>& omega_grid,
                               const std::vector<double>& s, double prominence_rel,
                               double omega_min) {
    if (s.size() != omega_grid.size() || s.size() < 3)
        throw NoPeaks("slice too short for peak extraction");
    double global_max = 0.0;
    for (double v : s) global_max = std::max(global_max, v);
    if (global_max <= 0.0) throw NoPeaks("slice is identically zero");
    const double floor = prominence_rel * global_max;

    std::vector<Peak> peaks;
    const int n = static_cast<int>(s.size());
    for (int i = 1; i + 1 < n; ++i) {
        if (omega_grid[i] < omega_min) continue;
        if (!(s[i] >= s[i - 1] && s[i] > s[i + 1])) continue;
        // Prominence: drop to the highest valley separating this maximum
        // from higher ground on either side.
        double min_l = s[i];
        for (int j = i - 1; j >= 0; --j) {
            if (s[j] > s[i]) break;
            min_l = std::min(min_l, s[j]);
        }
        double min_r = s[i];
        for (int j = i + 1; j < n; ++j) {
            if (s[j] > s[i]) break;
            min_r = std::min(min_r, s[j]);
        }
        const double prominence = s[i] - std::max(min_l, min_r);
        if (prominence < floor) continue;
        const double dx = omega_grid[1] - omega_grid[0];
        const auto [x, v] = refine_log_quadratic(omega_grid[i], dx, s[i - 1], s[i], s[i + 1]);
        peaks.push_back({x, v});
    }
    if (peaks.empty()) throw NoPeaks("no local maxima above the prominence floor");
    return peaks;
}

} // namespace mesonsim
