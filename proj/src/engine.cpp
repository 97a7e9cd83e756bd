#include "mesonsim/engine.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>

#include "mesonsim/errors.hpp"

namespace mesonsim {

double Schedule::total_duration() const {
    double t = 0.0;
    for (const auto& s : segments) t += s.duration;
    return t;
}

std::pair<double, double> Schedule::fields_at(double t) const {
    double t0 = 0.0;
    for (const auto& s : segments) {
        if (t <= t0 + s.duration || &s == &segments.back()) {
            const double u = std::clamp((t - t0) / s.duration, 0.0, 1.0);
            return {s.hx_start + u * (s.hx_end - s.hx_start),
                    s.hz_start + u * (s.hz_end - s.hz_start)};
        }
        t0 += s.duration;
    }
    throw GridOutsideSchedule("schedule has no segments");
}

Schedule Schedule::constant(double hx, double hz, double duration) {
    Schedule s;
    s.segments.push_back({duration, hx, hx, hz, hz});
    return s;
}

Schedule Schedule::two_stage(double hx, double hz0, double hz1, double ramp_duration,
                             double hold_duration) {
    Schedule s;
    s.segments.push_back({ramp_duration, hx, hx, hz0, hz1});
    s.segments.push_back({hold_duration, hx, hx, hz1, hz1});
    return s;
}

// ---------------------------------------------------------------------------
// Ground state: thick-restart (Krylov-Schur) Lanczos in real arithmetic.
// ---------------------------------------------------------------------------

namespace {

void apply_real(const HamiltonianOp& op, const std::vector<double>& in,
                std::vector<double>& out, std::vector<cplx>& cin, std::vector<cplx>& cout) {
    // H is real; route through the complex kernel to keep one code path.
    const std::size_t d = in.size();
    for (std::size_t i = 0; i < d; ++i) cin[i] = cplx(in[i], 0.0);
    op.apply(cin.data(), cout.data());
    for (std::size_t i = 0; i < d; ++i) out[i] = cout[i].real();
}

double rdot(const std::vector<double>& a, const std::vector<double>& b) {
    constexpr std::size_t kChunk = 4096;
    double total = 0.0;
    for (std::size_t c = 0; c < a.size(); c += kChunk) {
        const std::size_t end = std::min(c + kChunk, a.size());
        double part = 0.0;
        for (std::size_t i = c; i < end; ++i) part += a[i] * b[i];
        total += part;
    }
    return total;
}

} // namespace

GroundStateResult ground_state(const IsingSpec& spec, double tol, int max_iter) {
    const HamiltonianOp op(spec);
    const std::size_t d = op.dim();
    const int m_max = static_cast<int>(std::min<std::size_t>(40, d));
    const int k_keep = std::min(10, m_max / 2);

    std::mt19937_64 rng(0x6d65736f6e73ULL);
    std::normal_distribution<double> gauss(0.0, 1.0);

    std::vector<std::vector<double>> basis;
    basis.reserve(m_max + 1);
    Eigen::MatrixXd t_mat = Eigen::MatrixXd::Zero(m_max, m_max);
    std::vector<cplx> cin(d), cout(d);
    std::vector<double> w(d);

    auto fresh_vector = [&]() {
        std::vector<double> v(d);
        for (auto& x : v) x = gauss(rng);
        // Orthogonalize against the current basis, twice.
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& u : basis) {
                const double h = rdot(u, v);
                for (std::size_t i = 0; i < d; ++i) v[i] -= h * u[i];
            }
        const double nv = std::sqrt(rdot(v, v));
        for (auto& x : v) x /= nv;
        return v;
    };

    basis.push_back(fresh_vector());
    int n_cols = 1;
    int matvecs = 0;
    double last_residual = 0.0;

    while (matvecs < max_iter) {
        // Expand the subspace to m_max columns.
        double beta = 0.0;
        while (n_cols < m_max && matvecs < max_iter) {
            const int c = n_cols - 1;
            apply_real(op, basis[c], w, cin, cout);
            ++matvecs;
            Eigen::VectorXd h = Eigen::VectorXd::Zero(n_cols);
            for (int pass = 0; pass < 2; ++pass) {
                for (int j = 0; j < n_cols; ++j) {
                    const double hj = rdot(basis[j], w);
                    h[j] += hj;
                    for (std::size_t i = 0; i < d; ++i) w[i] -= hj * basis[j][i];
                }
            }
            for (int j = 0; j < n_cols; ++j) {
                t_mat(j, c) = h[j];
                t_mat(c, j) = h[j];
            }
            beta = std::sqrt(rdot(w, w));
            if (beta < 1e-12 * std::max(1.0, op.norm_bound())) {
                beta = 0.0;
                break;  // invariant subspace: Rayleigh-Ritz is exact
            }
            std::vector<double> v(d);
            for (std::size_t i = 0; i < d; ++i) v[i] = w[i] / beta;
            basis.push_back(std::move(v));
            ++n_cols;
        }

        const int m = beta == 0.0 ? n_cols : n_cols - 1;  // columns with full T data
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t_mat.topLeftCorner(m, m));
        const Eigen::VectorXd& theta = es.eigenvalues();
        const Eigen::MatrixXd& s = es.eigenvectors();

        const double res_est = beta == 0.0 ? 0.0 : beta * std::abs(s(m - 1, 0));
        last_residual = res_est;
        if (res_est < tol || beta == 0.0 || matvecs >= max_iter) {
            // Assemble the Ritz vector and verify the residual explicitly.
            std::vector<double> y(d, 0.0);
            for (int j = 0; j < m; ++j) {
                const double sj = s(j, 0);
                for (std::size_t i = 0; i < d; ++i) y[i] += sj * basis[j][i];
            }
            apply_real(op, y, w, cin, cout);
            double res2 = 0.0;
            for (std::size_t i = 0; i < d; ++i) {
                const double r = w[i] - theta[0] * y[i];
                res2 += r * r;
            }
            const double res = std::sqrt(res2);
            if (res < std::max(tol, 1e-8) || beta == 0.0) {
                GroundStateResult out;
                out.energy = theta[0];
                out.iterations = matvecs;
                out.residual = res;
                out.state.n_sites = spec.n_sites;
                out.state.amp.resize(d);
                for (std::size_t i = 0; i < d; ++i) out.state.amp[i] = cplx(y[i], 0.0);
                normalize(out.state);
                return out;
            }
            if (matvecs >= max_iter)
                throw NoConvergence("ground_state failed to converge", matvecs, res);
            last_residual = res;
        }

        // Thick restart: keep the k lowest Ritz vectors plus the residual
        // direction; the projected matrix restarts as diag(theta_k).
        const int k = std::min(k_keep, m);
        std::vector<std::vector<double>> kept;
        kept.reserve(k + 1);
        for (int r = 0; r < k; ++r) {
            std::vector<double> y(d, 0.0);
            for (int j = 0; j < m; ++j) {
                const double sj = s(j, r);
                for (std::size_t i = 0; i < d; ++i) y[i] += sj * basis[j][i];
            }
            kept.push_back(std::move(y));
        }
        std::vector<double> v_next =
            beta == 0.0 ? std::vector<double>() : std::move(basis[m]);
        basis = std::move(kept);
        t_mat.setZero();
        for (int r = 0; r < k; ++r) t_mat(r, r) = theta[r];
        if (beta == 0.0) {
            basis.push_back(fresh_vector());
        } else {
            basis.push_back(std::move(v_next));
        }
        n_cols = k + 1;
    }
    throw NoConvergence("ground_state failed to converge", matvecs, last_residual);
}

// ---------------------------------------------------------------------------
// Propagator: adaptive short-iterative Lanczos exponential.
// ---------------------------------------------------------------------------

namespace {

// exp(-i T tau) e1 for the m x m projected matrix.
Eigen::VectorXcd projected_exp(const Eigen::MatrixXd& t_mat, int m, double tau) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t_mat.topLeftCorner(m, m));
    Eigen::VectorXcd u(m);
    const Eigen::VectorXd& lam = es.eigenvalues();
    const Eigen::MatrixXd& z = es.eigenvectors();
    Eigen::VectorXcd phases(m);
    for (int j = 0; j < m; ++j) phases[j] = std::exp(cplx(0.0, -lam[j] * tau)) * z(0, j);
    for (int i = 0; i < m; ++i) {
        cplx acc(0.0, 0.0);
        for (int j = 0; j < m; ++j) acc += z(i, j) * phases[j];
        u[i] = acc;
    }
    return u;
}

} // namespace

StateVector evolve_constant(const HamiltonianOp& op, const StateVector& state, double dt,
                            double tol) {
    if (state.dim() != op.dim()) throw DimensionMismatch("state dimension != 2^n_sites");
    if (dt < 0.0) throw ConfigInvalid("dt", "must be >= 0");
    const std::size_t d = op.dim();
    const int m_max = static_cast<int>(std::min<std::size_t>(40, d));

    StateVector cur = state;
    double remaining = dt;
    std::vector<std::vector<cplx>> basis;
    std::vector<cplx> w(d);
    Eigen::MatrixXd t_mat(m_max, m_max);

    while (remaining > 0.0) {
        const double nv = norm(cur);
        if (!(nv > 0.0)) throw KrylovBreakdown("state collapsed to zero norm", 0.0);

        basis.clear();
        t_mat.setZero();
        {
            std::vector<cplx> v0 = cur.amp;
            for (auto& x : v0) x /= nv;
            basis.push_back(std::move(v0));
        }

        int m = 0;
        bool exact = false;
        double beta = 0.0;
        double tau = remaining;
        bool accepted = false;

        while (m < m_max) {
            op.apply(basis[m].data(), w.data());
            for (int pass = 0; pass < 2; ++pass) {
                for (int j = std::max(0, m - 1); j <= m; ++j) {
                    const cplx h = dot(basis[j], w);
                    if (pass == 0) t_mat(j, m) += h.real(), t_mat(m, j) = t_mat(j, m);
                    axpy(w, -h, basis[j]);
                }
            }
            beta = std::sqrt(norm_sq(w));
            ++m;
            if (beta < 1e-13 * std::max(1.0, op.norm_bound())) {
                exact = true;
                break;
            }
            if (m >= 4 || m == m_max) {
                const double budget = tol * (tau / dt);
                const Eigen::VectorXcd u = projected_exp(t_mat, m, tau);
                if (beta * std::abs(u[m - 1]) < budget) {
                    accepted = true;
                    break;
                }
            }
            std::vector<cplx> v(d);
            for (std::size_t i = 0; i < d; ++i) v[i] = w[i] / beta;
            basis.push_back(std::move(v));
        }

        if (!exact && !accepted) {
            // Subspace is full: shrink the sub-step until the estimate fits.
            int halvings = 0;
            while (true) {
                const double budget = tol * (tau / dt);
                const Eigen::VectorXcd u = projected_exp(t_mat, m, tau);
                if (beta * std::abs(u[m - 1]) < budget) break;
                tau *= 0.5;
                if (++halvings > 60)
                    throw KrylovBreakdown("sub-stepping failed to reach the error budget",
                                          beta * std::abs(u[m - 1]));
            }
        }

        const Eigen::VectorXcd u = projected_exp(t_mat, m, tau);
        std::fill(cur.amp.begin(), cur.amp.end(), cplx(0.0, 0.0));
        for (int j = 0; j < m; ++j) axpy(cur.amp, nv * u[j], basis[j]);
        remaining -= tau;
        if (remaining < 1e-15 * dt) remaining = 0.0;
    }
    return cur;
}

StateVector evolve_constant(const IsingSpec& spec, const StateVector& state, double dt,
                            double tol) {
    HamiltonianOp op(spec);
    return evolve_constant(op, state, dt, tol);
}

// ---------------------------------------------------------------------------
// Schedules and quenches.
// ---------------------------------------------------------------------------

Trajectory evolve_schedule(const IsingSpec& spec_base, const Schedule& schedule,
                           const StateVector& initial, const std::vector<double>& grid,
                           const ObservableSet& obs, double micro_step, double tol) {
    if (schedule.segments.empty()) throw GridOutsideSchedule("schedule has no segments");
    const double total = schedule.total_duration();
    for (double t : grid)
        if (t < 0.0 || t > total + 1e-12)
            throw GridOutsideSchedule("grid time outside the schedule duration");

    // The uniform schedule fields replace the spec's uniform fields; the
    // static spec contributes couplings plus optional per-site offsets.
    IsingSpec static_part = spec_base;
    const double s = spec_base.frame_factor();
    static_part.hx.assign(spec_base.n_sites, 0.0);
    static_part.hz.assign(spec_base.n_sites, 0.0);
    if (!schedule.hx_site_offset.empty())
        for (int i = 0; i < spec_base.n_sites; ++i)
            static_part.hx[i] = s * schedule.hx_site_offset[i];
    if (!schedule.hz_site_offset.empty())
        for (int i = 0; i < spec_base.n_sites; ++i)
            static_part.hz[i] = s * schedule.hz_site_offset[i];
    HamiltonianOp op(static_part);

    Trajectory traj;
    traj.n_sites = spec_base.n_sites;
    StateVector cur = initial;
    double t_now = 0.0;

    for (double t_snap : grid) {
        double span = t_snap - t_now;
        while (span > 1e-15) {
            const double h = std::min(micro_step, span);
            const auto [hx_mid, hz_mid] = schedule.fields_at(t_now + 0.5 * h);
            op.set_uniform_fields(s * hx_mid, s * hz_mid);
            cur = evolve_constant(op, cur, h, tol * std::max(h / total, 1e-3));
            t_now += h;
            span = t_snap - t_now;
        }
        traj.times.push_back(t_snap);
        traj.snapshots.push_back(record_snapshot(cur, spec_base, obs));
        if (obs.keep_states) traj.states.push_back(cur);
    }
    return traj;
}

Trajectory quench_all_zeros(const IsingSpec& spec, const std::vector<double>& grid,
                            const ObservableSet& obs, double tol) {
    HamiltonianOp op(spec);
    Trajectory traj;
    traj.n_sites = spec.n_sites;
    StateVector cur = all_zeros_state(spec.n_sites);
    double t_now = 0.0;
    for (double t_snap : grid) {
        if (t_snap < t_now) throw GridOutsideSchedule("grid times must be non-decreasing");
        if (t_snap > t_now) {
            cur = evolve_constant(op, cur, t_snap - t_now, tol);
            t_now = t_snap;
        }
        traj.times.push_back(t_snap);
        traj.snapshots.push_back(record_snapshot(cur, spec, obs));
        if (obs.keep_states) traj.states.push_back(cur);
    }
    return traj;
}

std::vector<double> uniform_grid(double t_max, int n_points) {
    std::vector<double> g(n_points);
    for (int i = 0; i < n_points; ++i) g[i] = t_max * i / (n_points - 1);
    return g;
}

double energy_expectation(const HamiltonianOp& op, const StateVector& state) {
    std::vector<cplx> w(state.dim());
    op.apply(state.amp.data(), w.data());
    return dot(state.amp, w).real();
}

} // namespace mesonsim
