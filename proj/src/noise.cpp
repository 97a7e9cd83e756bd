#include "mesonsim/noise.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mesonsim/engine.hpp"
#include "mesonsim/errors.hpp"
#include "mesonsim/observables.hpp"
#include "mesonsim/specfit.hpp"
#include "mesonsim/spectroscopy.hpp"
#include "mesonsim/units.hpp"

namespace mesonsim {

double thermal_position_std_um(double temperature_uk, double trap_freq_rad_per_us) {
    if (temperature_uk < 0.0 || trap_freq_rad_per_us <= 0.0)
        throw ConfigInvalid("trap", "temperature >= 0 and trap frequency > 0 required");
    constexpr double kb = 1.380649e-23;              // J/K
    constexpr double m_rb87 = 86.909 * 1.66053906660e-27;  // kg
    // sigma [m] = sqrt(kB T / m) / omega; with T in uK and omega in rad/us
    // the unit factors collapse to a single 1e-6 under the root.
    return std::sqrt(kb * temperature_uk * 1e-6 / m_rb87) / trap_freq_rad_per_us;
}

DisorderRealization sample_disorder(const NoiseParams& params, const Register& nominal,
                                    std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    DisorderRealization real;
    real.rabi_scale = 1.0 + params.rabi_rel_std * gauss(rng);
    real.delta_offset = params.delta_abs_std * gauss(rng);
    real.positions = nominal;
    // Jittered coordinates no longer satisfy the exact-shape invariants.
    real.positions.geometry.kind = GeometryKind::Custom;

    const bool any_jitter = params.position_std_um[0] > 0.0 || params.position_std_um[1] > 0.0;
    if (!any_jitter) return real;
    const double floor = 0.5 * nominal.min_pairwise_distance();
    for (int attempt = 0;; ++attempt) {
        if (attempt > params.resample_limit)
            throw ResampleLimitExceeded("position jitter kept violating the distance floor");
        for (int i = 0; i < nominal.size(); ++i)
            for (int ax = 0; ax < 2; ++ax)
                real.positions.positions[i][ax] =
                    nominal.positions[i][ax] + params.position_std_um[ax] * gauss(rng);
        if (nominal.size() < 2 || real.positions.min_pairwise_distance() >= floor) break;
        ++real.resamples;
    }
    return real;
}

IsingSpec disordered_spec(const RydbergParams& nominal, const DisorderRealization& real,
                          double rel_cutoff) {
    const int n = real.positions.size();
    if (!(nominal.delta.size() == 1 || static_cast<int>(nominal.delta.size()) == n))
        throw ConfigInvalid("delta", "scalar or one value per site");
    IsingSpec spec;
    spec.n_sites = n;
    spec.sign = SignFrame::Antiferro;
    spec.boundary = real.positions.boundary;
    spec.hx.assign(n, 0.5 * real.rabi_scale * nominal.omega);
    spec.hz.resize(n);
    for (int i = 0; i < n; ++i) {
        const double d = nominal.delta.size() == 1 ? nominal.delta[0] : nominal.delta[i];
        spec.hz[i] = 0.5 * (d + real.delta_offset);
    }
    if (n >= 2) {
        const CouplingMatrix cm = rydberg_couplings(real.positions, nominal.c6, rel_cutoff);
        spec.couplings = cm.entries;
        for (const auto& c : cm.entries)
            if (std::abs(c.value - cm.max_abs) < 0.5 * cm.max_abs)
                spec.nn_bonds.emplace_back(c.i, c.j);
    }
    return spec;
}

Trajectory trajectory_run(const RydbergParams& nominal, const DisorderRealization& real,
                          const QuenchProtocol& protocol, double dephasing_rate,
                          std::mt19937_64& rng) {
    if (protocol.grid.empty()) throw ConfigInvalid("grid", "empty sample grid");
    const IsingSpec spec = disordered_spec(nominal, real);
    const HamiltonianOp op(spec);
    const double t_end = protocol.grid.back();

    // Per-site sigma^z jump times at rate gamma/2: the waiting times are
    // state-independent because sz^dag sz = 1.
    struct Jump {
        double t;
        int site;
    };
    std::vector<Jump> jumps;
    if (dephasing_rate > 0.0) {
        std::exponential_distribution<double> wait(0.5 * dephasing_rate);
        for (int i = 0; i < spec.n_sites; ++i) {
            double t = wait(rng);
            while (t < t_end) {
                jumps.push_back({t, i});
                t += wait(rng);
            }
        }
        std::sort(jumps.begin(), jumps.end(),
                  [](const Jump& a, const Jump& b) { return a.t < b.t; });
    }

    Trajectory traj;
    traj.n_sites = spec.n_sites;
    StateVector psi = protocol.initial.amp.empty() ? all_zeros_state(spec.n_sites)
                                                   : protocol.initial;
    if (psi.dim() != spec.dim())
        throw DimensionMismatch("initial state dimension does not match the register");
    double cur = 0.0;
    std::size_t ji = 0;
    const double tol_step = protocol.tol / protocol.grid.size();
    for (double tg : protocol.grid) {
        while (ji < jumps.size() && jumps[ji].t <= tg) {
            const double dt = jumps[ji].t - cur;
            if (dt > 0.0) psi = evolve_constant(op, psi, dt, tol_step);
            cur = jumps[ji].t;
            const std::uint64_t bit = std::uint64_t{1} << jumps[ji].site;
            for (std::size_t b = 0; b < psi.dim(); ++b)
                if (b & bit) psi.amp[b] = -psi.amp[b];
            normalize(psi);
            ++ji;
        }
        if (tg > cur) {
            psi = evolve_constant(op, psi, tg - cur, tol_step);
            cur = tg;
        }
        traj.times.push_back(tg);
        traj.snapshots.push_back(record_snapshot(psi, spec, protocol.obs));
        if (protocol.obs.keep_states) traj.states.push_back(psi);
    }
    return traj;
}

std::vector<std::uint64_t> sample_bitstrings(const StateVector& state, int shots,
                                             std::mt19937_64& rng) {
    const std::size_t d = state.dim();
    std::vector<double> cdf(d);
    double acc = 0.0;
    for (std::size_t b = 0; b < d; ++b) {
        acc += std::norm(state.amp[b]);
        cdf[b] = acc;
    }
    std::uniform_real_distribution<double> uni(0.0, acc);
    std::vector<std::uint64_t> out(shots);
    for (int s = 0; s < shots; ++s) {
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), uni(rng));
        out[s] = static_cast<std::uint64_t>(std::min<std::ptrdiff_t>(
            it - cdf.begin(), static_cast<std::ptrdiff_t>(d) - 1));
    }
    return out;
}

void apply_spam(std::vector<std::uint64_t>& bitstrings, int n_sites, const SpamParams& spam,
                std::mt19937_64& rng) {
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (auto& w : bitstrings) {
        for (int i = 0; i < n_sites; ++i) {
            const std::uint64_t bit = std::uint64_t{1} << i;
            if (uni(rng) < spam.eta) w &= ~bit;  // preparation: forced to 0
            if (w & bit) {
                if (uni(rng) < spam.eps_prime) w &= ~bit;
            } else {
                if (uni(rng) < spam.eps) w |= bit;
            }
        }
    }
}

namespace {

double pairwise_sum(const double* x, std::size_t n) {
    if (n <= 8) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc += x[i];
        return acc;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(x, half) + pairwise_sum(x + half, n - half);
}

double percentile(std::vector<double> v, double p) {
    std::sort(v.begin(), v.end());
    const double pos = p * (v.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const double frac = pos - lo;
    if (lo + 1 >= v.size()) return v.back();
    return v[lo] * (1.0 - frac) + v[lo + 1] * frac;
}

EnsembleBand make_band(const std::vector<std::vector<double>>& per_traj_by_time) {
    EnsembleBand band;
    for (const auto& vals : per_traj_by_time) {
        band.mean.push_back(pairwise_sum(vals.data(), vals.size()) / vals.size());
        band.lo.push_back(percentile(vals, 0.15));
        band.hi.push_back(percentile(vals, 0.85));
    }
    return band;
}

} // namespace

EnsembleResult monte_carlo_ensemble(const RydbergParams& nominal, const Register& reg,
                                    const QuenchProtocol& protocol, const NoiseParams& params,
                                    std::uint64_t master_seed) {
    if (params.n_trajectories < 2)
        throw InvalidCount("ensemble needs >= 2 trajectories");
    QuenchProtocol proto = protocol;
    proto.obs.keep_states = true;
    proto.obs.magnetization = true;

    const std::size_t n_t = protocol.grid.size();
    std::vector<std::vector<double>> mags(n_t), dws(n_t);  // [time][trajectory]
    std::vector<std::vector<double>> sz_acc(n_t, std::vector<double>(reg.size(), 0.0));

    EnsembleResult out;
    out.times = protocol.grid;
    out.n_requested = params.n_trajectories;
    std::string first_error;
    IsingSpec nominal_spec;
    bool have_spec = false;

    for (int k = 0; k < params.n_trajectories; ++k) {
        std::mt19937_64 rng(master_seed * 0x9e3779b97f4a7c15ULL + 0x1000 + k);
        try {
            const DisorderRealization real = sample_disorder(params, reg, rng);
            const IsingSpec spec = disordered_spec(nominal, real);
            if (!have_spec) {
                nominal_spec = spec;
                have_spec = true;
            }
            const Trajectory traj =
                trajectory_run(nominal, real, proto, params.dephasing_rate, rng);
            for (std::size_t it = 0; it < n_t; ++it) {
                auto shots = sample_bitstrings(traj.states[it], params.shots_per_step, rng);
                apply_spam(shots, reg.size(), params.spam, rng);
                const auto sz = magnetization_from_bitstrings(shots, reg.size());
                mags[it].push_back(pairwise_sum(sz.data(), sz.size()) / sz.size());
                dws[it].push_back(domain_wall_density_from_bitstrings(shots, spec));
                for (int i = 0; i < reg.size(); ++i)
                    sz_acc[it][i] += traj.snapshots[it].sz[i];
            }
        } catch (const Error& e) {
            ++out.n_failed;
            if (first_error.empty()) first_error = e.what();
        }
    }

    const int n_ok = params.n_trajectories - out.n_failed;
    if (n_ok < 2 || n_ok < 0.8 * params.n_trajectories)
        throw NoConvergence("ensemble failure rate too high; first error: " + first_error,
                            out.n_failed, 0.0);
    out.magnetization = make_band(mags);
    out.domain_walls = make_band(dws);
    out.sz_mean.resize(n_t);
    for (std::size_t it = 0; it < n_t; ++it) {
        out.sz_mean[it] = sz_acc[it];
        for (auto& v : out.sz_mean[it]) v /= n_ok;
    }
    return out;
}

RescaleResult miscalibration_rescale(const RydbergParams& nominal, const Register& reg,
                                     const Miscalibration& miscal, double t_max_tj,
                                     int n_points) {
    RescaleResult res;
    res.coupling_scale = std::pow(1.0 + miscal.spacing_rel, -6.0);
    if (miscal.spacing_rel == 0.0 && miscal.detuning_rel == 0.0) return res;

    Register reg_mis = reg;
    for (auto& p : reg_mis.positions)
        for (double& c : p) c *= 1.0 + miscal.spacing_rel;
    reg_mis.geometry.radius_um *= 1.0 + miscal.spacing_rel;
    reg_mis.geometry.leg_spacing_um *= 1.0 + miscal.spacing_rel;
    reg_mis.geometry.rung_spacing_um *= 1.0 + miscal.spacing_rel;
    RydbergParams par_mis = nominal;
    for (double& d : par_mis.delta) d *= 1.0 + miscal.detuning_rel;

    // Fixed physical horizon (t_max_tj in nominal J units) for both runs.
    const double j_nn = rydberg_couplings(reg, nominal.c6).max_abs;
    const std::vector<double> grid = uniform_grid(t_max_tj / j_nn, n_points);

    auto quench_spectrum = [&](const RydbergParams& par, const Register& r) {
        DisorderRealization ident;
        ident.positions = r;
        const IsingSpec spec = disordered_spec(par, ident);
        ObservableSet obs;
        obs.magnetization = true;
        const Trajectory traj = quench_all_zeros(spec, grid, obs);
        std::vector<double> m(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) {
            double s = 0.0;
            for (double v : traj.snapshots[i].sz) s += v;
            m[i] = s / spec.n_sites;
        }
        const FftPeaks pk = fft_peaks(grid, m, 4);
        if (pk.omega.empty())
            throw PeakNotFound("no quench oscillation peak for the rescale reference");
        return pk;
    };

    const FftPeaks nom = quench_spectrum(nominal, reg);
    const FftPeaks mis = quench_spectrum(par_mis, reg_mis);

    // Pair each nominal peak with the unused miscalibrated peak closest in
    // log frequency; a small coherent shift never moves a line across its
    // neighbors, while rank-based matching can swap modes when relative
    // magnitudes reorder.
    std::vector<bool> used(mis.omega.size(), false);
    auto partner_of = [&](double w) {
        int best = -1;
        double best_d = 0.25;  // reject pairs further than ~25%
        for (std::size_t j = 0; j < mis.omega.size(); ++j) {
            if (used[j]) continue;
            const double d = std::abs(std::log(mis.omega[j] / w));
            if (d < best_d) { best_d = d; best = static_cast<int>(j); }
        }
        return best;
    };
    // Scale from the strongest nominal line (fft_peaks sorts by magnitude).
    const int j0 = partner_of(nom.omega.front());
    if (j0 < 0)
        throw PeakNotFound("no miscalibrated counterpart of the dominant quench peak");
    res.scale = mis.omega[j0] / nom.omega.front();

    std::vector<std::size_t> order(nom.omega.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](auto a, auto b) { return nom.omega[a] < nom.omega[b]; });
    for (std::size_t i : order) {
        const int j = partner_of(nom.omega[i]);
        if (j < 0) continue;
        used[j] = true;
        res.nominal_omega.push_back(nom.omega[i]);
        res.nominal_mag.push_back(nom.magnitude[i]);
        res.miscal_omega.push_back(mis.omega[j]);
        res.miscal_mag.push_back(mis.magnitude[j]);
    }
    return res;
}

} // namespace mesonsim
