#include "mesonsim/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mesonsim/errors.hpp"

namespace mesonsim {

std::vector<std::uint64_t> shot_sampler(const StateVector& state, int n_shots,
                                        std::mt19937_64& rng) {
    const double n2 = norm_sq(state.amp);
    if (std::abs(n2 - 1.0) > 1e-6)
        throw UnnormalizedState("state norm^2 = " + std::to_string(n2));
    return sample_bitstrings(state, n_shots, rng);
}

std::uint64_t fnv1a(const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t file_checksum(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigInvalid("checksum", "cannot open " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    const std::string bytes = ss.str();
    return fnv1a(bytes.data(), bytes.size());
}

namespace {

std::string fmt(double x) {
    std::ostringstream ss;
    ss.precision(12);
    ss << x;
    return ss.str();
}

std::string hex64(std::uint64_t h) {
    std::ostringstream ss;
    ss << "0x" << std::hex << h;
    return ss.str();
}

struct BuiltModel {
    IsingSpec spec;
    std::optional<Register> reg;
    std::optional<RydbergParams> params;
    double j_nn = 0.0;
    bool ladder = false;
    int n_per_leg = 0;
};

BuiltModel build_model(const ModelConfig& m) {
    BuiltModel out;
    if (m.type == "tfic") {
        out.spec = build_tfic(m.n, m.hx, m.hz, m.boundary, m.frame);
    } else if (m.type == "tfil") {
        out.spec = build_tfil(m.n, m.hx, m.lambda, Boundary::OBC, m.frame);
        out.ladder = true;
        out.n_per_leg = m.n;
    } else {  // rydberg
        Register reg = m.geometry == "ring"
                           ? build_ring_register(m.n, m.spacing_um)
                           : build_ladder_register(m.n, m.spacing_um, m.rung_um);
        RydbergParams params;
        params.c6 = m.c6;
        params.omega = m.omega_rad_us;
        params.delta = {m.delta_rad_us};
        if (m.compensate) {
            const CouplingMatrix cm = rydberg_couplings(reg, m.c6);
            // hz_target is given in J units; compensation works in rad/us.
            params.delta = compensated_detuning(cm, m.hz_target * cm.max_abs);
        }
        const RydbergMapping map = rydberg_to_ising(params, reg);
        out.spec = map.spec;
        out.reg = reg;
        out.params = params;
        out.j_nn = map.j_nn_rad_per_us;
        out.ladder = m.geometry == "ladder";
        out.n_per_leg = out.ladder ? m.n : 0;
    }
    return out;
}

std::vector<double> closed_grid(double t_max, int n_points) {
    std::vector<double> g(n_points);
    for (int i = 0; i < n_points; ++i) g[i] = t_max * i / (n_points - 1);
    return g;
}

void write_file(const std::filesystem::path& dir, const std::string& name,
                const std::string& content,
                std::vector<std::pair<std::string, std::uint64_t>>& files) {
    const auto path = dir / name;
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigInvalid("output", "cannot write " + path.string());
    os << content;
    os.close();
    files.emplace_back(name, fnv1a(content.data(), content.size()));
}

std::string trajectory_csv(const RunResults& r) {
    std::ostringstream ss;
    ss << "t,site,sz\n";
    for (std::size_t it = 0; it < r.traj.times.size(); ++it)
        for (int i = 0; i < r.traj.n_sites; ++i)
            ss << fmt(r.traj.times[it]) << "," << i << ","
               << fmt(r.traj.snapshots[it].sz[i]) << "\n";
    return ss.str();
}

std::string domain_walls_csv(const RunResults& r) {
    std::ostringstream ss;
    ss << "t,p_dw\n";
    for (std::size_t it = 0; it < r.traj.times.size(); ++it)
        ss << fmt(r.traj.times[it]) << "," << fmt(r.traj.snapshots[it].p_dw) << "\n";
    return ss.str();
}

std::string correlations_csv(const CorrelationMap& map) {
    std::ostringstream ss;
    ss << "t,d,c\n";
    for (std::size_t it = 0; it < map.times.size(); ++it)
        for (std::size_t id = 0; id < map.distances.size(); ++id)
            ss << fmt(map.times[it]) << "," << map.distances[id] << ","
               << fmt(map.values[it][id]) << "\n";
    return ss.str();
}

std::string skw_csv(const SkwGrid& g) {
    std::ostringstream ss;
    ss << "k_index,k,k_label,omega,s\n";
    for (std::size_t ik = 0; ik < g.k.size(); ++ik)
        for (std::size_t io = 0; io < g.omega.size(); ++io)
            ss << ik << "," << fmt(g.k[ik]) << "," << g.k_label[ik] << ","
               << fmt(g.omega[io]) << "," << fmt(g.s[ik][io]) << "\n";
    return ss.str();
}

std::string ridge_csv(const std::vector<RidgePoint>& ridge) {
    std::ostringstream ss;
    ss << "k,omega,confidence\n";
    for (const auto& p : ridge)
        ss << fmt(p.k) << "," << fmt(p.omega) << "," << fmt(p.confidence) << "\n";
    return ss.str();
}

std::string peaks_csv(const RunResults& r) {
    std::ostringstream ss;
    ss << "omega,weight,ratio,label,predicted_ratio,rel_deviation\n";
    for (std::size_t i = 0; i < r.peaks.size(); ++i) {
        ss << fmt(r.peaks[i].omega) << "," << fmt(r.peaks[i].weight);
        if (r.match && i < r.match->assignments.size()) {
            const auto& a = r.match->assignments[i];
            ss << "," << fmt(a.peak_ratio) << "," << a.label << ","
               << fmt(a.predicted_ratio) << "," << fmt(a.rel_deviation);
        } else {
            ss << ",,,,";
        }
        ss << "\n";
    }
    return ss.str();
}

std::string fit_runs_csv(const FitResult& fit) {
    std::ostringstream ss;
    const int nm = fit.runs.empty() ? 0 : fit.runs.front().model.n_modes();
    ss << "run,mse,diverged,c0,c1,gamma,a0";
    for (int i = 0; i < nm; ++i) ss << ",omega" << i + 1;
    for (int i = 0; i < nm; ++i) ss << ",a" << i + 1;
    for (int i = 0; i < nm; ++i) ss << ",b" << i + 1;
    ss << "\n";
    for (std::size_t rr = 0; rr < fit.runs.size(); ++rr) {
        const auto& run = fit.runs[rr];
        ss << rr << "," << fmt(run.mse) << "," << (run.diverged ? 1 : 0) << ","
           << fmt(run.model.c0) << "," << fmt(run.model.c1) << "," << fmt(run.model.gamma)
           << "," << fmt(run.model.a0);
        for (int i = 0; i < nm; ++i) ss << "," << fmt(run.model.omega[i]);
        for (int i = 0; i < nm; ++i) ss << "," << fmt(run.model.a[i]);
        for (int i = 0; i < nm; ++i) ss << "," << fmt(run.model.b[i]);
        ss << "\n";
    }
    return ss.str();
}

std::string fit_summary_csv(const FitResult& fit) {
    std::ostringstream ss;
    ss << "mode,omega_mean,omega_std\n";
    for (std::size_t i = 0; i < fit.omega_mean.size(); ++i)
        ss << i + 1 << "," << fmt(fit.omega_mean[i]) << "," << fmt(fit.omega_std[i]) << "\n";
    return ss.str();
}

std::string ensemble_csv(const EnsembleResult& e) {
    std::ostringstream ss;
    ss << "t,mag_mean,mag_lo,mag_hi,dw_mean,dw_lo,dw_hi\n";
    for (std::size_t it = 0; it < e.times.size(); ++it)
        ss << fmt(e.times[it]) << "," << fmt(e.magnetization.mean[it]) << ","
           << fmt(e.magnetization.lo[it]) << "," << fmt(e.magnetization.hi[it]) << ","
           << fmt(e.domain_walls.mean[it]) << "," << fmt(e.domain_walls.lo[it]) << ","
           << fmt(e.domain_walls.hi[it]) << "\n";
    return ss.str();
}

std::string rescale_csv(const RunResults& r) {
    std::ostringstream ss;
    ss << "peak,nominal_omega,miscal_omega,rescaled_omega,rel_residual\n";
    const std::size_t n =
        std::min(r.rescale_nominal_peaks.size(), r.rescale_miscal_peaks.size());
    for (std::size_t i = 0; i < n; ++i) {
        const double nom = r.rescale_nominal_peaks[i].omega;
        const double mis = r.rescale_miscal_peaks[i].omega;
        const double back = mis / r.rescale->scale;
        ss << i + 1 << "," << fmt(nom) << "," << fmt(mis) << "," << fmt(back) << ","
           << fmt(back / nom - 1.0) << "\n";
    }
    return ss.str();
}

MassTable resolve_mass_table(const std::string& name) {
    if (name == "e8") return e8_mass_table();
    if (name == "d8_1") return d8_1_mass_table();
    return load_mass_table_file(name);
}

} // namespace

std::string report_generate(const RunResults& r) {
    std::ostringstream ss;
    ss << "# " << r.cfg.name << "\n\n";
    ss << "## Parameters\n\n";
    ss << "- model: " << r.cfg.model.type << ", n = " << r.cfg.model.n;
    if (r.cfg.model.type == "tfic")
        ss << ", hx = " << r.cfg.model.hx << ", hz = " << r.cfg.model.hz;
    if (r.cfg.model.type == "tfil")
        ss << ", hx = " << r.cfg.model.hx << ", lambda = " << r.cfg.model.lambda;
    ss << "\n- protocol: " << r.cfg.protocol.type << ", t_max = " << r.cfg.protocol.t_max
       << " tJ, " << r.cfg.protocol.n_points << " samples\n";
    ss << "- seed: " << r.seed << "\n";
    if (r.j_nn_rad_per_us > 0.0)
        ss << "- nearest-neighbor J = " << fmt(r.j_nn_rad_per_us)
           << " rad/us (1 tJ = " << fmt(1.0 / r.j_nn_rad_per_us) << " us)\n";
    ss << "\n";

    if (r.front) {
        ss << "## Correlation front\n\n";
        ss << "- velocity = " << fmt(r.front->velocity) << " +- "
           << fmt(r.front->velocity_stderr) << " sites/tJ\n\n";
    }

    if (r.skw) {
        ss << "## Spectroscopy\n\n";
        ss << "- method: " << r.cfg.spectroscopy.method << ", eta = "
           << r.cfg.spectroscopy.eta << "\n";
        if (r.v_group) ss << "- max group velocity = " << fmt(*r.v_group) << " sites/tJ\n";
        if (!r.peaks.empty()) {
            ss << "\n| peak omega | weight |";
            if (r.match) ss << " ratio | assigned | predicted | deviation % |";
            ss << "\n|---|---|";
            if (r.match) ss << "---|---|---|---|";
            ss << "\n";
            for (std::size_t i = 0; i < r.peaks.size(); ++i) {
                ss << "| " << fmt(r.peaks[i].omega) << " | " << fmt(r.peaks[i].weight)
                   << " |";
                if (r.match && i < r.match->assignments.size()) {
                    const auto& a = r.match->assignments[i];
                    ss << " " << fmt(a.peak_ratio) << " | " << a.label << " | "
                       << fmt(a.predicted_ratio) << " | " << fmt(100.0 * a.rel_deviation)
                       << " |";
                }
                ss << "\n";
            }
            if (r.match)
                ss << "\nsymmetry " << r.mass_symmetry << ", global scale = "
                   << fmt(r.match->global_scale) << ", max direct deviation = "
                   << fmt(100.0 * r.match->max_deviation) << " %\n";
        }
        ss << "\n";
    }

    if (r.fit) {
        ss << "## Frequency fit\n\n";
        ss << "- initialization (spectral maxima):";
        for (double w : r.fit_init) ss << " " << fmt(w);
        ss << "\n- runs: " << r.fit->runs.size() << " (" << r.fit->n_diverged
           << " diverged), best MSE = " << fmt(r.fit->best_mse) << "\n";
        ss << "\n| mode | omega mean | omega std |\n|---|---|---|\n";
        for (std::size_t i = 0; i < r.fit->omega_mean.size(); ++i)
            ss << "| " << i + 1 << " | " << fmt(r.fit->omega_mean[i]) << " | "
               << fmt(r.fit->omega_std[i]) << " |\n";
        if (r.fit->negative_gamma) ss << "\nnote: best run has negative decay rate\n";
        ss << "\n";
    }

    if (r.ensemble) {
        ss << "## Noise ensemble\n\n";
        ss << "- trajectories: " << r.ensemble->n_requested << " requested, "
           << r.ensemble->n_failed << " failed\n";
        ss << "- band: 15th-85th percentile of per-trajectory observables\n\n";
    }

    if (r.rescale) {
        ss << "## Miscalibration rescale\n\n";
        ss << "- coupling scale (spacing shift alone): " << fmt(r.rescale->coupling_scale)
           << "\n";
        ss << "- dominant quench-frequency scale: " << fmt(r.rescale->scale)
           << " (apply as t -> t * scale)\n";
        const std::size_t n =
            std::min(r.rescale_nominal_peaks.size(), r.rescale_miscal_peaks.size());
        if (n > 0) {
            ss << "\n| peak | nominal | miscalibrated | rescaled | residual % |\n"
               << "|---|---|---|---|---|\n";
            for (std::size_t i = 0; i < n; ++i) {
                const double nom = r.rescale_nominal_peaks[i].omega;
                const double mis = r.rescale_miscal_peaks[i].omega;
                const double back = mis / r.rescale->scale;
                ss << "| " << i + 1 << " | " << fmt(nom) << " | " << fmt(mis) << " | "
                   << fmt(back) << " | " << fmt(100.0 * (back / nom - 1.0)) << " |\n";
            }
        }
        ss << "\n";
    }

    if (!r.notes.empty()) {
        ss << "## Notes\n\n";
        for (const auto& n : r.notes) ss << "- " << n << "\n";
    }
    return ss.str();
}

RunArtifacts run_experiment(const ExperimentConfig& cfg, std::uint64_t master_seed,
                            int workers, const std::string& out_override,
                            const std::string& config_text) {
    const auto t_start = std::chrono::steady_clock::now();
    RunResults r;
    r.cfg = cfg;
    r.seed = master_seed;

    BuiltModel model = build_model(cfg.model);
    r.spec = model.spec;
    r.reg = model.reg;
    r.rydberg = model.params;
    r.j_nn_rad_per_us = model.j_nn;
    r.ladder = model.ladder;
    r.n_per_leg = model.n_per_leg;

    // Dynamics (times in tJ).
    const std::vector<double> grid = closed_grid(cfg.protocol.t_max, cfg.protocol.n_points);
    if (cfg.protocol.type == "quench") {
        r.traj = quench_all_zeros(r.spec, grid, cfg.observables, cfg.protocol.tol);
    } else {
        if (cfg.model.type == "rydberg")
            throw ConfigInvalid("protocol", "two_stage requires tfic or tfil");
        const Schedule sched = Schedule::two_stage(cfg.model.hx, cfg.protocol.hz0,
                                                   cfg.protocol.hz1, cfg.protocol.ramp,
                                                   cfg.protocol.hold);
        r.traj = evolve_schedule(r.spec, sched, all_zeros_state(r.spec.n_sites), grid,
                                 cfg.observables, 0.01, cfg.protocol.tol);
    }

    if (cfg.observables.correlations) {
        r.corr_map = model.ladder
                         ? correlation_map_ladder_intra_leg(r.traj, model.n_per_leg)
                         : correlation_map_chain(r.traj, r.spec.boundary);
        try {
            r.front = light_cone_front(*r.corr_map);
        } catch (const Error& e) {
            r.notes.push_back(std::string("front not extracted: ") + e.what());
        }
    }

    // Spectroscopy.
    if (cfg.spectroscopy.method != "none") {
        const auto& sc = cfg.spectroscopy;
        if (sc.method == "lehmann") {
            Spectrum sp = full_spectrum(r.spec, true);
            if (r.spec.boundary == Boundary::PBC) {
                try {
                    label_momenta(sp, r.spec);
                } catch (const Error& e) {
                    r.notes.push_back(std::string("momentum labels skipped: ") + e.what());
                }
            }
            std::vector<double> omega(sc.omega_points);
            for (int i = 0; i < sc.omega_points; ++i)
                omega[i] = sc.omega_max * i / (sc.omega_points - 1);
            r.skw = dsf_lehmann_grid(sp, r.spec, omega, sc.eta);
        } else {
            TimeDomainOptions opts;
            opts.t_max = sc.t_max;
            opts.dt_sample = sc.dt_sample;
            opts.eta = sc.eta;
            opts.omega_max = sc.omega_max;
            opts.omega_points = sc.omega_points;
            opts.tol = sc.tol;
            r.skw = dsf_time_domain(r.spec, opts);
        }
        try {
            r.ridge = dispersion_extract(*r.skw);
            r.v_group = group_velocity(r.ridge);
        } catch (const Error& e) {
            r.notes.push_back(std::string("dispersion ridge skipped: ") + e.what());
        }
        // k ~ 0 slice: PBC row 0, OBC the uniform-sum row.
        std::size_t k0 = 0;
        for (std::size_t i = 0; i < r.skw->k_label.size(); ++i)
            if (r.skw->k_label[i] == "uniform") k0 = i;
        try {
            r.peaks = peak_extract(r.skw->omega, r.skw->s[k0], sc.prominence, sc.omega_min);
            if (!sc.masses.empty()) {
                const MassTable table = resolve_mass_table(sc.masses);
                r.mass_symmetry = table.symmetry;
                r.match = mass_ratio_match(r.peaks, table, sc.match_tol, sc.rescale_search);
            }
        } catch (const Error& e) {
            r.notes.push_back(std::string("peak analysis skipped: ") + e.what());
        }
    }

    // Frequency fit on the site-averaged magnetization.
    if (cfg.fit.enabled) {
        std::vector<double> signal(r.traj.times.size());
        for (std::size_t it = 0; it < r.traj.times.size(); ++it) {
            double acc = 0.0;
            for (double v : r.traj.snapshots[it].sz) acc += v;
            signal[it] = acc / r.traj.n_sites;
        }
        if (cfg.fit.moving_average > 1)
            signal = moving_average(signal, cfg.fit.moving_average);
        const FftPeaks init = fft_peaks(r.traj.times, signal, cfg.fit.n_freq);
        if (!init.complete)
            r.notes.push_back("spectral initialization found only " +
                              std::to_string(init.omega.size()) + " stable peaks");
        if (init.omega.empty()) {
            r.notes.push_back("fit skipped: no spectral peaks in the signal");
        } else {
            r.fit_init = init.omega;
            FitOptions fo;
            fo.n_runs = cfg.fit.runs;
            fo.epochs = cfg.fit.epochs;
            fo.master_seed = cfg.fit.seed;
            r.fit = fit_frequencies(r.traj.times, signal, init.omega, fo);
        }
    }

    // Noise ensemble and miscalibration, in physical units.
    if (cfg.noise.enabled || cfg.noise.miscalibration) {
        if (!r.reg || !r.rydberg)
            throw ConfigInvalid("noise", "noise emulation needs a rydberg model");
        if (cfg.noise.enabled) {
            QuenchProtocol proto;
            proto.grid.reserve(grid.size());
            for (std::size_t i = 1; i < grid.size(); ++i)
                proto.grid.push_back(grid[i] / r.j_nn_rad_per_us);  // tJ -> us
            proto.obs.magnetization = true;
            proto.obs.domain_walls = true;
            r.ensemble = monte_carlo_ensemble(*r.rydberg, *r.reg, proto, cfg.noise.params,
                                              master_seed);
        }
        if (cfg.noise.miscalibration) {
            r.rescale = miscalibration_rescale(*r.rydberg, *r.reg, cfg.noise.miscal);
            // Raw and rescaled quench Fourier peaks for the report.
            for (std::size_t i = 0; i < r.rescale->nominal_omega.size(); ++i) {
                r.rescale_nominal_peaks.push_back(
                    {r.rescale->nominal_omega[i], r.rescale->nominal_mag[i]});
                r.rescale_miscal_peaks.push_back(
                    {r.rescale->miscal_omega[i], r.rescale->miscal_mag[i]});
            }
        }
    }

    // Artifacts.
    RunArtifacts art;
    art.out_dir = out_override.empty() ? cfg.out_dir : out_override;
    std::filesystem::create_directories(art.out_dir);
    const std::filesystem::path dir(art.out_dir);

    if (cfg.observables.magnetization) write_file(dir, "trajectory.csv", trajectory_csv(r), art.files);
    if (cfg.observables.domain_walls) write_file(dir, "domain_walls.csv", domain_walls_csv(r), art.files);
    if (r.corr_map) write_file(dir, "correlations.csv", correlations_csv(*r.corr_map), art.files);
    if (r.skw) write_file(dir, "skw.csv", skw_csv(*r.skw), art.files);
    if (!r.ridge.empty()) write_file(dir, "ridge.csv", ridge_csv(r.ridge), art.files);
    if (!r.peaks.empty()) write_file(dir, "peaks.csv", peaks_csv(r), art.files);
    if (r.fit) {
        write_file(dir, "fit_runs.csv", fit_runs_csv(*r.fit), art.files);
        write_file(dir, "fit_summary.csv", fit_summary_csv(*r.fit), art.files);
    }
    if (r.ensemble) write_file(dir, "ensemble.csv", ensemble_csv(*r.ensemble), art.files);
    if (r.rescale && !r.rescale_nominal_peaks.empty())
        write_file(dir, "rescale.csv", rescale_csv(r), art.files);
    write_file(dir, "report.md", report_generate(r), art.files);

    const auto t_end = std::chrono::steady_clock::now();
    const double secs = std::chrono::duration<double>(t_end - t_start).count();

    std::ostringstream mf;
    mf << "name: " << cfg.name << "\n";
    mf << "code_version: mesonsim 1.0.0\n";
    mf << "config_hash: " << hex64(fnv1a(config_text.data(), config_text.size())) << "\n";
    mf << "seed: " << master_seed << "\n";
    mf << "workers: " << workers << "\n";
    mf << "frame: coefficients stored literally; sz |bit=0> = +1\n";
    mf << "units: model energies in J, times in tJ; rydberg layer rad/us, um\n";
    if (r.j_nn_rad_per_us > 0.0) {
        mf << "j_nn_rad_per_us: " << fmt(r.j_nn_rad_per_us) << "\n";
        mf << "tJ_to_us: " << fmt(1.0 / r.j_nn_rad_per_us) << "\n";
    }
    if (r.reg) mf << "min_spacing_um: " << fmt(r.reg->min_pairwise_distance()) << "\n";
    for (const auto& [name, sum] : art.files)
        mf << "file: " << name << " " << hex64(sum) << "\n";
    // Wall-clock line last; reproducibility comparisons drop `timing` keys.
    mf << "timing_total_s: " << secs << "\n";
    {
        std::ofstream os(dir / "manifest.txt", std::ios::binary);
        os << mf.str();
    }

    art.results = std::move(r);
    return art;
}

} // namespace mesonsim
