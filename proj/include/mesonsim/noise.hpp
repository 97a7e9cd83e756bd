#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "mesonsim/engine.hpp"
#include "mesonsim/ising.hpp"
#include "mesonsim/register.hpp"

namespace mesonsim {

struct SpamParams {
    double eps = 0.01;        // 0 -> 1 detection flip
    double eps_prime = 0.07;  // 1 -> 0 detection flip
    double eta = 0.01;        // preparation error (bit forced to 0 first)
};

// Hardware noise channels. Rates and widths in physical units (rad/us, us,
// um); disorder is static within a trajectory.
struct NoiseParams {
    double rabi_rel_std = 0.01;
    double delta_abs_std = 0.31;                     // rad/us
    double temperature_uk = 20.0;                    // informational
    std::array<double, 2> position_std_um = {0.1, 0.1};
    double dephasing_rate = 0.05;                    // gamma_phi, 1/us
    SpamParams spam;
    int n_trajectories = 50;
    int shots_per_step = 250;
    int resample_limit = 100;
};

// Thermal in-trap position spread sqrt(kB T / m w^2) for Rb-87, when the
// trap frequency is known (the temperature alone does not fix it).
double thermal_position_std_um(double temperature_uk, double trap_freq_rad_per_us);

// One static shot-to-shot draw.
struct DisorderRealization {
    double rabi_scale = 1.0;    // multiplies Omega
    double delta_offset = 0.0;  // rad/us, added to every delta_i
    Register positions;         // jittered copy of the nominal register
    int resamples = 0;          // jitter redraws forced by the distance floor
};

DisorderRealization sample_disorder(const NoiseParams& params, const Register& nominal,
                                    std::mt19937_64& rng);

// Physical-unit (rad/us) spec for one realization: couplings recomputed
// from the jittered positions, hx = rabi_scale * Omega / 2,
// hz = (delta_i + delta_offset) / 2, stored literally (Antiferro tag).
IsingSpec disordered_spec(const RydbergParams& nominal, const DisorderRealization& real,
                          double rel_cutoff = 1e-4);

// Sudden quench held for grid.back() us. Starts from |00...0> unless an
// explicit initial state is supplied (e.g. a superposition for coherence
// benchmarks).
struct QuenchProtocol {
    std::vector<double> grid;  // sample times, us
    ObservableSet obs;
    double tol = 1e-8;
    StateVector initial;       // empty amp -> |00...0>
};

// One Monte Carlo trajectory: evolution under the disordered spec with
// dephasing as a quantum-jump unraveling (per-site sigma^z jumps at rate
// gamma_phi / 2; jump times are state-independent since sz^dag sz = 1).
Trajectory trajectory_run(const RydbergParams& nominal, const DisorderRealization& real,
                          const QuenchProtocol& protocol, double dephasing_rate,
                          std::mt19937_64& rng);

// Measurement shots: basis states drawn from |amp|^2.
std::vector<std::uint64_t> sample_bitstrings(const StateVector& state, int shots,
                                             std::mt19937_64& rng);

// State-preparation + detection channel, in place. Each atom: with
// probability eta the prepared bit is forced to 0; then 0 -> 1 with eps
// and 1 -> 0 with eps_prime.
void apply_spam(std::vector<std::uint64_t>& bitstrings, int n_sites, const SpamParams& spam,
                std::mt19937_64& rng);

struct EnsembleBand {
    std::vector<double> mean, lo, hi;  // per time; lo/hi = 15th/85th percentile
};

struct EnsembleResult {
    std::vector<double> times;
    EnsembleBand magnetization;  // site-averaged, from SPAM-corrupted shots
    EnsembleBand domain_walls;
    std::vector<std::vector<double>> sz_mean;  // [time][site], exact trajectory mean
    int n_failed = 0;
    int n_requested = 0;
};

// Trajectory ensemble with deterministic per-trajectory seeds. Observables
// are estimated from shots_per_step SPAM-corrupted bitstrings per time step;
// the band is the 15th-85th percentile across trajectories. Proceeds while
// at least 80% of trajectories succeed.
EnsembleResult monte_carlo_ensemble(const RydbergParams& nominal, const Register& reg,
                                    const QuenchProtocol& protocol, const NoiseParams& params,
                                    std::uint64_t master_seed);

struct Miscalibration {
    double spacing_rel = -0.01;   // relative change of every pairwise distance
    double detuning_rel = 0.05;   // relative change of delta
};

struct RescaleResult {
    double coupling_scale = 1.0;  // (1 + spacing_rel)^-6
    double scale = 1.0;           // dominant quench frequency, miscal / nominal
    // Matched Fourier peaks of the site-averaged quench magnetization
    // (ascending, rad/us) with their spectral magnitudes.
    std::vector<double> nominal_omega, nominal_mag;
    std::vector<double> miscal_omega, miscal_mag;
};

// Frequency-axis stretch produced by a coherent miscalibration: rebuilds the
// couplings at perturbed spacing and detuning, quenches both specs from the
// all-zeros state, and compares the dominant oscillation frequency of the
// magnetization (the quantity the time-axis rescale is applied to).
// Apply as t -> t * scale.
RescaleResult miscalibration_rescale(const RydbergParams& nominal, const Register& reg,
                                     const Miscalibration& miscal, double t_max_tj = 10.0,
                                     int n_points = 401);

} // namespace mesonsim
