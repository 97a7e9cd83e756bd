#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "mesonsim/config.hpp"
#include "mesonsim/engine.hpp"
#include "mesonsim/masstable.hpp"
#include "mesonsim/noise.hpp"
#include "mesonsim/observables.hpp"
#include "mesonsim/specfit.hpp"
#include "mesonsim/spectroscopy.hpp"

namespace mesonsim {

// Measurement shots from a normalized state. Throws UnnormalizedState when
// the norm deviates from 1 by more than 1e-6.
std::vector<std::uint64_t> shot_sampler(const StateVector& state, int n_shots,
                                        std::mt19937_64& rng);

// FNV-1a 64-bit content hashes (artifact manifest / reproducibility).
std::uint64_t fnv1a(const void* data, std::size_t len);
std::uint64_t file_checksum(const std::string& path);

// Everything a run produced; optional blocks mirror the config.
struct RunResults {
    ExperimentConfig cfg;
    std::uint64_t seed = 1;

    IsingSpec spec;
    double j_nn_rad_per_us = 0.0;  // 0 unless the model is rydberg
    std::optional<Register> reg;
    std::optional<RydbergParams> rydberg;
    bool ladder = false;
    int n_per_leg = 0;

    Trajectory traj;
    std::optional<CorrelationMap> corr_map;
    std::optional<FrontEstimate> front;

    std::optional<SkwGrid> skw;
    std::vector<RidgePoint> ridge;
    std::optional<double> v_group;
    std::vector<Peak> peaks;
    std::optional<MatchReport> match;
    std::string mass_symmetry;

    std::optional<FitResult> fit;
    std::vector<double> fit_init;

    std::optional<EnsembleResult> ensemble;
    std::optional<RescaleResult> rescale;
    std::vector<Peak> rescale_nominal_peaks, rescale_miscal_peaks;

    std::vector<std::string> notes;  // analysis steps skipped, with reasons
};

// Markdown report: parameter echo, velocity and peak tables with symmetry
// assignments, fit summaries, ensemble statistics. Sections for absent
// products are omitted.
std::string report_generate(const RunResults& results);

// Run the full configured pipeline and write CSVs, report.md and
// manifest.txt under the output directory.
struct RunArtifacts {
    std::string out_dir;
    std::vector<std::pair<std::string, std::uint64_t>> files;  // name, checksum
    RunResults results;
};

RunArtifacts run_experiment(const ExperimentConfig& cfg, std::uint64_t master_seed,
                            int workers = 1, const std::string& out_override = "",
                            const std::string& config_text = "");

} // namespace mesonsim
