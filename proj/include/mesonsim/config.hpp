#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "mesonsim/ising.hpp"
#include "mesonsim/noise.hpp"
#include "mesonsim/observables.hpp"
#include "mesonsim/units.hpp"

namespace mesonsim {

// Line-oriented `key = value` file with [section] headers. Physical values
// carry a mandatory unit suffix (`spacing = 9.0 um`); dimensionless values
// use the suffix of their natural scale (`hx = 1.0 J`, `t_max = 10 tJ`) or
// none for counts and flags. `#` starts a comment.
struct ConfigFile {
    std::map<std::string, std::map<std::string, std::string>> sections;

    static ConfigFile parse(std::istream& is);
    static ConfigFile load(const std::string& path);

    bool has(const std::string& sec, const std::string& key) const;
    std::string get_string(const std::string& sec, const std::string& key) const;
    std::string get_string(const std::string& sec, const std::string& key,
                           const std::string& fallback) const;
    // Number with a mandatory unit suffix matching `unit`.
    double get_quantity(const std::string& sec, const std::string& key,
                        const std::string& unit) const;
    double get_quantity(const std::string& sec, const std::string& key,
                        const std::string& unit, double fallback) const;
    long get_int(const std::string& sec, const std::string& key) const;
    long get_int(const std::string& sec, const std::string& key, long fallback) const;
    bool get_bool(const std::string& sec, const std::string& key, bool fallback) const;
};

struct ModelConfig {
    std::string type;  // tfic | tfil | rydberg
    int n = 0;         // sites (tfic) or sites per leg (tfil, rydberg ladder)
    double hx = 0.0, hz = 0.0;  // J units (tfic/tfil)
    double lambda = 0.0;        // tfil rung coupling
    Boundary boundary = Boundary::PBC;
    SignFrame frame = SignFrame::Ferro;
    // rydberg
    std::string geometry;       // ring | ladder
    double spacing_um = 0.0;
    double rung_um = 0.0;
    double omega_rad_us = 0.0;
    double delta_rad_us = 0.0;
    bool compensate = false;    // per-site detuning canceling boundary shifts
    double hz_target = 0.0;     // J units, used with compensate
    double c6 = units::c6_rb87_rad_per_us_um6;
};

struct ProtocolConfig {
    std::string type = "quench";  // quench | two_stage
    double t_max = 10.0;          // tJ
    int n_points = 100;
    double hz0 = 0.0, hz1 = 0.0;  // two_stage longitudinal ramp (J units)
    double ramp = 0.0, hold = 0.0;
    double tol = 1e-10;
};

struct SpectroscopyConfig {
    std::string method = "none";  // none | lehmann | time_domain
    double eta = 0.1;
    double omega_max = 12.0;
    int omega_points = 1200;
    double t_max = 30.0;          // time_domain correlator window
    double dt_sample = 0.1;
    double tol = 1e-7;
    std::string masses;           // "", "e8", "d8_1", or a file path
    double match_tol = 0.05;
    bool rescale_search = false;
    double prominence = 0.01;
    double omega_min = 0.0;
};

struct FitConfig {
    bool enabled = false;
    int n_freq = 3;
    int runs = 20;
    int epochs = 20000;
    std::uint64_t seed = 1;
    int moving_average = 1;  // window; 1 = off
};

struct NoiseConfig {
    bool enabled = false;
    NoiseParams params;
    bool miscalibration = false;
    Miscalibration miscal;
};

struct ExperimentConfig {
    std::string name;
    ModelConfig model;
    ProtocolConfig protocol;
    ObservableSet observables;
    SpectroscopyConfig spectroscopy;
    FitConfig fit;
    NoiseConfig noise;
    std::string out_dir = "out";
};

ExperimentConfig parse_experiment_config(const ConfigFile& file);
ExperimentConfig load_experiment_config(const std::string& path);

} // namespace mesonsim
