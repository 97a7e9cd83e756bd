#include "mesonsim/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "mesonsim/errors.hpp"

namespace mesonsim {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

} // namespace

ConfigFile ConfigFile::parse(std::istream& is) {
    ConfigFile cfg;
    std::string line, section;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigInvalid("line " + std::to_string(lineno), "unterminated section");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty())
                throw ConfigInvalid("line " + std::to_string(lineno), "empty section name");
            cfg.sections[section];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigInvalid("line " + std::to_string(lineno), "expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty())
            throw ConfigInvalid("line " + std::to_string(lineno), "empty key or value");
        if (section.empty())
            throw ConfigInvalid("line " + std::to_string(lineno), "key outside any section");
        if (cfg.sections[section].count(key))
            throw ConfigInvalid(section + "." + key, "duplicate key");
        cfg.sections[section][key] = val;
    }
    return cfg;
}

ConfigFile ConfigFile::load(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigInvalid("config", "cannot open " + path);
    return parse(is);
}

bool ConfigFile::has(const std::string& sec, const std::string& key) const {
    const auto s = sections.find(sec);
    return s != sections.end() && s->second.count(key) > 0;
}

std::string ConfigFile::get_string(const std::string& sec, const std::string& key) const {
    const auto s = sections.find(sec);
    if (s == sections.end()) throw ConfigInvalid(sec, "missing section");
    const auto k = s->second.find(key);
    if (k == s->second.end()) throw ConfigInvalid(sec + "." + key, "missing key");
    return k->second;
}

std::string ConfigFile::get_string(const std::string& sec, const std::string& key,
                                   const std::string& fallback) const {
    return has(sec, key) ? get_string(sec, key) : fallback;
}

double ConfigFile::get_quantity(const std::string& sec, const std::string& key,
                                const std::string& unit) const {
    const std::string raw = get_string(sec, key);
    std::istringstream ss(raw);
    double value;
    std::string suffix, extra;
    if (!(ss >> value))
        throw ConfigInvalid(sec + "." + key, "not a number: " + raw);
    if (unit.empty()) {
        if (ss >> suffix) throw ConfigInvalid(sec + "." + key, "unexpected unit: " + suffix);
        return value;
    }
    if (!(ss >> suffix) || suffix != unit || (ss >> extra))
        throw ConfigInvalid(sec + "." + key, "expected unit '" + unit + "' in: " + raw);
    return value;
}

double ConfigFile::get_quantity(const std::string& sec, const std::string& key,
                                const std::string& unit, double fallback) const {
    return has(sec, key) ? get_quantity(sec, key, unit) : fallback;
}

long ConfigFile::get_int(const std::string& sec, const std::string& key) const {
    const std::string raw = get_string(sec, key);
    std::size_t pos = 0;
    long v;
    try {
        v = std::stol(raw, &pos);
    } catch (const std::exception&) {
        throw ConfigInvalid(sec + "." + key, "not an integer: " + raw);
    }
    if (!trim(raw.substr(pos)).empty())
        throw ConfigInvalid(sec + "." + key, "not an integer: " + raw);
    return v;
}

long ConfigFile::get_int(const std::string& sec, const std::string& key, long fallback) const {
    return has(sec, key) ? get_int(sec, key) : fallback;
}

bool ConfigFile::get_bool(const std::string& sec, const std::string& key, bool fallback) const {
    if (!has(sec, key)) return fallback;
    const std::string raw = get_string(sec, key);
    if (raw == "true" || raw == "yes" || raw == "1") return true;
    if (raw == "false" || raw == "no" || raw == "0") return false;
    throw ConfigInvalid(sec + "." + key, "not a boolean: " + raw);
}

namespace {

Boundary parse_boundary(const std::string& s, const std::string& field) {
    if (s == "pbc") return Boundary::PBC;
    if (s == "obc") return Boundary::OBC;
    throw ConfigInvalid(field, "boundary must be pbc or obc, got " + s);
}

ModelConfig parse_model(const ConfigFile& f) {
    ModelConfig m;
    m.type = f.get_string("model", "type");
    if (m.type == "tfic") {
        m.n = static_cast<int>(f.get_int("model", "n"));
        m.hx = f.get_quantity("model", "hx", "J");
        m.hz = f.get_quantity("model", "hz", "J", 0.0);
        m.boundary = parse_boundary(f.get_string("model", "boundary", "pbc"), "model.boundary");
        m.frame = f.get_string("model", "frame", "ferro") == "antiferro"
                      ? SignFrame::Antiferro
                      : SignFrame::Ferro;
    } else if (m.type == "tfil") {
        m.n = static_cast<int>(f.get_int("model", "n_per_leg"));
        m.hx = f.get_quantity("model", "hx", "J");
        m.lambda = f.get_quantity("model", "lambda", "J");
        m.boundary = Boundary::OBC;
        m.frame = f.get_string("model", "frame", "ferro") == "antiferro"
                      ? SignFrame::Antiferro
                      : SignFrame::Ferro;
    } else if (m.type == "rydberg") {
        m.geometry = f.get_string("model", "geometry");
        m.n = static_cast<int>(f.get_int("model", "n"));
        m.spacing_um = f.get_quantity("model", "spacing", "um");
        if (m.geometry == "ladder")
            m.rung_um = f.get_quantity("model", "rung_spacing", "um", m.spacing_um);
        else if (m.geometry != "ring")
            throw ConfigInvalid("model.geometry", "must be ring or ladder");
        m.omega_rad_us = units::mhz_to_rad_per_us(f.get_quantity("model", "omega", "MHz"));
        m.compensate = f.get_bool("model", "compensate", false);
        if (m.compensate)
            m.hz_target = f.get_quantity("model", "hz_target", "J");
        else
            m.delta_rad_us =
                units::mhz_to_rad_per_us(f.get_quantity("model", "delta", "MHz", 0.0));
        m.c6 = f.get_quantity("model", "c6", "rad_per_us_um6",
                              units::c6_rb87_rad_per_us_um6);
    } else {
        throw ConfigInvalid("model.type", "must be tfic, tfil or rydberg, got " + m.type);
    }
    if (m.n < 1) throw ConfigInvalid("model.n", "must be >= 1");
    return m;
}

ProtocolConfig parse_protocol(const ConfigFile& f) {
    ProtocolConfig p;
    p.type = f.get_string("protocol", "type", "quench");
    p.t_max = f.get_quantity("protocol", "t_max", "tJ");
    p.n_points = static_cast<int>(f.get_int("protocol", "n_points", 100));
    if (p.type == "two_stage") {
        p.hz0 = f.get_quantity("protocol", "hz0", "J");
        p.hz1 = f.get_quantity("protocol", "hz1", "J");
        p.ramp = f.get_quantity("protocol", "ramp", "tJ");
        p.hold = f.get_quantity("protocol", "hold", "tJ");
    } else if (p.type != "quench") {
        throw ConfigInvalid("protocol.type", "must be quench or two_stage, got " + p.type);
    }
    if (p.t_max <= 0.0 || p.n_points < 2)
        throw ConfigInvalid("protocol", "t_max > 0 and n_points >= 2 required");
    p.tol = f.get_quantity("protocol", "tol", "", 1e-10);
    return p;
}

ObservableSet parse_observables(const ConfigFile& f) {
    const std::string list = f.get_string("observables", "record");
    ObservableSet obs;
    obs.magnetization = false;
    std::istringstream ss(list);
    std::string item;
    bool any = false;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        any = true;
        if (item == "magnetization") obs.magnetization = true;
        else if (item == "correlations") obs.correlations = true;
        else if (item == "domain_walls") obs.domain_walls = true;
        else throw ConfigInvalid("observables.record", "unknown observable " + item);
    }
    if (!any) throw ConfigInvalid("observables.record", "empty observables list");
    return obs;
}

SpectroscopyConfig parse_spectroscopy(const ConfigFile& f) {
    SpectroscopyConfig s;
    if (!f.sections.count("spectroscopy")) return s;
    s.method = f.get_string("spectroscopy", "method", "none");
    if (s.method != "none" && s.method != "lehmann" && s.method != "time_domain")
        throw ConfigInvalid("spectroscopy.method", "must be none, lehmann or time_domain");
    s.eta = f.get_quantity("spectroscopy", "eta", "J", 0.1);
    s.omega_max = f.get_quantity("spectroscopy", "omega_max", "J", 12.0);
    s.omega_points = static_cast<int>(f.get_int("spectroscopy", "omega_points", 1200));
    s.t_max = f.get_quantity("spectroscopy", "t_max", "tJ", 30.0);
    s.dt_sample = f.get_quantity("spectroscopy", "dt_sample", "tJ", 0.1);
    s.tol = f.get_quantity("spectroscopy", "tol", "", 1e-7);
    s.masses = f.get_string("spectroscopy", "masses", "");
    s.match_tol = f.get_quantity("spectroscopy", "match_tol", "", 0.05);
    s.rescale_search = f.get_bool("spectroscopy", "rescale_search", false);
    s.prominence = f.get_quantity("spectroscopy", "prominence", "", 0.01);
    s.omega_min = f.get_quantity("spectroscopy", "omega_min", "J", 0.0);
    return s;
}

FitConfig parse_fit(const ConfigFile& f) {
    FitConfig fit;
    if (!f.sections.count("fit")) return fit;
    fit.enabled = f.get_bool("fit", "enabled", true);
    fit.n_freq = static_cast<int>(f.get_int("fit", "n_freq", 3));
    fit.runs = static_cast<int>(f.get_int("fit", "runs", 20));
    fit.epochs = static_cast<int>(f.get_int("fit", "epochs", 20000));
    fit.seed = static_cast<std::uint64_t>(f.get_int("fit", "seed", 1));
    fit.moving_average = static_cast<int>(f.get_int("fit", "moving_average", 1));
    if (fit.n_freq < 1 || fit.runs < 1 || fit.epochs < 1)
        throw ConfigInvalid("fit", "n_freq, runs and epochs must be >= 1");
    return fit;
}

NoiseConfig parse_noise(const ConfigFile& f) {
    NoiseConfig n;
    if (!f.sections.count("noise")) return n;
    n.enabled = f.get_bool("noise", "enabled", true);
    auto& p = n.params;
    p.rabi_rel_std = f.get_quantity("noise", "rabi_rel_std", "", p.rabi_rel_std);
    p.delta_abs_std = f.get_quantity("noise", "delta_abs_std", "rad_per_us", p.delta_abs_std);
    p.temperature_uk = f.get_quantity("noise", "temperature", "uK", p.temperature_uk);
    p.position_std_um[0] = f.get_quantity("noise", "position_std_x", "um", 0.1);
    p.position_std_um[1] = f.get_quantity("noise", "position_std_y", "um", 0.1);
    p.dephasing_rate = f.get_quantity("noise", "dephasing_rate", "per_us", p.dephasing_rate);
    p.spam.eps = f.get_quantity("noise", "eps", "", p.spam.eps);
    p.spam.eps_prime = f.get_quantity("noise", "eps_prime", "", p.spam.eps_prime);
    p.spam.eta = f.get_quantity("noise", "eta", "", p.spam.eta);
    p.n_trajectories = static_cast<int>(f.get_int("noise", "n_trajectories", 50));
    p.shots_per_step = static_cast<int>(f.get_int("noise", "shots_per_step", 250));
    if (p.spam.eps < 0 || p.spam.eps > 1 || p.spam.eps_prime < 0 || p.spam.eps_prime > 1 ||
        p.spam.eta < 0 || p.spam.eta > 1)
        throw ConfigInvalid("noise", "SPAM probabilities must lie in [0, 1]");
    if (p.rabi_rel_std < 0 || p.delta_abs_std < 0 || p.dephasing_rate < 0)
        throw ConfigInvalid("noise", "rates and widths must be >= 0");
    n.miscalibration = f.get_bool("noise", "miscalibration", false);
    if (n.miscalibration) {
        n.miscal.spacing_rel = f.get_quantity("noise", "spacing_rel", "");
        n.miscal.detuning_rel = f.get_quantity("noise", "detuning_rel", "");
    }
    return n;
}

} // namespace

ExperimentConfig parse_experiment_config(const ConfigFile& f) {
    ExperimentConfig cfg;
    cfg.name = f.get_string("experiment", "name");
    cfg.model = parse_model(f);
    cfg.protocol = parse_protocol(f);
    cfg.observables = parse_observables(f);
    cfg.spectroscopy = parse_spectroscopy(f);
    cfg.fit = parse_fit(f);
    cfg.noise = parse_noise(f);
    cfg.out_dir = f.get_string("output", "dir", "out/" + cfg.name);
    if (cfg.fit.enabled && !cfg.observables.magnetization)
        throw ConfigInvalid("fit", "frequency fitting needs the magnetization time series");
    if ((cfg.noise.enabled || cfg.noise.miscalibration) && cfg.model.type != "rydberg")
        throw ConfigInvalid("noise", "noise emulation needs a rydberg model block");
    if (cfg.protocol.type == "two_stage" &&
        std::abs(cfg.protocol.ramp + cfg.protocol.hold - cfg.protocol.t_max) > 1e-9)
        throw ConfigInvalid("protocol", "two_stage requires ramp + hold = t_max");
    return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
    return parse_experiment_config(ConfigFile::load(path));
}

} // namespace mesonsim
