#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "mesonsim/config.hpp"
#include "mesonsim/errors.hpp"
#include "mesonsim/pipeline.hpp"

namespace fs = std::filesystem;
using namespace mesonsim;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitPartial = 4;

std::string slurp(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigInvalid("config", "cannot open " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

std::uint64_t env_u64(const char* name, std::uint64_t fallback) {
    const char* v = std::getenv(name);
    return v ? std::strtoull(v, nullptr, 10) : fallback;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"mesonsim: transverse-field Ising meson spectroscopy simulator"};
    app.require_subcommand(1);

    std::string config_path, out_dir, configs_dir = "configs", report_dir;
    std::uint64_t seed = env_u64("MESONSIM_SEED", 1);
    int workers = static_cast<int>(env_u64("MESONSIM_WORKERS", 1));
    if (const char* v = std::getenv("MESONSIM_OUT")) out_dir = v;

    auto* run = app.add_subcommand("run", "execute a configured experiment");
    run->add_option("config", config_path, "experiment config file")->required();
    run->add_option("--seed", seed, "master RNG seed");
    run->add_option("--workers", workers, "parallelism budget");
    run->add_option("--out", out_dir, "output directory override");

    auto* validate = app.add_subcommand("validate", "parse and check a config");
    validate->add_option("config", config_path, "experiment config file")->required();

    auto* report = app.add_subcommand("report", "print the report of a finished run");
    report->add_option("dir", report_dir, "artifact directory")->required();

    auto* list = app.add_subcommand("list-configs", "list bundled experiment configs");
    list->add_option("--dir", configs_dir, "config directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            const std::string text = slurp(config_path);
            std::istringstream ss(text);
            const ExperimentConfig cfg = parse_experiment_config(ConfigFile::parse(ss));
            const RunArtifacts art = run_experiment(cfg, seed, workers, out_dir, text);
            std::cout << "wrote " << art.files.size() + 1 << " files to " << art.out_dir
                      << "\n";
            if (art.results.ensemble && art.results.ensemble->n_failed > 0) {
                std::cerr << "warning: " << art.results.ensemble->n_failed
                          << " trajectories failed\n";
                return kExitPartial;
            }
            return kExitOk;
        }
        if (validate->parsed()) {
            load_experiment_config(config_path);
            std::cout << "ok\n";
            return kExitOk;
        }
        if (report->parsed()) {
            const fs::path p = fs::path(report_dir) / "report.md";
            if (!fs::exists(p)) {
                std::cerr << "no report.md in " << report_dir << "\n";
                return kExitConfig;
            }
            std::cout << slurp(p.string());
            return kExitOk;
        }
        if (list->parsed()) {
            if (!fs::is_directory(configs_dir)) {
                std::cerr << "no such directory: " << configs_dir << "\n";
                return kExitConfig;
            }
            std::vector<std::string> names;
            for (const auto& e : fs::directory_iterator(configs_dir))
                if (e.path().extension() == ".cfg") names.push_back(e.path().string());
            std::sort(names.begin(), names.end());
            for (const auto& n : names) std::cout << n << "\n";
            return kExitOk;
        }
    } catch (const ConfigInvalid& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitOk;
}
