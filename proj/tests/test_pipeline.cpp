#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "mesonsim/config.hpp"
#include "mesonsim/errors.hpp"
#include "mesonsim/pipeline.hpp"

using namespace mesonsim;
namespace fs = std::filesystem;

TEST_CASE("fnv1a reference vectors") {
    CHECK(fnv1a("", 0) == 0xcbf29ce484222325ull);
    CHECK(fnv1a("a", 1) == 0xaf63dc4c8601ec8cull);
    CHECK(fnv1a("foobar", 6) == 0x85944171f73967e8ull);
}

TEST_CASE("shot sampler statistics and normalization guard") {
    std::mt19937_64 rng(12);
    StateVector bad = all_zeros_state(3);
    bad.amp[0] = cplx(2.0, 0.0);
    CHECK_THROWS_AS(shot_sampler(bad, 10, rng), UnnormalizedState);

    // Sampled <sz> matches the exact expectation within 4 standard errors.
    const IsingSpec spec = build_tfic(5, 1.0, 0.3, Boundary::PBC);
    StateVector psi = evolve_constant(spec, all_zeros_state(5), 1.3, 1e-11);
    const auto exact = magnetization(psi);
    const int n_shots = 40000;
    const auto shots = shot_sampler(psi, n_shots, rng);
    const auto est = magnetization_from_bitstrings(shots, 5);
    for (int i = 0; i < 5; ++i) {
        const double var = 1.0 - exact[i] * exact[i];
        const double se = std::sqrt(std::max(var, 1e-12) / n_shots);
        CHECK(std::abs(est[i] - exact[i]) < 4.0 * se + 1e-9);
    }
}

namespace {

ExperimentConfig tiny_config() {
    std::istringstream ss(R"(
[experiment]
name = tiny
[model]
type = tfic
n = 6
hx = 1.0 J
hz = 0.5 J
[protocol]
t_max = 2.0 tJ
n_points = 8
[observables]
record = magnetization, correlations, domain_walls
[spectroscopy]
method = lehmann
eta = 0.1 J
omega_max = 12.0 J
omega_points = 600
)");
    return parse_experiment_config(ConfigFile::parse(ss));
}

std::map<std::string, std::string> manifest_lines(const fs::path& p) {
    std::map<std::string, std::string> out;
    std::ifstream is(p);
    std::string line;
    while (std::getline(is, line)) {
        const auto colon = line.find(':');
        if (colon == std::string::npos) continue;
        out[line.substr(0, colon)] = line.substr(colon + 1);
    }
    return out;
}

} // namespace

TEST_CASE("run_experiment writes a complete, reproducible artifact set") {
    const ExperimentConfig cfg = tiny_config();
    const fs::path base = fs::temp_directory_path() / "mesonsim_test_pipeline";
    fs::remove_all(base);
    const RunArtifacts a = run_experiment(cfg, 42, 1, (base / "a").string());
    const RunArtifacts b = run_experiment(cfg, 42, 1, (base / "b").string());

    // Manifest completeness: every file in the directory is listed.
    REQUIRE(fs::exists(base / "a" / "manifest.txt"));
    std::size_t n_files = 0;
    for (const auto& e : fs::directory_iterator(base / "a")) {
        if (e.path().filename() == "manifest.txt") continue;
        ++n_files;
        bool listed = false;
        for (const auto& [name, sum] : a.files)
            if (name == e.path().filename().string()) listed = true;
        CHECK(listed);
    }
    CHECK(n_files == a.files.size());

    // Reproducibility: identical checksums for the same seed.
    REQUIRE(a.files.size() == b.files.size());
    for (std::size_t i = 0; i < a.files.size(); ++i) {
        CHECK(a.files[i].first == b.files[i].first);
        CHECK(a.files[i].second == b.files[i].second);
    }

    // Manifests agree on everything except wall-clock timings.
    auto ma = manifest_lines(base / "a" / "manifest.txt");
    auto mb = manifest_lines(base / "b" / "manifest.txt");
    for (auto it = ma.begin(); it != ma.end();) {
        if (it->first.rfind("timing", 0) == 0) it = ma.erase(it);
        else ++it;
    }
    for (auto it = mb.begin(); it != mb.end();) {
        if (it->first.rfind("timing", 0) == 0) it = mb.erase(it);
        else ++it;
    }
    CHECK(ma == mb);

    // A different seed still runs; spectroscopy artifacts exist.
    CHECK(fs::exists(base / "a" / "skw.csv"));
    CHECK(fs::exists(base / "a" / "report.md"));
    fs::remove_all(base);
}

TEST_CASE("report sections are omitted when products are absent") {
    RunResults r;
    r.cfg = tiny_config();
    r.spec = build_tfic(6, 1.0, 0.5, Boundary::PBC);
    const std::string rep = report_generate(r);
    CHECK(rep.find("Parameters") != std::string::npos);
    CHECK(rep.find("Spectroscopy") == std::string::npos);
    CHECK(rep.find("Frequency fit") == std::string::npos);
    CHECK(rep.find("Noise ensemble") == std::string::npos);
}
