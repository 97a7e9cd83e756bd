#include <sstream>

#include "doctest.h"
#include "mesonsim/config.hpp"
#include "mesonsim/errors.hpp"

using namespace mesonsim;

namespace {

ConfigFile parse(const std::string& text) {
    std::istringstream ss(text);
    return ConfigFile::parse(ss);
}

const char* kMinimal = R"(
[experiment]
name = demo
[model]
type = tfic
n = 6
hx = 1.0 J
hz = 0.5 J
[protocol]
t_max = 2.0 tJ
n_points = 10
[observables]
record = magnetization
)";

} // namespace

TEST_CASE("minimal config parses with defaults") {
    const ExperimentConfig cfg = parse_experiment_config(parse(kMinimal));
    CHECK(cfg.name == "demo");
    CHECK(cfg.model.type == "tfic");
    CHECK(cfg.model.n == 6);
    CHECK(cfg.model.hx == 1.0);
    CHECK(cfg.model.hz == 0.5);
    CHECK(cfg.model.boundary == Boundary::PBC);
    CHECK(cfg.protocol.type == "quench");
    CHECK(cfg.observables.magnetization);
    CHECK(!cfg.observables.correlations);
    CHECK(cfg.spectroscopy.method == "none");
    CHECK(!cfg.fit.enabled);
    CHECK(!cfg.noise.enabled);
    CHECK(cfg.out_dir == "out/demo");
}

TEST_CASE("unit suffixes are mandatory and exact") {
    const ConfigFile f = parse("[a]\nx = 9.0 um\ny = 3\nz = 1.0 MHz\n");
    CHECK(f.get_quantity("a", "x", "um") == 9.0);
    CHECK_THROWS_AS(f.get_quantity("a", "x", "MHz"), ConfigInvalid);  // wrong unit
    CHECK_THROWS_AS(f.get_quantity("a", "y", "um"), ConfigInvalid);   // missing unit
    CHECK_THROWS_AS(f.get_quantity("a", "z", ""), ConfigInvalid);     // unexpected unit
    CHECK(f.get_int("a", "y") == 3);
    CHECK_THROWS_AS(f.get_int("a", "z"), ConfigInvalid);
}

TEST_CASE("structural errors") {
    CHECK_THROWS_AS(parse("x = 1\n"), ConfigInvalid);            // key outside section
    CHECK_THROWS_AS(parse("[a]\nx = 1\nx = 2\n"), ConfigInvalid);  // duplicate key
    CHECK_THROWS_AS(parse("[a\nx = 1\n"), ConfigInvalid);        // unterminated section
    CHECK_THROWS_AS(parse("[a]\nnonsense\n"), ConfigInvalid);    // no equals sign
    CHECK_THROWS_AS(parse("[a]\nx =\n"), ConfigInvalid);         // empty value
}

TEST_CASE("comments and whitespace are tolerated") {
    const ConfigFile f = parse("# header\n[a]  \n  x = 1.5 J  # trailing\n\n");
    CHECK(f.get_quantity("a", "x", "J") == 1.5);
}

TEST_CASE("semantic validation") {
    // Empty observables list.
    std::string bad = kMinimal;
    bad.replace(bad.find("record = magnetization"), 22, "record = ,");
    CHECK_THROWS_AS(parse_experiment_config(parse(bad)), ConfigInvalid);

    // Unknown observable.
    bad = kMinimal;
    bad.replace(bad.find("record = magnetization"), 22, "record = entropy");
    CHECK_THROWS_AS(parse_experiment_config(parse(bad)), ConfigInvalid);

    // Fit requires the magnetization time series.
    bad = kMinimal;
    bad.replace(bad.find("record = magnetization"), 22, "record = correlations");
    bad += "[fit]\nenabled = true\n";
    CHECK_THROWS_AS(parse_experiment_config(parse(bad)), ConfigInvalid);

    // Noise needs a rydberg model.
    std::string noisy = std::string(kMinimal) + "[noise]\nenabled = true\n";
    CHECK_THROWS_AS(parse_experiment_config(parse(noisy)), ConfigInvalid);

    // Two-stage protocol must satisfy ramp + hold = t_max.
    std::string two = kMinimal;
    two.replace(two.find("t_max = 2.0 tJ"), 14, "t_max = 3.0 tJ");
    two.replace(two.find("[protocol]"), 10,
                "[protocol]\ntype = two_stage\nhz0 = 0.0 J\nhz1 = 4.0 J\nramp = 1.0 tJ\n"
                "hold = 1.0 tJ");
    CHECK_THROWS_AS(parse_experiment_config(parse(two)), ConfigInvalid);
}

TEST_CASE("bundled configs all parse") {
    const char* names[] = {"fig1d", "fig1e", "fig1f", "fig1g", "fig2a", "fig2b",
                           "fig3a", "fig3b", "figs1a", "figs1b", "figs2_rescale"};
    for (const char* n : names) {
        const std::string path =
            std::string(MESONSIM_SOURCE_DIR) + "/configs/" + n + ".cfg";
        const ExperimentConfig cfg = load_experiment_config(path);
        CHECK(cfg.name == n);
    }
}
