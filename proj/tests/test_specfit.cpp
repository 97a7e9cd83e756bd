#include <cmath>
#include <random>

#include "doctest.h"
#include "mesonsim/errors.hpp"
#include "mesonsim/specfit.hpp"
#include "mesonsim/units.hpp"

using namespace mesonsim;

namespace {

FitModel random_model(int n_modes, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    FitModel m;
    m.c0 = u(rng);
    m.c1 = u(rng);
    m.gamma = 0.3 * u(rng);
    m.a0 = u(rng);
    for (int i = 0; i < n_modes; ++i) {
        m.a.push_back(u(rng));
        m.b.push_back(u(rng));
        m.omega.push_back(1.0 + u(rng));
    }
    return m;
}

std::vector<double> sample_times(int n, double dt) {
    std::vector<double> t(n);
    for (int i = 0; i < n; ++i) t[i] = i * dt;
    return t;
}

} // namespace

TEST_CASE("ansatz evaluation") {
    FitModel m;
    m.c0 = 0.0;
    m.c1 = 1.0;
    m.gamma = 0.0;
    m.a0 = 0.5;
    m.a = {2.0};
    m.b = {0.0};
    m.omega = {3.0};
    CHECK(ansatz_eval(m, 0.0) == doctest::Approx(2.5));
    CHECK(ansatz_eval(m, units::two_pi / 3.0) == doctest::Approx(2.5));
    m.c0 = 1.0;
    m.c1 = 0.0;
    m.gamma = 0.7;
    CHECK(ansatz_eval(m, 1.0) ==
          doctest::Approx(std::exp(-0.7) * (0.5 + 2.0 * std::cos(3.0))));
}

TEST_CASE("parameter packing round trip") {
    std::mt19937_64 rng(1);
    const FitModel m = random_model(3, rng);
    const auto p = pack_params(m);
    REQUIRE(static_cast<int>(p.size()) == m.n_params());
    const FitModel back = unpack_params(p, 3);
    CHECK(back.c0 == m.c0);
    CHECK(back.gamma == m.gamma);
    for (int i = 0; i < 3; ++i) {
        CHECK(back.a[i] == m.a[i]);
        CHECK(back.b[i] == m.b[i]);
        CHECK(back.omega[i] == m.omega[i]);
    }
}

TEST_CASE("analytic gradient matches finite differences over random draws") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const auto t = sample_times(40, 0.17);
    int checked = 0;
    for (int draw = 0; draw < 100; ++draw) {
        const FitModel m = random_model(2, rng);
        std::vector<double> y(t.size());
        for (std::size_t i = 0; i < t.size(); ++i) y[i] = 0.3 * u(rng);

        const auto grad = ansatz_gradient(m, t, y);
        auto p = pack_params(m);
        const double h = 1e-6;
        for (std::size_t j = 0; j < p.size(); ++j) {
            auto pp = p, pm = p;
            pp[j] += h;
            pm[j] -= h;
            const double fd = (ansatz_mse(unpack_params(pp, 2), t, y) -
                               ansatz_mse(unpack_params(pm, 2), t, y)) /
                              (2.0 * h);
            const double scale = std::max({std::abs(fd), std::abs(grad[j]), 1e-3});
            CHECK(std::abs(grad[j] - fd) / scale < 1e-5);
            ++checked;
        }
    }
    CHECK(checked == 100 * 10);
}

TEST_CASE("fft peak seeding finds well separated tones") {
    const auto t = sample_times(600, 0.05);
    std::vector<double> y(t.size());
    for (std::size_t i = 0; i < t.size(); ++i)
        y[i] = 1.4 + std::cos(2.0 * t[i]) + 0.6 * std::sin(5.0 * t[i]);
    const FftPeaks peaks = fft_peaks(t, y, 2);
    REQUIRE(peaks.omega.size() == 2);
    CHECK(peaks.complete);
    std::vector<double> w = peaks.omega;
    std::sort(w.begin(), w.end());
    CHECK(w[0] == doctest::Approx(2.0).epsilon(0.02));
    CHECK(w[1] == doctest::Approx(5.0).epsilon(0.02));

    const FftPeaks overfull = fft_peaks(t, y, 6);
    CHECK(!overfull.complete);
}

TEST_CASE("moving average is centered with truncated edges") {
    const std::vector<double> y = {1.0, 2.0, 3.0, 4.0, 5.0};
    const auto s = moving_average(y, 3);
    REQUIRE(s.size() == 5);
    CHECK(s[0] == doctest::Approx(1.5));   // mean of {1, 2}
    CHECK(s[2] == doctest::Approx(3.0));
    CHECK(s[4] == doctest::Approx(4.5));
    CHECK(moving_average(y, 1) == y);
}

TEST_CASE("quick two-tone recovery with a reduced protocol") {
    // The full 20 x 20000 benchmark is exercised by the acceptance suite;
    // this is a smoke-scale version of the same pipeline.
    const auto t = sample_times(500, 0.06);
    std::mt19937_64 rng(4);
    std::normal_distribution<double> noise(0.0, 0.01);
    std::vector<double> y(t.size());
    for (std::size_t i = 0; i < t.size(); ++i)
        y[i] = (0.8 * std::exp(-0.1 * t[i]) + 0.2) *
                   (0.1 + 0.9 * std::cos(1.0 * t[i]) + 0.4 * std::sin(1.618 * t[i])) +
               noise(rng);

    FitOptions opts;
    opts.n_runs = 4;
    opts.epochs = 6000;
    const FitResult res = fit_frequencies(t, y, {1.05, 1.55}, opts);
    REQUIRE(res.omega_mean.size() == 2);
    CHECK(res.n_diverged == 0);
    CHECK(res.omega_mean[0] == doctest::Approx(1.0).epsilon(0.02));
    CHECK(res.omega_mean[1] == doctest::Approx(1.618).epsilon(0.02));
    CHECK(res.best_mse < 5e-4);
}
