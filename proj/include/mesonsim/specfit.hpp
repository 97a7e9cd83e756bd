#pragma once

#include <cstdint>
#include <vector>

namespace mesonsim {

// Damped Fourier ansatz
//   f(x) = (c0 e^{-gamma x} + c1) (a0 + sum_i a_i cos(w_i x) + b_i sin(w_i x)).
struct FitModel {
    double c0 = 0.0, c1 = 1.0;
    double gamma = 0.0;  // unconstrained during optimization
    double a0 = 0.0;
    std::vector<double> a, b, omega;  // equal lengths, >= 1 mode

    int n_modes() const { return static_cast<int>(omega.size()); }
    int n_params() const { return 4 + 3 * n_modes(); }
};

double ansatz_eval(const FitModel& model, double x);

// Mean squared error of the ansatz against samples (t, y).
double ansatz_mse(const FitModel& model, const std::vector<double>& t,
                  const std::vector<double>& y);

// Analytic gradient of the MSE, packed [c0, c1, gamma, a0, a.., b.., omega..].
std::vector<double> ansatz_gradient(const FitModel& model, const std::vector<double>& t,
                                    const std::vector<double>& y);

std::vector<double> pack_params(const FitModel& model);
FitModel unpack_params(const std::vector<double>& p, int n_modes);

// Detrended, Hann-windowed discrete Fourier magnitudes; the n_peaks largest
// local maxima above a prominence floor, quadratically refined. `complete`
// is false when fewer stable peaks exist than requested.
struct FftPeaks {
    std::vector<double> omega;      // angular frequencies, descending magnitude
    std::vector<double> magnitude;
    bool complete = true;
};

FftPeaks fft_peaks(const std::vector<double>& t, const std::vector<double>& y, int n_peaks,
                   double prominence_rel = 0.05);

struct FitOptions {
    int n_runs = 20;
    int epochs = 20000;
    double lr = 1e-3;
    double beta1 = 0.9;  // first/second moment decay of the adaptive optimizer
    double beta2 = 0.999;
    double adam_eps = 1e-8;
    double init_jitter = 0.1;  // relative spread of non-frequency initialization
    std::uint64_t master_seed = 1;
};

struct FitRun {
    FitModel model;
    double mse = 0.0;
    bool diverged = false;
};

struct FitResult {
    std::vector<FitRun> runs;
    std::vector<double> omega_mean;  // ascending, averaged over finished runs
    std::vector<double> omega_std;
    double best_mse = 0.0;
    int n_diverged = 0;
    bool negative_gamma = false;  // best run converged to gamma < 0
};

// Multi-restart adaptive gradient descent on the MSE. Frequencies start from
// init_omegas in every run; amplitudes come from a linear least-squares solve
// and gamma from log-envelope regression, both jittered per run by the
// run-derived seed. Runs with non-finite MSE are excluded and counted.
FitResult fit_frequencies(const std::vector<double>& t, const std::vector<double>& y,
                          const std::vector<double>& init_omegas,
                          const FitOptions& opts = {});

// Centered moving average (window odd; edges use the available span).
std::vector<double> moving_average(const std::vector<double>& y, int window = 3);

} // namespace mesonsim
