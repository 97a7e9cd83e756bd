#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mesonsim/engine.hpp"
#include "mesonsim/ising.hpp"

namespace mesonsim {

// Eigenspectrum, ascending. Dense path carries eigenvectors (columns);
// momentum labels are filled for translation-invariant PBC rings on request.
struct Spectrum {
    int n_sites = 0;
    std::vector<double> energies;
    Eigen::MatrixXd eigenvectors;  // empty unless dense path with vectors
    bool has_eigenvectors = false;
    std::vector<int> momentum;  // k index m (k = 2 pi m / N), -1 when unresolved

    double gap(int i) const { return energies[i] - energies[0]; }
};

// Dense exact diagonalization (n <= 14). All 2^n energies; eigenvectors
// optional but kept by default.
Spectrum full_spectrum(const IsingSpec& spec, bool want_vectors = true);

// Iterative path (n <= 20): the `count` lowest eigenvalues, residuals < tol.
std::vector<double> lowest_eigenvalues(const IsingSpec& spec, int count, double tol = 1e-8);

// Momentum labels for a PBC ring spec via the one-site cyclic shift,
// resolved inside degenerate groups (grouping tolerance 1e-9).
void label_momenta(Spectrum& spectrum, const IsingSpec& spec);

// S(k, omega) on a momentum-frequency grid with annotations.
struct SkwGrid {
    std::vector<double> k;                 // momentum values (rad/site)
    std::vector<std::string> k_label;      // e.g. "2pi*3/12", "sine m=2", "uniform"
    std::vector<double> omega;
    std::vector<std::vector<double>> s;    // [k][omega], >= 0
    double eta = 0.0;
    std::vector<double> sum_rule;          // per k: sum_omega S * domega
    double clamp_floor = 0.0;              // most negative value clamped to 0
};

// Lehmann representation slice:
//   S(k, omega) = sum_{n != 0} |<n| sz_k |0>|^2 L_eta(omega - (E_n - E_0)),
// sz_k = N^{-1/2} sum_j e^{ikj} sz_j, L_eta a unit-area Lorentzian of
// half-width eta. The elastic n = 0 term is excluded so the inelastic
// peak structure is not buried under the omega = 0 response.
std::vector<double> dsf_lehmann(const Spectrum& spectrum, const IsingSpec& spec, double k,
                                const std::vector<double>& omega_grid, double eta);

// Full k-resolved Lehmann grid. PBC: k = 2 pi m / N for m = 0..N/2.
SkwGrid dsf_lehmann_grid(const Spectrum& spectrum, const IsingSpec& spec,
                         const std::vector<double>& omega_grid, double eta);

struct TimeDomainOptions {
    double t_max = 40.0;        // correlator window (tJ)
    double dt_sample = 0.05;    // correlator sampling step
    double eta = 0.1;           // exponential damping rate
    double omega_max = 12.0;
    int omega_points = 1200;
    double tol = 1e-8;          // propagator budget per evolution
};

// Exact Krylov correlators C_k(t) = <psi_k| e^{-i(H-E0)t} |psi_k> with
// psi_k = (sz_k - <sz_k>) |0>, transformed with a Hann window and e^{-eta t}
// damping. PBC uses plane-wave momenta; OBC uses reflection-symmetric sine
// modes k_m = pi m / (L+1) plus the uniform-sum mode (labeled "uniform").
// Negative kernel sidelobes are clamped to zero and recorded.
SkwGrid dsf_time_domain(const IsingSpec& spec, const TimeDomainOptions& opts = {});

// Lowest-excitation dispersion ridge: per k, the omega of the lowest local
// maximum above noise_floor_rel * that row's max, with sub-grid refinement.
// Rows without a resolvable maximum are skipped; fewer than 5 surviving
// rows throws. Confidence is reported against the global max.
struct RidgePoint {
    double k = 0.0;
    double omega = 0.0;
    double confidence = 0.0;  // peak height / global max
};

std::vector<RidgePoint> dispersion_extract(const SkwGrid& grid, double noise_floor_rel = 0.01);

// Maximal group velocity from a ridge: centered finite differences over
// the k-sorted ridge (units sites * J).
double group_velocity(const std::vector<RidgePoint>& ridge);

struct Peak {
    double omega = 0.0;
    double weight = 0.0;  // interpolated height
};

// Ordered local maxima of a slice above prominence_rel * max, positions
// refined by quadratic interpolation on log S.
std::vector<Peak> peak_extract(const std::vector<double>& omega_grid,
                               const std::vector<double>& s, double prominence_rel = 0.01,
                               double omega_min = 0.0);

} // namespace mesonsim
