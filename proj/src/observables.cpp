#include "mesonsim/observables.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mesonsim/errors.hpp"

namespace mesonsim {

std::vector<double> magnetization(const StateVector& state) {
    const int n = state.n_sites;
    std::vector<double> m(n, 0.0);
    const std::size_t d = state.dim();
    for (std::size_t b = 0; b < d; ++b) {
        const double w = std::norm(state.amp[b]);
        if (w == 0.0) continue;
        for (int i = 0; i < n; ++i) m[i] += (b >> i) & 1u ? -w : w;
    }
    return m;
}

std::vector<double> connected_correlation(const StateVector& state) {
    const int n = state.n_sites;
    std::vector<double> m(n, 0.0);
    std::vector<double> q(static_cast<std::size_t>(n) * n, 0.0);
    std::vector<double> z(n);
    const std::size_t d = state.dim();
    for (std::size_t b = 0; b < d; ++b) {
        const double w = std::norm(state.amp[b]);
        if (w == 0.0) continue;
        for (int i = 0; i < n; ++i) z[i] = (b >> i) & 1u ? -1.0 : 1.0;
        for (int i = 0; i < n; ++i) {
            m[i] += w * z[i];
            const double wz = w * z[i];
            for (int j = i + 1; j < n; ++j) q[i * n + j] += wz * z[j];
        }
    }
    std::vector<double> c(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) {
        c[i * n + i] = 1.0 - m[i] * m[i];
        for (int j = i + 1; j < n; ++j) {
            const double v = q[i * n + j] - m[i] * m[j];
            c[i * n + j] = v;
            c[j * n + i] = v;
        }
    }
    return c;
}

double domain_wall_density(const StateVector& state, const IsingSpec& spec) {
    if (spec.nn_bonds.empty()) throw ConfigInvalid("spec", "no nearest-neighbor bonds defined");
    const std::size_t d = state.dim();
    double zz_mean = 0.0;
    for (std::size_t b = 0; b < d; ++b) {
        const double w = std::norm(state.amp[b]);
        if (w == 0.0) continue;
        double zz = 0.0;
        for (const auto& [i, j] : spec.nn_bonds) {
            const bool flip = ((b >> i) ^ (b >> j)) & 1u;
            zz += flip ? -1.0 : 1.0;
        }
        zz_mean += w * zz;
    }
    zz_mean /= static_cast<double>(spec.nn_bonds.size());
    return 0.5 * (1.0 - zz_mean);
}

Snapshot record_snapshot(const StateVector& state, const IsingSpec& spec,
                         const ObservableSet& obs) {
    Snapshot s;
    if (obs.magnetization) s.sz = magnetization(state);
    if (obs.correlations) s.corr = connected_correlation(state);
    if (obs.domain_walls) s.p_dw = domain_wall_density(state, spec);
    return s;
}

namespace {

CorrelationMap build_map(const Trajectory& traj,
                         const std::vector<std::vector<std::pair<int, int>>>& pairs_by_d) {
    CorrelationMap map;
    map.times = traj.times;
    const int n = traj.n_sites;
    for (int d = 0; d < static_cast<int>(pairs_by_d.size()); ++d)
        if (!pairs_by_d[d].empty()) map.distances.push_back(d);
    map.values.resize(traj.times.size());
    for (std::size_t t = 0; t < traj.times.size(); ++t) {
        const auto& corr = traj.snapshots[t].corr;
        if (corr.empty()) throw ConfigInvalid("trajectory", "snapshots carry no correlations");
        for (int d : map.distances) {
            double sum = 0.0;
            for (const auto& [i, j] : pairs_by_d[d]) sum += corr[i * n + j];
            map.values[t].push_back(sum / static_cast<double>(pairs_by_d[d].size()));
        }
    }
    return map;
}

} // namespace

CorrelationMap correlation_map_chain(const Trajectory& traj, Boundary boundary) {
    const int n = traj.n_sites;
    const int dmax = boundary == Boundary::PBC ? n / 2 : n - 1;
    std::vector<std::vector<std::pair<int, int>>> pairs(dmax + 1);
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            int d = j - i;
            if (boundary == Boundary::PBC) d = std::min(d, n - d);
            pairs[d].emplace_back(i, j);
        }
    }
    return build_map(traj, pairs);
}

CorrelationMap correlation_map_ladder_intra_leg(const Trajectory& traj, int n_per_leg) {
    std::vector<std::vector<std::pair<int, int>>> pairs(n_per_leg);
    for (int leg = 0; leg < 2; ++leg) {
        const int base = leg * n_per_leg;
        for (int i = 0; i < n_per_leg; ++i)
            for (int j = i; j < n_per_leg; ++j)
                pairs[j - i].emplace_back(base + i, base + j);
    }
    return build_map(traj, pairs);
}

FrontEstimate light_cone_front(const CorrelationMap& map, double threshold) {
    FrontEstimate est;
    std::vector<int> missing;
    for (std::size_t di = 0; di < map.distances.size(); ++di) {
        const int d = map.distances[di];
        if (d == 0) continue;
        bool found = false;
        for (std::size_t t = 0; t < map.times.size(); ++t) {
            if (std::abs(map.values[t][di]) >= threshold) {
                est.arrivals.emplace_back(d, map.times[t]);
                found = true;
                break;
            }
        }
        if (!found) missing.push_back(d);
    }
    // Keep the longest strictly increasing prefix of arrival times: once
    // t*(d) stops growing the front has wrapped (PBC) or hit the boundary
    // and those separations no longer probe the free spread.
    std::size_t keep = 1;
    while (keep < est.arrivals.size() &&
           est.arrivals[keep].second > est.arrivals[keep - 1].second)
        ++keep;
    est.arrivals.resize(std::min(keep, est.arrivals.size()));
    if (est.arrivals.size() < 4) {
        std::string msg = "front detected at only " + std::to_string(est.arrivals.size()) +
                          " separations (need >= 4); threshold never crossed at d =";
        for (int d : missing) msg += " " + std::to_string(d);
        throw FrontNotDetected(msg);
    }
    // Least squares d = a + b * t*; the fitted slope is the front velocity.
    const std::size_t m = est.arrivals.size();
    double st = 0.0, sd = 0.0, stt = 0.0, std_ = 0.0;
    for (const auto& [d, t] : est.arrivals) {
        st += t;
        sd += d;
        stt += t * t;
        std_ += t * d;
    }
    const double denom = m * stt - st * st;
    if (denom <= 0.0) throw FrontNotDetected("arrival times are degenerate");
    const double slope = (m * std_ - st * sd) / denom;
    const double intercept = (sd - slope * st) / m;
    double ss_res = 0.0;
    for (const auto& [d, t] : est.arrivals) {
        const double r = d - (intercept + slope * t);
        ss_res += r * r;
    }
    const double slope_var = m > 2 ? (ss_res / (m - 2)) * m / denom : 0.0;
    est.velocity = slope;
    est.velocity_stderr = std::sqrt(std::max(0.0, slope_var));
    return est;
}

std::vector<double> magnetization_from_bitstrings(const std::vector<std::uint64_t>& shots,
                                                  int n_sites) {
    std::vector<double> m(n_sites, 0.0);
    for (const auto s : shots)
        for (int i = 0; i < n_sites; ++i) m[i] += (s >> i) & 1u ? -1.0 : 1.0;
    if (!shots.empty())
        for (auto& v : m) v /= static_cast<double>(shots.size());
    return m;
}

double domain_wall_density_from_bitstrings(const std::vector<std::uint64_t>& shots,
                                           const IsingSpec& spec) {
    if (spec.nn_bonds.empty()) throw ConfigInvalid("spec", "no nearest-neighbor bonds defined");
    double zz = 0.0;
    for (const auto s : shots)
        for (const auto& [i, j] : spec.nn_bonds) zz += ((s >> i) ^ (s >> j)) & 1u ? -1.0 : 1.0;
    if (!shots.empty()) zz /= static_cast<double>(shots.size() * spec.nn_bonds.size());
    return 0.5 * (1.0 - zz);
}

} // namespace mesonsim
