#include "mesonsim/specfit.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <random>

#include <Eigen/Dense>

#include "mesonsim/errors.hpp"
#include "mesonsim/units.hpp"

namespace mesonsim {

double ansatz_eval(const FitModel& m, double x) {
    double osc = m.a0;
    for (int i = 0; i < m.n_modes(); ++i)
        osc += m.a[i] * std::cos(m.omega[i] * x) + m.b[i] * std::sin(m.omega[i] * x);
    return (m.c0 * std::exp(-m.gamma * x) + m.c1) * osc;
}

double ansatz_mse(const FitModel& m, const std::vector<double>& t,
                  const std::vector<double>& y) {
    double acc = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double r = ansatz_eval(m, t[i]) - y[i];
        acc += r * r;
    }
    return acc / static_cast<double>(t.size());
}

std::vector<double> ansatz_gradient(const FitModel& m, const std::vector<double>& t,
                                    const std::vector<double>& y) {
    if (t.empty()) throw ConfigInvalid("data", "empty sample set");
    const int nm = m.n_modes();
    std::vector<double> g(m.n_params(), 0.0);
    for (std::size_t s = 0; s < t.size(); ++s) {
        const double x = t[s];
        const double damp = std::exp(-m.gamma * x);
        const double env = m.c0 * damp + m.c1;
        double osc = m.a0;
        for (int i = 0; i < nm; ++i)
            osc += m.a[i] * std::cos(m.omega[i] * x) + m.b[i] * std::sin(m.omega[i] * x);
        const double r = env * osc - y[s];
        g[0] += r * damp * osc;                 // c0
        g[1] += r * osc;                        // c1
        g[2] += r * (-x * m.c0 * damp) * osc;   // gamma
        g[3] += r * env;                        // a0
        for (int i = 0; i < nm; ++i) {
            const double c = std::cos(m.omega[i] * x), sn = std::sin(m.omega[i] * x);
            g[4 + i] += r * env * c;
            g[4 + nm + i] += r * env * sn;
            g[4 + 2 * nm + i] += r * env * x * (-m.a[i] * sn + m.b[i] * c);
        }
    }
    const double scale = 2.0 / static_cast<double>(t.size());
    for (auto& v : g) v *= scale;
    return g;
}

std::vector<double> pack_params(const FitModel& m) {
    std::vector<double> p = {m.c0, m.c1, m.gamma, m.a0};
    p.insert(p.end(), m.a.begin(), m.a.end());
    p.insert(p.end(), m.b.begin(), m.b.end());
    p.insert(p.end(), m.omega.begin(), m.omega.end());
    return p;
}

FitModel unpack_params(const std::vector<double>& p, int n_modes) {
    FitModel m;
    m.c0 = p[0];
    m.c1 = p[1];
    m.gamma = p[2];
    m.a0 = p[3];
    m.a.assign(p.begin() + 4, p.begin() + 4 + n_modes);
    m.b.assign(p.begin() + 4 + n_modes, p.begin() + 4 + 2 * n_modes);
    m.omega.assign(p.begin() + 4 + 2 * n_modes, p.begin() + 4 + 3 * n_modes);
    return m;
}

FftPeaks fft_peaks(const std::vector<double>& t, const std::vector<double>& y, int n_peaks,
                   double prominence_rel) {
    const int n = static_cast<int>(t.size());
    if (n < 8 || y.size() != t.size())
        throw ConfigInvalid("signal", "need >= 8 uniform samples");
    const double dt = t[1] - t[0];
    for (int i = 1; i < n; ++i)
        if (std::abs(t[i] - t[i - 1] - dt) > 1e-9 * std::max(1.0, std::abs(dt)))
            throw ConfigInvalid("signal", "time grid not uniform");

    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= n;
    // Zero-padded Hann-windowed DFT for interpolation headroom.
    const int pad = 4;
    const int nfft = pad * n;
    std::vector<double> mag(nfft / 2 + 1);
    for (int k = 0; k <= nfft / 2; ++k) {
        std::complex<double> acc(0.0, 0.0);
        const double wk = units::two_pi * k / (nfft * dt);
        for (int i = 0; i < n; ++i) {
            const double hann = 0.5 * (1.0 - std::cos(units::two_pi * i / (n - 1)));
            acc += hann * (y[i] - mean) * std::exp(std::complex<double>(0.0, -wk * t[i]));
        }
        mag[k] = std::abs(acc);
    }

    double global_max = 0.0;
    for (double v : mag) global_max = std::max(global_max, v);
    FftPeaks out;
    if (global_max <= 0.0) {
        out.complete = false;
        return out;
    }
    struct Cand {
        double omega, mag;
    };
    std::vector<Cand> cands;
    for (int k = 1; k + 1 < static_cast<int>(mag.size()); ++k) {
        if (!(mag[k] >= mag[k - 1] && mag[k] > mag[k + 1])) continue;
        if (mag[k] < prominence_rel * global_max) continue;
        // Quadratic vertex on log magnitude.
        const double lm = std::log(mag[k - 1]), l0 = std::log(mag[k]),
                     lp = std::log(mag[k + 1]);
        const double den = lm - 2.0 * l0 + lp;
        double shift = 0.0;
        if (den < -1e-300) shift = 0.5 * (lm - lp) / den;
        const double dw = units::two_pi / (nfft * dt);
        cands.push_back({(k + shift) * dw, mag[k]});
    }
    std::sort(cands.begin(), cands.end(),
              [](const Cand& a, const Cand& b) { return a.mag > b.mag; });
    for (int i = 0; i < n_peaks && i < static_cast<int>(cands.size()); ++i) {
        out.omega.push_back(cands[i].omega);
        out.magnitude.push_back(cands[i].mag);
    }
    out.complete = static_cast<int>(out.omega.size()) == n_peaks;
    return out;
}

std::vector<double> moving_average(const std::vector<double>& y, int window) {
    const int n = static_cast<int>(y.size());
    const int half = window / 2;
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) {
        const int lo = std::max(0, i - half), hi = std::min(n - 1, i + half);
        double acc = 0.0;
        for (int j = lo; j <= hi; ++j) acc += y[j];
        out[i] = acc / (hi - lo + 1);
    }
    return out;
}

namespace {

// Linear least squares for (a0, a_i, b_i) at fixed frequencies, unit envelope.
void init_amplitudes(FitModel& m, const std::vector<double>& t,
                     const std::vector<double>& y) {
    const int nm = m.n_modes();
    const int cols = 1 + 2 * nm;
    Eigen::MatrixXd a(t.size(), cols);
    Eigen::VectorXd rhs(t.size());
    for (std::size_t s = 0; s < t.size(); ++s) {
        a(s, 0) = 1.0;
        for (int i = 0; i < nm; ++i) {
            a(s, 1 + i) = std::cos(m.omega[i] * t[s]);
            a(s, 1 + nm + i) = std::sin(m.omega[i] * t[s]);
        }
        rhs(s) = y[s];
    }
    const Eigen::VectorXd x =
        (a.transpose() * a + 1e-12 * Eigen::MatrixXd::Identity(cols, cols))
            .ldlt()
            .solve(a.transpose() * rhs);
    m.a0 = x(0);
    for (int i = 0; i < nm; ++i) {
        m.a[i] = x(1 + i);
        m.b[i] = x(1 + nm + i);
    }
}

// Log-envelope regression: slope of log |y - mean| upper envelope vs t.
double init_gamma(const std::vector<double>& t, const std::vector<double>& y) {
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= y.size();
    // Block maxima of the rectified signal give the envelope samples.
    const int n = static_cast<int>(y.size());
    const int block = std::max(4, n / 25);
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int cnt = 0;
    for (int b0 = 0; b0 + block <= n; b0 += block) {
        double env = 0.0, tc = 0.0;
        for (int i = b0; i < b0 + block; ++i) {
            if (std::abs(y[i] - mean) > env) {
                env = std::abs(y[i] - mean);
                tc = t[i];
            }
        }
        if (env < 1e-12) continue;
        const double ly = std::log(env);
        sx += tc;
        sy += ly;
        sxx += tc * tc;
        sxy += tc * ly;
        ++cnt;
    }
    if (cnt < 2) return 0.0;
    const double den = cnt * sxx - sx * sx;
    if (std::abs(den) < 1e-12) return 0.0;
    return std::max(0.0, -(cnt * sxy - sx * sy) / den);
}

} // namespace

FitResult fit_frequencies(const std::vector<double>& t, const std::vector<double>& y,
                          const std::vector<double>& init_omegas, const FitOptions& opts) {
    if (init_omegas.empty()) throw ConfigInvalid("init_omegas", "need >= 1 frequency");
    if (t.size() != y.size() || t.empty())
        throw ConfigInvalid("signal", "mismatched or empty samples");
    const int nm = static_cast<int>(init_omegas.size());

    FitModel base;
    base.a.assign(nm, 0.0);
    base.b.assign(nm, 0.0);
    base.omega = init_omegas;
    std::sort(base.omega.begin(), base.omega.end());
    base.gamma = init_gamma(t, y);
    base.c0 = 0.5;
    base.c1 = 0.5;
    init_amplitudes(base, t, y);

    FitResult result;
    result.best_mse = std::numeric_limits<double>::infinity();
    const FitModel* best = nullptr;

    for (int run = 0; run < opts.n_runs; ++run) {
        std::mt19937_64 rng(opts.master_seed * 0x9e3779b97f4a7c15ULL + run);
        std::normal_distribution<double> gauss(0.0, 1.0);

        FitModel m = base;
        m.c0 = base.c0 * (1.0 + opts.init_jitter * gauss(rng));
        m.c1 = base.c1 * (1.0 + opts.init_jitter * gauss(rng));
        m.gamma = base.gamma + 0.05 * opts.init_jitter * std::abs(gauss(rng));
        m.a0 = base.a0 + opts.init_jitter * 0.1 * gauss(rng);
        for (int i = 0; i < nm; ++i) {
            m.a[i] = base.a[i] * (1.0 + opts.init_jitter * gauss(rng));
            m.b[i] = base.b[i] * (1.0 + opts.init_jitter * gauss(rng));
        }

        std::vector<double> p = pack_params(m);
        std::vector<double> m1(p.size(), 0.0), m2(p.size(), 0.0);
        bool diverged = false;
        for (int epoch = 0; epoch < opts.epochs; ++epoch) {
            const FitModel cur = unpack_params(p, nm);
            const std::vector<double> g = ansatz_gradient(cur, t, y);
            bool finite = true;
            for (double v : g)
                if (!std::isfinite(v)) finite = false;
            if (!finite) {
                diverged = true;
                break;
            }
            const double b1t = 1.0 - std::pow(opts.beta1, epoch + 1);
            const double b2t = 1.0 - std::pow(opts.beta2, epoch + 1);
            for (std::size_t i = 0; i < p.size(); ++i) {
                m1[i] = opts.beta1 * m1[i] + (1.0 - opts.beta1) * g[i];
                m2[i] = opts.beta2 * m2[i] + (1.0 - opts.beta2) * g[i] * g[i];
                p[i] -= opts.lr * (m1[i] / b1t) /
                        (std::sqrt(m2[i] / b2t) + opts.adam_eps);
            }
        }

        FitRun fr;
        fr.model = unpack_params(p, nm);
        fr.mse = diverged ? std::numeric_limits<double>::infinity()
                          : ansatz_mse(fr.model, t, y);
        if (!std::isfinite(fr.mse)) diverged = true;
        fr.diverged = diverged;
        if (diverged) ++result.n_diverged;
        // Canonical form: frequencies positive and ascending, quadratures
        // remapped accordingly (cos is even, sin is odd in omega).
        if (!diverged) {
            std::vector<int> idx(nm);
            for (int i = 0; i < nm; ++i) {
                if (fr.model.omega[i] < 0.0) {
                    fr.model.omega[i] = -fr.model.omega[i];
                    fr.model.b[i] = -fr.model.b[i];
                }
                idx[i] = i;
            }
            std::sort(idx.begin(), idx.end(), [&](int a, int b) {
                return fr.model.omega[a] < fr.model.omega[b];
            });
            FitModel srt = fr.model;
            for (int i = 0; i < nm; ++i) {
                srt.omega[i] = fr.model.omega[idx[i]];
                srt.a[i] = fr.model.a[idx[i]];
                srt.b[i] = fr.model.b[idx[i]];
            }
            fr.model = srt;
            if (fr.mse < result.best_mse) {
                result.best_mse = fr.mse;
                best = nullptr;  // reset below after push_back
            }
        }
        result.runs.push_back(std::move(fr));
    }

    int n_ok = 0;
    result.omega_mean.assign(nm, 0.0);
    result.omega_std.assign(nm, 0.0);
    for (const auto& fr : result.runs) {
        if (fr.diverged) continue;
        ++n_ok;
        for (int i = 0; i < nm; ++i) result.omega_mean[i] += fr.model.omega[i];
        if (fr.mse == result.best_mse) best = &fr.model;
    }
    if (n_ok == 0) throw DivergenceDetected("all optimization runs diverged");
    for (auto& v : result.omega_mean) v /= n_ok;
    for (const auto& fr : result.runs) {
        if (fr.diverged) continue;
        for (int i = 0; i < nm; ++i) {
            const double d = fr.model.omega[i] - result.omega_mean[i];
            result.omega_std[i] += d * d;
        }
    }
    for (auto& v : result.omega_std) v = std::sqrt(v / n_ok);
    if (best) result.negative_gamma = best->gamma < 0.0;
    return result;
}

} // namespace mesonsim
