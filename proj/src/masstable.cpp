#include "mesonsim/masstable.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "mesonsim/errors.hpp"
#include "mesonsim/units.hpp"

namespace mesonsim {

std::vector<double> MassTable::visible_ratios() const {
    std::vector<double> out;
    for (const auto& m : modes)
        if (m.visible) out.push_back(m.ratio);
    return out;
}

MassTable e8_mass_table() {
    using units::pi;
    MassTable t;
    t.symmetry = "E8";
    const double m1 = 1.0;
    const double m2 = 2.0 * std::cos(pi / 5.0);
    const double m3 = 2.0 * std::cos(pi / 30.0);
    const double m4 = 2.0 * m2 * std::cos(7.0 * pi / 30.0);
    const double m5 = 2.0 * m2 * std::cos(2.0 * pi / 15.0);
    const double m6 = m2 * m3;
    const double m7 = 2.0 * m4 * std::cos(pi / 5.0);
    const double m8 = 2.0 * m5 * std::cos(pi / 5.0);
    const double ratios[] = {m1, m2, m3, m4, m5, m6, m7, m8};
    // Only the first three carry resolvable weight in S(k~0, omega) above
    // the two-particle threshold 2 m1.
    for (int i = 0; i < 8; ++i)
        t.modes.push_back({ratios[i], ratios[i] < 2.0, "m" + std::to_string(i + 1)});
    return t;
}

MassTable d8_1_mass_table() {
    using units::pi;
    MassTable t;
    t.symmetry = "D8(1)";
    // Affine Toda masses with Coxeter number h = 14: chain modes
    // 2 sin(a pi / 14), a = 1..6, plus the degenerate spinor doublet at
    // exactly 1 in the same units (spinor / lightest = 1 / (2 sin(pi/14))).
    std::vector<std::pair<double, std::string>> raw;
    for (int a = 1; a <= 6; ++a)
        raw.push_back({2.0 * std::sin(a * pi / 14.0), "v" + std::to_string(a)});
    raw.push_back({1.0, "s"});
    raw.push_back({1.0, "s'"});
    std::sort(raw.begin(), raw.end());
    const double m1 = raw.front().first;
    // Visibility flags determined from the exact S(k, omega) of the
    // two-leg ladder: the two lightest vector modes and the spinor
    // doublet dominate the low-k response.
    for (const auto& [m, lab] : raw) {
        const double r = m / m1;
        const bool vis = lab == "v1" || lab == "v2" || lab == "s" || lab == "s'";
        t.modes.push_back({r, vis, lab});
    }
    return t;
}

MassTable read_mass_table(std::istream& is) {
    MassTable t;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto pos = line.find("symmetry=");
            if (pos != std::string::npos) {
                t.symmetry = line.substr(pos + 9);
                while (!t.symmetry.empty() && std::isspace((unsigned char)t.symmetry.back()))
                    t.symmetry.pop_back();
            }
            continue;
        }
        std::istringstream ss(line);
        MassMode m;
        int vis = 1;
        if (!(ss >> m.ratio >> vis)) throw ConfigInvalid("masses", "bad line: " + line);
        ss >> m.label;
        m.visible = vis != 0;
        t.modes.push_back(m);
    }
    if (t.modes.empty()) throw ConfigInvalid("masses", "empty mass table");
    if (!std::is_sorted(t.modes.begin(), t.modes.end(),
                        [](const MassMode& a, const MassMode& b) { return a.ratio < b.ratio; }))
        throw ConfigInvalid("masses", "ratios must ascend");
    if (std::abs(t.modes.front().ratio - 1.0) > 1e-12)
        throw ConfigInvalid("masses", "first ratio must be 1");
    return t;
}

MassTable load_mass_table_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigInvalid("masses", "cannot open " + path);
    return read_mass_table(is);
}

void write_mass_table(std::ostream& os, const MassTable& table) {
    os << "# symmetry=" << table.symmetry << "\n";
    os << std::setprecision(15);
    for (const auto& m : table.modes)
        os << m.ratio << " " << (m.visible ? 1 : 0) << " " << m.label << "\n";
}

namespace {

struct Candidate {
    double ratio;
    int table_index;  // -1 for combinations
    std::string label;
};

std::vector<Candidate> combination_candidates(const MassTable& table) {
    std::vector<Candidate> out;
    const int n = static_cast<int>(table.modes.size());
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            out.push_back({table.modes[i].ratio + table.modes[j].ratio, -1,
                           table.modes[i].label + "+" + table.modes[j].label});
            if (j > i)
                out.push_back({table.modes[j].ratio - table.modes[i].ratio, -1,
                               table.modes[j].label + "-" + table.modes[i].label});
        }
    return out;
}

MatchReport match_with_scale(const std::vector<Peak>& peaks, const MassTable& table,
                             double tol, double scale) {
    MatchReport rep;
    rep.global_scale = scale;
    const auto combos = combination_candidates(table);
    for (const auto& p : peaks) {
        MassAssignment a;
        a.peak_omega = p.omega;
        a.peak_ratio = p.omega / scale;
        // Direct visible-mode assignment first.
        int best = -1;
        double best_dev = tol;
        for (int i = 0; i < static_cast<int>(table.modes.size()); ++i) {
            if (!table.modes[i].visible) continue;
            const double dev = std::abs(a.peak_ratio / table.modes[i].ratio - 1.0);
            if (dev < best_dev) {
                best_dev = dev;
                best = i;
            }
        }
        if (best >= 0) {
            a.table_index = best;
            a.label = table.modes[best].label;
            a.predicted_ratio = table.modes[best].ratio;
            a.rel_deviation = best_dev;
            rep.max_deviation = std::max(rep.max_deviation, best_dev);
        } else {
            // Combination fallback, then continuum.
            double cdev = tol;
            const Candidate* hit = nullptr;
            for (const auto& c : combos) {
                if (c.ratio <= 0.0) continue;
                const double dev = std::abs(a.peak_ratio / c.ratio - 1.0);
                if (dev < cdev) {
                    cdev = dev;
                    hit = &c;
                }
            }
            if (hit) {
                a.label = hit->label;
                a.predicted_ratio = hit->ratio;
                a.rel_deviation = cdev;
            } else {
                a.label = "continuum";
                a.predicted_ratio = 0.0;
                a.rel_deviation = 0.0;
            }
        }
        rep.assignments.push_back(a);
    }
    return rep;
}

// Worst direct deviation under a trial scale; large when nothing matches.
double scale_cost(const std::vector<Peak>& peaks, const MassTable& table, double tol,
                  double scale) {
    const auto rep = match_with_scale(peaks, table, tol, scale);
    int direct = 0;
    for (const auto& a : rep.assignments)
        if (a.table_index >= 0) ++direct;
    if (direct == 0) return 1e9;
    return rep.max_deviation + 1.0 * (static_cast<int>(peaks.size()) - direct);
}

} // namespace

MatchReport mass_ratio_match(const std::vector<Peak>& peaks, const MassTable& table,
                             double tol, bool rescale_search) {
    if (peaks.empty()) throw NoPeaks("no peaks to match");
    const double anchor = peaks.front().omega;  // lightest peak = ratio 1
    if (!rescale_search) return match_with_scale(peaks, table, tol, anchor);

    // Coarse-to-fine scan of the global scale around the anchor.
    double best_scale = anchor;
    double best_cost = scale_cost(peaks, table, tol, anchor);
    for (int pass = 0; pass < 3; ++pass) {
        const double span = pass == 0 ? 0.25 : (pass == 1 ? 0.02 : 0.002);
        const int steps = 200;
        const double lo = best_scale * (1.0 - span);
        const double hi = best_scale * (1.0 + span);
        double local_best = best_scale;
        for (int i = 0; i <= steps; ++i) {
            const double s = lo + (hi - lo) * i / steps;
            const double c = scale_cost(peaks, table, tol, s);
            if (c < best_cost) {
                best_cost = c;
                local_best = s;
            }
        }
        best_scale = local_best;
    }
    if (best_cost >= 1e9) throw NoFeasibleAssignment("no scale matches any visible mode");
    return match_with_scale(peaks, table, tol, best_scale);
}

} // namespace mesonsim
