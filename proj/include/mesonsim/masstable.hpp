#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mesonsim/spectroscopy.hpp"

namespace mesonsim {

struct MassMode {
    double ratio = 0.0;  // m_i / m_1, ascending, first = 1
    bool visible = true; // carries weight in S(k=0, omega)
    std::string label;
};

// Ordered universal mass ratios for a named emergent symmetry.
struct MassTable {
    std::string symmetry;  // "E8" or "D8(1)"
    std::vector<MassMode> modes;

    std::vector<double> visible_ratios() const;
};

// Closed-form E8 ratios (cosine expressions of the integrable theory).
MassTable e8_mass_table();

// D8(1) ratios from the affine Toda closed forms: chain modes
// 2 sin(a pi / 14), a = 1..6, plus the degenerate spinor doublet, all
// normalized to the lightest mode. Visibility flags mark the subset with
// weight in S(k~0, omega).
MassTable d8_1_mass_table();

// Plain-text format: `# symmetry=<name>` header then `ratio visibility label`
// lines. Comment lines (#) are preserved provenance in the shipped files.
MassTable read_mass_table(std::istream& is);
MassTable load_mass_table_file(const std::string& path);
void write_mass_table(std::ostream& os, const MassTable& table);

// Greedy nearest-ratio assignment of peaks to visible table entries.
struct MassAssignment {
    double peak_omega = 0.0;
    double peak_ratio = 0.0;      // omega / global_scale
    int table_index = -1;         // -1: combination or continuum candidate
    std::string label;            // assigned mode or combination, e.g. "m2-m1"
    double predicted_ratio = 0.0;
    double rel_deviation = 0.0;
};

struct MatchReport {
    std::vector<MassAssignment> assignments;
    double global_scale = 1.0;  // omega units per table unit
    double max_deviation = 0.0; // over direct (non-combination) assignments
};

// tol: maximum relative deviation for a direct assignment. Unmatched peaks
// fall back to pairwise sums/differences of table masses (combination
// candidates) and otherwise get flagged as continuum. With rescale_search,
// the global scale minimizing the worst direct deviation is chosen;
// otherwise the first peak anchors the scale.
MatchReport mass_ratio_match(const std::vector<Peak>& peaks, const MassTable& table,
                             double tol, bool rescale_search = false);

} // namespace mesonsim
