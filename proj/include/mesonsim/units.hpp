#pragma once

#include <cmath>

// Unit conventions:
//   - Model layer: hbar = 1, energies in units of the nearest-neighbor
//     coupling J, times in tJ.
//   - Rydberg layer: angular frequencies in rad/us, distances in um.
// Conversion between the two happens only in the Rydberg mapping.

namespace mesonsim::units {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

// Van der Waals coefficient for 87Rb |75S_1/2>, C6/2pi = 1948 GHz um^6,
// expressed in rad/us * um^6: 2pi * 1948e3 MHz um^6.
inline constexpr double c6_rb87_rad_per_us_um6 = two_pi * 1948.0e3;

// Minimum interatomic distance the hardware can realize (um).
inline constexpr double default_hardware_floor_um = 4.0;

// MHz (ordinary frequency) -> rad/us.
inline constexpr double mhz_to_rad_per_us(double f_mhz) { return two_pi * f_mhz; }

} // namespace mesonsim::units
