#pragma once

#include <cmath>

// Physical constants (CODATA 2018 / SI-2019 exact values) and the unit
// conventions used throughout the library.
//
// Public interfaces quote ordinary frequencies nu in Hz and rates in 1/s.
// Simulation-internal Hamiltonians are expressed in angular frequency in
// units of 2*pi * 1 GHz, so a matrix entry equals the ordinary frequency in
// GHz and entries stay O(1-15). The conjugate time unit is
// 1/(2*pi*1e9) s ~ 0.159 ns.

namespace cqed::constants {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

inline constexpr double planck_h = 6.62607015e-34;        // J s (exact)
inline constexpr double hbar = 1.054571817e-34;           // J s
inline constexpr double elementary_charge = 1.602176634e-19;  // C (exact)
inline constexpr double boltzmann_k = 1.380649e-23;       // J/K (exact)
inline constexpr double speed_of_light = 299792458.0;     // m/s (exact)
inline constexpr double vacuum_permittivity = 8.85418781280e-12;  // F/m
inline constexpr double flux_quantum = 2.06783384846e-15; // Wb, h/(2e)

}  // namespace cqed::constants

namespace cqed::units {

// Simulation angular-frequency unit: 2*pi * 1 GHz.
inline constexpr double sim_unit_rad_per_s = cqed::constants::two_pi * 1e9;

// Ordinary frequency in Hz -> angular frequency in simulation units.
// Numerically this is just the frequency in GHz.
inline constexpr double sim_from_hz(double f_hz) { return f_hz * 1e-9; }
inline constexpr double hz_from_sim(double w_sim) { return w_sim * 1e9; }

// Rate in 1/s (e.g. a Lindblad collapse rate) -> simulation units.
inline constexpr double sim_from_rate(double rate_per_s) {
  return rate_per_s / sim_unit_rad_per_s;
}

// Time in seconds -> simulation units (and back).
inline constexpr double sim_from_seconds(double t_s) {
  return t_s * sim_unit_rad_per_s;
}
inline constexpr double seconds_from_sim(double t_sim) {
  return t_sim / sim_unit_rad_per_s;
}

// Power conversions. Attenuation is a dB value (negative for loss) added
// before converting to watts.
inline double watt_from_dbm(double p_dbm) {
  return std::pow(10.0, (p_dbm - 30.0) / 10.0);
}
inline double dbm_from_watt(double p_w) {
  return 10.0 * std::log10(p_w) + 30.0;
}
inline double watt_from_dbm(double p_dbm, double attenuation_db) {
  return watt_from_dbm(p_dbm + attenuation_db);
}

}  // namespace cqed::units
