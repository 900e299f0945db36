#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "cqed/constants.hpp"
#include "cqed/device.hpp"
#include "cqed/errors.hpp"

// Semiclassical steady state of the driven Kerr (Duffing) cavity. The
// intracavity photon number n solves the cubic
//
//   [(delta - K n)^2 + (gamma_tot/2)^2] n = gamma_1 P / (hbar omega_r)
//
// with delta = omega_d - omega_r (angular). In the linear limit on
// resonance this reduces to n = 4 gamma_1 P / (hbar omega_r gamma_tot^2),
// the steady occupancy of a driven two-port cavity. Up to three real
// branches exist; the middle one fails the slope criterion
// d(drive)/dn > 0 and is unstable.

namespace cqed {

struct DriveTone {
  double frequency_hz = 0.0;
  double power_dbm = 0.0;      // quoted at the instrument
  double attenuation_db = 0.0; // line attenuation (<= 0) applied before the port

  double power_at_port_w() const { return units::watt_from_dbm(power_dbm + attenuation_db); }

  void validate() const {
    if (frequency_hz <= 0.0) throw ModelError("drive tone: frequency must be > 0");
    if (attenuation_db > 0.0)
      throw ModelError("drive tone: attenuation must be expressed as a number <= 0 dB");
  }
};

// Drive strength D = gamma_1 P / (hbar omega_r) in (rad/s)^2.
inline double drive_strength(const CavityMode& mode, double power_at_port_w) {
  return mode.port1_rate * power_at_port_w /
         (constants::hbar * constants::two_pi * mode.frequency_hz);
}

struct DuffingRoots {
  std::vector<double> photons;  // ascending
  std::vector<bool> stable;     // slope criterion per root
};

namespace detail {

// Real roots of x^3 + a x^2 + b x + c, ascending.
inline std::vector<double> cubic_real_roots(double a, double b, double c) {
  std::vector<double> roots;
  const double q = (a * a - 3.0 * b) / 9.0;
  const double r = (2.0 * a * a * a - 9.0 * a * b + 27.0 * c) / 54.0;
  const double q3 = q * q * q;
  if (r * r < q3) {
    const double theta = std::acos(std::clamp(r / std::sqrt(q3), -1.0, 1.0));
    const double f = -2.0 * std::sqrt(q);
    roots.push_back(f * std::cos(theta / 3.0) - a / 3.0);
    roots.push_back(f * std::cos((theta + 2.0 * constants::pi) / 3.0) - a / 3.0);
    roots.push_back(f * std::cos((theta - 2.0 * constants::pi) / 3.0) - a / 3.0);
  } else {
    const double s = -std::copysign(std::cbrt(std::abs(r) + std::sqrt(r * r - q3)), r);
    const double t = (s != 0.0) ? q / s : 0.0;
    roots.push_back(s + t - a / 3.0);
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

}  // namespace detail

// All physical steady-state photon numbers at one detuning. delta and the
// Kerr coefficient are angular (rad/s); rates in 1/s; D in (rad/s)^2.
inline DuffingRoots steady_state_photons(double delta_rad, double kerr_rad, double gamma_tot,
                                         double drive_d) {
  if (gamma_tot <= 0.0) throw ModelError("steady_state_photons: gamma_tot must be > 0");
  const double half_width_sq = 0.25 * gamma_tot * gamma_tot;

  auto drive_of = [&](double n) {
    const double shifted = delta_rad - kerr_rad * n;
    return (shifted * shifted + half_width_sq) * n;
  };
  auto slope_of = [&](double n) {
    return 3.0 * kerr_rad * kerr_rad * n * n - 4.0 * delta_rad * kerr_rad * n +
           delta_rad * delta_rad + half_width_sq;
  };

  std::vector<double> candidates;
  if (kerr_rad == 0.0) {
    candidates.push_back(drive_d / (delta_rad * delta_rad + half_width_sq));
  } else {
    const double k2 = kerr_rad * kerr_rad;
    candidates = detail::cubic_real_roots(-2.0 * delta_rad / kerr_rad,
                                          (delta_rad * delta_rad + half_width_sq) / k2,
                                          -drive_d / k2);
  }

  DuffingRoots out;
  const double scale = std::max(drive_d, half_width_sq);  // residual normalization
  for (double n : candidates) {
    if (n < 0.0 && n > -1e-12 * std::max(1.0, std::abs(n))) n = 0.0;
    if (n < 0.0) continue;
    // Newton polish; the closed form can lose digits when roots nearly merge.
    for (int it = 0; it < 3; ++it) {
      const double f = drive_of(n) - drive_d;
      const double df = slope_of(n);
      if (df == 0.0) break;
      const double step = f / df;
      if (!std::isfinite(step)) break;
      n -= step;
    }
    if (n < 0.0) continue;
    if (std::abs(drive_of(n) - drive_d) > 1e-9 * scale) continue;
    // Drop duplicates from the polish converging to the same root.
    bool dup = false;
    for (double m : out.photons)
      if (std::abs(m - n) <= 1e-9 * std::max(1.0, std::max(m, n))) dup = true;
    if (dup) continue;
    out.photons.push_back(n);
  }
  std::sort(out.photons.begin(), out.photons.end());
  for (double n : out.photons) out.stable.push_back(slope_of(n) >= 0.0);
  return out;
}

inline DuffingRoots steady_state_roots(const CavityMode& mode, double kerr_eff_hz,
                                       const DriveTone& drive) {
  drive.validate();
  const double delta = constants::two_pi * (drive.frequency_hz - mode.frequency_hz);
  return steady_state_photons(delta, constants::two_pi * kerr_eff_hz, mode.total_rate(),
                              drive_strength(mode, drive.power_at_port_w()));
}

// Two-port transmission at a steady-state photon number.
inline std::complex<double> transmission_s21(const CavityMode& mode, double delta_rad,
                                             double kerr_rad, double photons) {
  const std::complex<double> denom(0.5 * mode.total_rate(), -(delta_rad - kerr_rad * photons));
  return std::sqrt(mode.port1_rate * mode.port2_rate) / denom;
}

enum class SweepDirection { Ascending, Descending };

struct SweepPoint {
  double frequency_hz = 0.0;
  std::complex<double> s21;
  double photons = 0.0;
  int branch = 0;  // index of the occupied root among the stable ones
};

// Frequency sweep following the stable branch by continuation: at each grid
// point the occupied root is the stable root closest to the previous
// amplitude, so jumps happen exactly at fold points.
inline std::vector<SweepPoint> transmission_sweep(const CavityMode& mode, double kerr_eff_hz,
                                                  double power_dbm, double attenuation_db,
                                                  const std::vector<double>& frequency_grid_hz,
                                                  SweepDirection direction) {
  for (std::size_t i = 1; i < frequency_grid_hz.size(); ++i)
    if (frequency_grid_hz[i] <= frequency_grid_hz[i - 1])
      throw ModelError("transmission_sweep: frequency grid must be strictly ascending");

  const double kerr_rad = constants::two_pi * kerr_eff_hz;
  const DriveTone probe{mode.frequency_hz, power_dbm, attenuation_db};
  probe.validate();
  const double drive_d = drive_strength(mode, probe.power_at_port_w());

  std::vector<SweepPoint> out(frequency_grid_hz.size());
  double previous = 0.0;
  bool first = true;
  const std::size_t count = frequency_grid_hz.size();
  for (std::size_t step = 0; step < count; ++step) {
    const std::size_t i = (direction == SweepDirection::Ascending) ? step : count - 1 - step;
    const double delta = constants::two_pi * (frequency_grid_hz[i] - mode.frequency_hz);
    const DuffingRoots roots = steady_state_photons(delta, kerr_rad, mode.total_rate(), drive_d);

    int best = -1, stable_index = 0, best_stable_index = 0;
    double best_dist = 0.0;
    for (std::size_t r = 0; r < roots.photons.size(); ++r) {
      if (!roots.stable[r]) continue;
      const double dist = first ? roots.photons[r] : std::abs(roots.photons[r] - previous);
      if (best < 0 || dist < best_dist) {
        best = int(r);
        best_dist = dist;
        best_stable_index = stable_index;
      }
      ++stable_index;
    }
    if (best < 0) throw NumericsError("transmission_sweep: no stable steady state found");

    const double n = roots.photons[best];
    out[i] = {frequency_grid_hz[i], transmission_s21(mode, delta, kerr_rad, n), n,
              best_stable_index};
    previous = n;
    first = false;
  }
  return out;
}

struct HysteresisMap {
  std::vector<double> power_dbm;
  std::vector<double> frequency_hz;
  Eigen::MatrixXd difference;  // |S21|_ascending - |S21|_descending, power x frequency
};

inline HysteresisMap hysteresis_map(const CavityMode& mode, double kerr_eff_hz,
                                    const std::vector<double>& power_grid_dbm,
                                    double attenuation_db,
                                    const std::vector<double>& frequency_grid_hz) {
  HysteresisMap map;
  map.power_dbm = power_grid_dbm;
  map.frequency_hz = frequency_grid_hz;
  map.difference.resize(long(power_grid_dbm.size()), long(frequency_grid_hz.size()));
  for (std::size_t p = 0; p < power_grid_dbm.size(); ++p) {
    const auto up = transmission_sweep(mode, kerr_eff_hz, power_grid_dbm[p], attenuation_db,
                                       frequency_grid_hz, SweepDirection::Ascending);
    const auto down = transmission_sweep(mode, kerr_eff_hz, power_grid_dbm[p], attenuation_db,
                                         frequency_grid_hz, SweepDirection::Descending);
    for (std::size_t f = 0; f < frequency_grid_hz.size(); ++f)
      map.difference(long(p), long(f)) = std::abs(up[f].s21) - std::abs(down[f].s21);
  }
  return map;
}

// Detuning window (Hz, relative to the mode frequency) inside which the
// response is bistable, found by scanning the root count and refining the
// edges by bisection. Empty below the bistability threshold.
inline std::optional<std::pair<double, double>> bistable_window(
    const CavityMode& mode, double kerr_eff_hz, double power_dbm, double attenuation_db,
    double detuning_min_hz, double detuning_max_hz, int scan_points = 2001) {
  const double kerr_rad = constants::two_pi * kerr_eff_hz;
  const DriveTone probe{mode.frequency_hz, power_dbm, attenuation_db};
  const double drive_d = drive_strength(mode, probe.power_at_port_w());

  auto multivalued = [&](double detuning_hz) {
    const DuffingRoots r = steady_state_photons(constants::two_pi * detuning_hz, kerr_rad,
                                                mode.total_rate(), drive_d);
    int stable = 0;
    for (bool s : r.stable) stable += s ? 1 : 0;
    return stable >= 2;
  };
  auto refine = [&](double lo, double hi, bool lo_state) {
    for (int i = 0; i < 60; ++i) {
      const double mid = 0.5 * (lo + hi);
      if (multivalued(mid) == lo_state)
        lo = mid;
      else
        hi = mid;
    }
    return 0.5 * (lo + hi);
  };

  const double step = (detuning_max_hz - detuning_min_hz) / (scan_points - 1);
  double window_lo = 0.0, window_hi = 0.0;
  bool inside = false, found = false;
  bool prev = multivalued(detuning_min_hz);
  if (prev) {
    window_lo = detuning_min_hz;
    inside = true;
    found = true;
  }
  for (int i = 1; i < scan_points; ++i) {
    const double x = detuning_min_hz + i * step;
    const bool now = multivalued(x);
    if (now != prev) {
      const double edge = refine(x - step, x, prev);
      if (!inside) {
        window_lo = edge;
        inside = true;
        found = true;
      } else {
        window_hi = edge;
        inside = false;
      }
    }
    prev = now;
  }
  if (inside) window_hi = detuning_max_hz;
  if (!found) return std::nullopt;
  return std::make_pair(window_lo, window_hi);
}

}  // namespace cqed
