#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "cqed/constants.hpp"
#include "cqed/errors.hpp"

// Analytic rectangular-cavity mode frequencies and transverse field weights
// at the qubit position. The desk-scale counterpart of a finite-element
// field solve: good to a few percent, which is all the parameter reports
// need.

namespace cqed {

struct CavityGeometry {
  double lx_m = 0.0, ly_m = 0.0, lz_m = 0.0;
  double qubit_x_m = 0.0, qubit_y_m = 0.0;  // chip position in the x-y plane

  static CavityGeometry centered(double lx_m, double ly_m, double lz_m) {
    return {lx_m, ly_m, lz_m, 0.5 * lx_m, 0.5 * ly_m};
  }

  void validate() const {
    if (lx_m <= 0.0 || ly_m <= 0.0 || lz_m <= 0.0)
      throw ModelError("cavity geometry: dimensions must be > 0");
    if (qubit_x_m <= 0.0 || qubit_x_m >= lx_m || qubit_y_m <= 0.0 || qubit_y_m >= ly_m)
      throw ModelError("cavity geometry: qubit position must lie inside the cross-section");
  }
};

// sin(pi * t) with exact zeros at integer t. Plain std::sin(pi * t) returns
// ~1e-16 at t = 1, which breaks the exact-node checks.
inline double sin_pi(double t) {
  const double n = std::round(t);
  const double r = t - n;
  const double s = std::sin(constants::pi * r);
  return (std::llround(n) % 2 == 0) ? s : -s;
}

// f_mnp = (c/2) sqrt((m/Lx)^2 + (n/Ly)^2 + (p/Lz)^2). Index validity for a
// z-directed mode set: TM needs m,n >= 1; TE needs p >= 1 and m+n >= 1.
// We only report TM_mn0 modes at the CLI level (all observed modes are of
// that family), but the dispersion itself is generic.
inline double mode_frequency(const CavityGeometry& geom, int m, int n, int p) {
  geom.validate();
  if (m < 0 || n < 0 || p < 0) throw ModelError("mode_frequency: indices must be >= 0");
  if (m + n + p == 0) throw ModelError("mode_frequency: indices must not all be zero");
  const bool tm_valid = (m >= 1 && n >= 1);
  const bool te_valid = (p >= 1 && (m + n) >= 1);
  if (!tm_valid && !te_valid)
    throw ModelError("mode_frequency: no TM/TE mode with these indices");
  const double kx = m / geom.lx_m, ky = n / geom.ly_m, kz = p / geom.lz_m;
  return 0.5 * constants::speed_of_light * std::sqrt(kx * kx + ky * ky + kz * kz);
}

// Normalized transverse profile sin(m pi x/Lx) sin(n pi y/Ly) at the given
// position; the relative dipole coupling of a TM_mn0 mode scales with its
// magnitude. Zero on the walls and at every mode node, exactly.
inline double field_weight(const CavityGeometry& geom, int m, int n, double x_m, double y_m) {
  geom.validate();
  if (x_m < 0.0 || x_m > geom.lx_m || y_m < 0.0 || y_m > geom.ly_m)
    throw ModelError("field_weight: position outside the cavity cross-section");
  return sin_pi(m * x_m / geom.lx_m) * sin_pi(n * y_m / geom.ly_m);
}

inline double field_weight(const CavityGeometry& geom, int m, int n) {
  return field_weight(geom, m, n, geom.qubit_x_m, geom.qubit_y_m);
}

struct ModeSummary {
  std::string label;
  int m = 0, n = 0;
  double frequency_hz = 0.0;
  double field_weight = 0.0;
};

// The TM_mn0 family up to the given index bounds, frequency-ascending.
inline std::vector<ModeSummary> tm_mode_table(const CavityGeometry& geom, int max_m, int max_n) {
  std::vector<ModeSummary> out;
  for (int m = 1; m <= max_m; ++m)
    for (int n = 1; n <= max_n; ++n)
      out.push_back({"tm" + std::to_string(m) + std::to_string(n) + "0", m, n,
                     mode_frequency(geom, m, n, 0), field_weight(geom, m, n)});
  std::sort(out.begin(), out.end(),
            [](const ModeSummary& a, const ModeSummary& b) { return a.frequency_hz < b.frequency_hz; });
  return out;
}

}  // namespace cqed
