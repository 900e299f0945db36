#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "cqed/constants.hpp"
#include "cqed/errors.hpp"

// Device parameters and the closed-form circuit-QED relations between them:
// junction energies, Kerr coefficients, dressed frequencies, critical input
// power, zero-point phase and the pump-induced effective-Kerr sign flip.
//
// Detuning conventions (kept as distinct named quantities to avoid sign
// bugs): the dispersive formulas use Delta = omega_q - omega_r, the critical
// power estimate uses Delta = omega_r - omega_q (only Delta^2 enters there),
// and driven-frame formulas use Delta = omega_d - omega_r.

namespace cqed {

struct JunctionParameters {
  double critical_current_a = 0.0;   // A
  double capacitance_f = 0.0;        // F (geometric, shunting the JJ)
  double area_m2 = 0.0;              // overlap area
  double barrier_thickness_m = 0.0;  // oxide thickness
  double relative_permittivity = 0.0;

  void validate() const {
    if (critical_current_a <= 0.0) throw ModelError("junction: critical current must be > 0");
    if (capacitance_f <= 0.0) throw ModelError("junction: capacitance must be > 0");
  }
};

struct QubitParameters {
  double frequency_hz = 0.0;       // nu_q
  double anharmonicity_hz = 0.0;   // alpha/2pi, negative for a transmon
  double relaxation_rate = 0.0;    // Gamma_q = 1/T1, 1/s
  double dephasing_rate = 0.0;     // Gamma_phi, 1/s

  void validate() const {
    if (frequency_hz <= 0.0) throw ModelError("qubit: frequency must be > 0");
    if (relaxation_rate < 0.0 || dephasing_rate < 0.0)
      throw ModelError("qubit: rates must be >= 0");
  }
};

struct CavityMode {
  std::string label;                  // e.g. "tm110"
  double frequency_hz = 0.0;          // nu_r
  double port1_rate = 0.0;            // gamma_1, 1/s
  double port2_rate = 0.0;            // gamma_2, 1/s
  double internal_rate = 0.0;         // gamma_0, 1/s
  std::optional<double> coupling_hz;  // dipole coupling g/2pi
  double self_kerr_hz = 0.0;          // K_a/2pi (derived, may be overridden)

  double total_rate() const { return port1_rate + port2_rate + internal_rate; }

  void validate() const {
    if (frequency_hz <= 0.0) throw ModelError("mode " + label + ": frequency must be > 0");
    if (total_rate() <= 0.0) throw ModelError("mode " + label + ": total linewidth must be > 0");
  }
};

struct SystemModel {
  QubitParameters qubit;
  std::vector<CavityMode> modes;
  std::optional<JunctionParameters> junction;

  const CavityMode& mode(std::size_t index) const {
    if (index >= modes.size()) throw ModelError("mode index out of range");
    return modes[index];
  }

  const CavityMode& mode(const std::string& label) const {
    for (const auto& m : modes)
      if (m.label == label) return m;
    throw ModelError("no cavity mode labelled '" + label + "'");
  }

  // Dispersive detuning Delta/2pi = nu_q - nu_r for the given mode.
  double qubit_mode_detuning_hz(std::size_t index) const {
    return qubit.frequency_hz - mode(index).frequency_hz;
  }

  void validate() const {
    qubit.validate();
    for (std::size_t i = 0; i < modes.size(); ++i) {
      modes[i].validate();
      for (std::size_t j = i + 1; j < modes.size(); ++j)
        if (modes[i].label == modes[j].label)
          throw ModelError("duplicate mode label '" + modes[i].label + "'");
    }
  }
};

// --- junction energies ------------------------------------------------

struct Energy {
  double joules = 0.0;
  double hz = 0.0;  // E/h
};

// E_C = e^2 / (2C)
inline Energy charging_energy(double capacitance_f) {
  if (capacitance_f <= 0.0) throw ModelError("charging_energy: C must be > 0");
  const double e = constants::elementary_charge;
  const double ec = e * e / (2.0 * capacitance_f);
  return {ec, ec / constants::planck_h};
}

// E_J = phi0 * I_c / (2 pi)
inline Energy josephson_energy(double critical_current_a) {
  if (critical_current_a <= 0.0) throw ModelError("josephson_energy: I_c must be > 0");
  const double ej = constants::flux_quantum * critical_current_a / constants::two_pi;
  return {ej, ej / constants::planck_h};
}

// L_J = phi0 / (2 pi I_c)
inline double junction_inductance(double critical_current_a) {
  if (critical_current_a <= 0.0) throw ModelError("junction_inductance: I_c must be > 0");
  return constants::flux_quantum / (constants::two_pi * critical_current_a);
}

// Parallel-plate estimate C = eps0 * eps_r * A / d.
inline double geometric_capacitance(double area_m2, double thickness_m,
                                    double relative_permittivity) {
  if (area_m2 <= 0.0 || thickness_m <= 0.0 || relative_permittivity <= 0.0)
    throw ModelError("geometric_capacitance: arguments must be > 0");
  return constants::vacuum_permittivity * relative_permittivity * area_m2 / thickness_m;
}

// nu_q = (sqrt(8 E_J E_C) - E_C) / h, valid deep in the transmon regime.
inline double transmon_frequency(const Energy& ej, const Energy& ec) {
  if (ej.joules <= ec.joules || ec.joules <= 0.0)
    throw ModelError("transmon_frequency: outside transmon regime (need E_J > E_C > 0)");
  return (std::sqrt(8.0 * ej.joules * ec.joules) - ec.joules) / constants::planck_h;
}

// Inverse solve: the critical current that gives the observed qubit
// frequency for a known capacitance. transmon_frequency is monotone in I_c,
// so plain bisection on a bracket around the algebraic estimate suffices.
inline double critical_current_from_frequency(double frequency_hz, double capacitance_f) {
  if (frequency_hz <= 0.0) throw ModelError("critical_current_from_frequency: nu_q must be > 0");
  const Energy ec = charging_energy(capacitance_f);
  // Algebraic inversion of nu_q = (sqrt(8 E_J E_C) - E_C)/h as a seed.
  const double ej_seed =
      std::pow(frequency_hz * constants::planck_h + ec.joules, 2) / (8.0 * ec.joules);
  const double ic_seed = ej_seed * constants::two_pi / constants::flux_quantum;
  double lo = 0.5 * ic_seed, hi = 2.0 * ic_seed;
  auto freq_at = [&](double ic) {
    return transmon_frequency(josephson_energy(ic), ec);
  };
  while (freq_at(lo) > frequency_hz) lo *= 0.5;
  while (freq_at(hi) < frequency_hz) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (freq_at(mid) < frequency_hz)
      lo = mid;
    else
      hi = mid;
    if ((hi - lo) / hi < 1e-15) break;
  }
  return 0.5 * (lo + hi);
}

// phi_ZPF = (2 E_C / E_J)^(1/4)
inline double zero_point_phase(const Energy& ec, const Energy& ej) {
  if (ec.joules <= 0.0 || ej.joules <= 0.0)
    throw ModelError("zero_point_phase: energies must be > 0");
  return std::pow(2.0 * ec.joules / ej.joules, 0.25);
}

// --- Kerr coefficients and dressed frequencies ------------------------
//
// All inputs and outputs are ordinary frequencies in Hz; the 2pi factors
// cancel in every ratio below.

struct KerrCoefficients {
  double cavity_self_kerr_hz = 0.0;  // K_a/2pi = alpha (g/Delta)^4
  double qubit_self_kerr_hz = 0.0;   // K_b/2pi = alpha
  double cross_kerr_hz = 0.0;        // chi/2pi = -2 g^2 alpha / (Delta (Delta - alpha))
};

inline void check_dispersive(double detuning_hz, double anharmonicity_hz) {
  if (detuning_hz == 0.0 || detuning_hz == anharmonicity_hz)
    throw ModelError("dispersive breakdown: need Delta != 0 and Delta != alpha");
}

inline KerrCoefficients kerr_coefficients(double anharmonicity_hz, double coupling_hz,
                                          double detuning_hz) {
  check_dispersive(detuning_hz, anharmonicity_hz);
  const double ratio = coupling_hz / detuning_hz;
  KerrCoefficients k;
  k.cavity_self_kerr_hz = anharmonicity_hz * ratio * ratio * ratio * ratio;
  k.qubit_self_kerr_hz = anharmonicity_hz;
  k.cross_kerr_hz = -2.0 * coupling_hz * coupling_hz * anharmonicity_hz /
                    (detuning_hz * (detuning_hz - anharmonicity_hz));
  return k;
}

inline KerrCoefficients kerr_coefficients(const SystemModel& system, std::size_t mode_index) {
  const CavityMode& m = system.mode(mode_index);
  if (!m.coupling_hz)
    throw ModelError("mode " + m.label + ": no dipole coupling g in the model");
  return kerr_coefficients(system.qubit.anharmonicity_hz, *m.coupling_hz,
                           system.qubit_mode_detuning_hz(mode_index));
}

struct DressedFrequencies {
  double cavity_hz = 0.0;  // nu_r' = nu_r - [4 g^2/(Delta(Delta-alpha))] (alpha/2) n_b
  double qubit_hz = 0.0;   // nu_q' = nu_q + (alpha/2) n_b
};

// Slope of the dressed-cavity vs dressed-qubit frequency relation,
// d nu_r' / d nu_q' = -4 g^2 / (Delta (Delta - alpha)).
inline double dressed_slope(double coupling_hz, double detuning_hz, double anharmonicity_hz) {
  check_dispersive(detuning_hz, anharmonicity_hz);
  return -4.0 * coupling_hz * coupling_hz /
         (detuning_hz * (detuning_hz - anharmonicity_hz));
}

inline DressedFrequencies dressed_frequencies(const SystemModel& system,
                                              std::size_t mode_index,
                                              double mean_qubit_excitation) {
  if (mean_qubit_excitation < 0.0)
    throw ModelError("dressed_frequencies: n_b must be >= 0");
  const CavityMode& m = system.mode(mode_index);
  if (!m.coupling_hz)
    throw ModelError("mode " + m.label + ": no dipole coupling g in the model");
  const double alpha = system.qubit.anharmonicity_hz;
  const double delta = system.qubit_mode_detuning_hz(mode_index);
  const double slope = dressed_slope(*m.coupling_hz, delta, alpha);
  const double qubit_shift = 0.5 * alpha * mean_qubit_excitation;
  return {m.frequency_hz + slope * qubit_shift, system.qubit.frequency_hz + qubit_shift};
}

// --- critical input power ---------------------------------------------
//
// P*_in = (phi0 I_c / 2pi) (omega_r/omega_q) (Delta/g)^2 gamma, the drive
// power at which the dispersively transferred excitation reaches the
// Josephson energy and the junction switches to the normal state. Here
// Delta = omega_r - omega_q (only its square enters) and gamma is the
// total cavity energy-decay rate in 1/s.

struct CriticalPower {
  double watts = 0.0;
  double dbm = 0.0;
};

inline CriticalPower critical_input_power(double critical_current_a, double cavity_hz,
                                          double qubit_hz, double coupling_hz,
                                          double cavity_rate) {
  if (critical_current_a <= 0.0 || cavity_hz <= 0.0 || qubit_hz <= 0.0 || cavity_rate <= 0.0)
    throw ModelError("critical_input_power: arguments must be > 0");
  if (coupling_hz == 0.0)
    throw ModelError("critical_input_power: undefined for g = 0");
  const double detuning_hz = cavity_hz - qubit_hz;
  if (detuning_hz == 0.0)
    throw ModelError("critical_input_power: undefined for Delta = 0");
  const double ratio = detuning_hz / coupling_hz;
  const double watts = josephson_energy(critical_current_a).joules *
                       (cavity_hz / qubit_hz) * ratio * ratio * cavity_rate;
  return {watts, units::dbm_from_watt(watts)};
}

// --- effective Kerr under qubit pumping ---------------------------------
//
// K_eff = K_a (1 - <phi_b^2>/2). The sign flips once the pumped qubit
// phase variance exceeds 2: a softening cavity turns hardening.
inline double effective_kerr(double cavity_self_kerr_hz, double phi_b_squared) {
  if (phi_b_squared < 0.0) throw ModelError("effective_kerr: <phi_b^2> must be >= 0");
  return cavity_self_kerr_hz * (1.0 - 0.5 * phi_b_squared);
}

}  // namespace cqed
