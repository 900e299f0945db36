#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cqed/constants.hpp"
#include "cqed/errors.hpp"
#include "cqed/fit.hpp"
#include "cqed/fock.hpp"
#include "cqed/lindblad.hpp"

// Virtual pulse experiments on the driven multilevel qubit: Rabi vs pulse
// length, Rabi frequency vs drive amplitude, and T1 relaxation after a
// calibrated pi pulse. All experiments run in the frame rotating at the
// drive and assume a resonant drive unless a detuning is given.

namespace cqed {

// Parameters of the driven-qubit simulation (drive routed through a far
// detuned cavity mode, displaced-frame picture).
struct DrivenQubitModel {
  double coupling_hz = 0.0;       // g/2pi for the driving mode
  double anharmonicity_hz = 0.0;  // K_b/2pi of the qubit
  double relaxation_rate = 0.0;   // Gamma_q, 1/s
  double dephasing_rate = 0.0;    // Gamma_phi, 1/s
  double cavity_hz = 0.0;         // nu_r of the driving mode
  double qubit_hz = 0.0;          // nu_q = drive frequency (resonant drive)
  double port1_rate = 0.0;        // gamma_1, 1/s
  double total_rate = 0.0;        // gamma_tot, 1/s
  double attenuation_db = 0.0;    // line attenuation to the port
  int dim = 6;                    // qubit truncation for drive experiments
};

// Effective drive photon number n_eff = (gamma_1/|Delta|) *
// sqrt(4 gamma_1 P_in / (hbar omega_r gamma_tot^2)) with Delta = omega_d -
// omega_r. Amplitude-like despite the name; the Rabi frequency is
// 2 g sqrt(n_eff).
inline double effective_photon_number(double input_power_w, double port1_rate,
                                      double total_rate, double drive_cavity_detuning_hz,
                                      double cavity_hz) {
  if (drive_cavity_detuning_hz == 0.0)
    throw ModelError("effective_photon_number: resonant drive (Delta = 0) is outside this formula");
  if (input_power_w < 0.0) throw ModelError("effective_photon_number: power must be >= 0");
  const double cavity_amp_sq = (input_power_w / (constants::hbar * constants::two_pi * cavity_hz)) *
                               4.0 * port1_rate / (total_rate * total_rate);
  return port1_rate / (constants::two_pi * std::abs(drive_cavity_detuning_hz)) *
         std::sqrt(cavity_amp_sq);
}

inline double effective_photon_number(const DrivenQubitModel& m, double power_dbm) {
  return effective_photon_number(units::watt_from_dbm(power_dbm, m.attenuation_db),
                                 m.port1_rate, m.total_rate, m.qubit_hz - m.cavity_hz,
                                 m.cavity_hz);
}

struct RabiFrequency {
  double bare_hz = 0.0;    // nu_Rabi = 2 g sqrt(n_eff)
  double damped_hz = 0.0;  // sqrt(nu_Rabi^2 - (Gamma_q / (4*2pi))^2)
  bool overdamped = false;
};

inline RabiFrequency rabi_frequency_analytic(double coupling_hz, double n_eff,
                                             double relaxation_rate) {
  if (n_eff < 0.0) throw ModelError("rabi_frequency_analytic: n_eff must be >= 0");
  RabiFrequency out;
  out.bare_hz = 2.0 * coupling_hz * std::sqrt(n_eff);
  const double damping_hz = relaxation_rate / (4.0 * constants::two_pi);
  const double arg = out.bare_hz * out.bare_hz - damping_hz * damping_hz;
  if (arg <= 0.0) {
    out.damped_hz = 0.0;
    out.overdamped = true;
  } else {
    out.damped_hz = std::sqrt(arg);
  }
  return out;
}

// Alternative power-form route nu_Rabi = (2g/2pi) sqrt(gamma_1 P /
// (Delta^2 hbar omega_d)). Relative to the displaced-frame coefficient
// g * n_eff it carries an extra 2 gamma_1 / gamma_tot; the two coincide
// only for a critically coupled input port.
inline double rabi_frequency_from_power(double coupling_hz, double input_power_w,
                                        double port1_rate, double drive_cavity_detuning_hz,
                                        double drive_hz) {
  if (drive_cavity_detuning_hz == 0.0)
    throw ModelError("rabi_frequency_from_power: Delta = 0 is outside this formula");
  const double delta_rad = constants::two_pi * drive_cavity_detuning_hz;
  return 2.0 * coupling_hz *
         std::sqrt(port1_rate * input_power_w /
                   (delta_rad * delta_rad * constants::hbar * constants::two_pi * drive_hz));
}

// Ground-state probability versus pulse length at fixed drive amplitude.
inline Trace rabi_trace(const DrivenQubitModel& m, double n_eff,
                        const std::vector<double>& durations_s,
                        double drive_detuning_hz = 0.0) {
  LindbladSpec spec;
  spec.hamiltonian =
      hamiltonian_driven_qubit(m.anharmonicity_hz, m.coupling_hz, n_eff, m.dim, drive_detuning_hz);
  spec.collapses = qubit_collapses(m.dim, m.relaxation_rate, m.dephasing_rate);
  spec.initial_state = ComplexMatrix::Zero(m.dim, m.dim);
  spec.initial_state(0, 0) = 1.0;
  spec.times_s = durations_s;
  const EvolutionResult evo = lindblad_evolve(spec);

  Trace out;
  out.x = evo.times_s;
  out.y = evo.population(0);
  return out;
}

struct RabiExperimentResult {
  Trace ground_probability;  // P_g vs pulse length
  FitResult fit;             // damped-sinusoid fit of the trace
  double n_eff = 0.0;
  double extracted_frequency_hz = 0.0;
};

// The qubit needs at least three levels to show leakage; dim is taken from
// the model (default 6).
inline RabiExperimentResult rabi_experiment(const DrivenQubitModel& m, double power_dbm,
                                            const std::vector<double>& durations_s) {
  if (m.dim < 3) throw ModelError("rabi_experiment: qubit dimension must be >= 3");
  RabiExperimentResult out;
  out.n_eff = effective_photon_number(m, power_dbm);
  out.ground_probability = rabi_trace(m, out.n_eff, durations_s);
  out.fit = fit_damped_sinusoid(out.ground_probability);
  out.extracted_frequency_hz = out.fit.value("frequency");
  return out;
}

struct RabiSweepPoint {
  double sqrt_n_eff = 0.0;
  double frequency_hz = 0.0;   // extracted from the simulation
  double analytic_hz = 0.0;    // 2 g sqrt(n_eff)
  double damped_hz = 0.0;      // loss-shifted analytic value
  bool fit_converged = false;
};

// Rabi frequency versus drive amplitude: one Lindblad run per grid point,
// simulated over a few expected periods and fitted. A weakly anharmonic
// ladder responds below the two-level line once the drive competes with
// |K_b|, so the spectral seed is searched in a band around the expected
// value rather than over the whole record.
inline std::vector<RabiSweepPoint> rabi_vs_amplitude(const DrivenQubitModel& m,
                                                     const std::vector<double>& n_eff_grid,
                                                     int points_per_trace = 601,
                                                     double periods = 3.5) {
  std::vector<RabiSweepPoint> out;
  out.reserve(n_eff_grid.size());
  for (double n_eff : n_eff_grid) {
    if (n_eff <= 0.0) throw ModelError("rabi_vs_amplitude: n_eff grid must be positive");
    const RabiFrequency analytic =
        rabi_frequency_analytic(m.coupling_hz, n_eff, m.relaxation_rate);
    const double t_max = periods / (0.6 * analytic.bare_hz);
    std::vector<double> grid(points_per_trace);
    for (int i = 0; i < points_per_trace; ++i)
      grid[i] = t_max * double(i) / (points_per_trace - 1);

    const Trace trace = rabi_trace(m, n_eff, grid);
    const FitResult fit =
        fit_damped_sinusoid(trace, 0.2 * analytic.bare_hz, 1.5 * analytic.bare_hz);
    out.push_back({std::sqrt(n_eff), fit.value("frequency"), analytic.bare_hz,
                   analytic.damped_hz, fit.converged});
  }
  return out;
}

struct T1ExperimentResult {
  Trace ground_probability;    // P_g vs delay
  FitResult fit;               // exponential recovery fit
  double pi_pulse_s = 0.0;
  double ground_after_pulse = 0.0;
  double fitted_t1_s = 0.0;
};

// Pi pulse calibrated as t_pi = pi / omega_Rabi from the drive amplitude,
// simulated with losses on, followed by free decay over the delay grid.
inline T1ExperimentResult t1_experiment(const DrivenQubitModel& m, double power_dbm,
                                        const std::vector<double>& delays_s) {
  const double n_eff = effective_photon_number(m, power_dbm);
  const RabiFrequency rabi = rabi_frequency_analytic(m.coupling_hz, n_eff, m.relaxation_rate);
  if (rabi.bare_hz <= 0.0 || rabi.overdamped)
    throw ModelError("t1_experiment: drive too weak to calibrate a pi pulse");
  T1ExperimentResult out;
  out.pi_pulse_s = 0.5 / rabi.bare_hz;  // pi / omega_Rabi

  // Drive stage.
  LindbladSpec pulse;
  pulse.hamiltonian = hamiltonian_driven_qubit(m.anharmonicity_hz, m.coupling_hz, n_eff, m.dim);
  pulse.collapses = qubit_collapses(m.dim, m.relaxation_rate, m.dephasing_rate);
  pulse.initial_state = ComplexMatrix::Zero(m.dim, m.dim);
  pulse.initial_state(0, 0) = 1.0;
  pulse.times_s = {0.0, out.pi_pulse_s};
  ComplexMatrix excited = lindblad_evolve(pulse).states.back();
  out.ground_after_pulse = excited(0, 0).real();

  // Free decay stage.
  LindbladSpec decay;
  decay.hamiltonian = {m.dim, ComplexMatrix::Zero(m.dim, m.dim)};
  decay.collapses = pulse.collapses;
  decay.initial_state = std::move(excited);
  decay.times_s = delays_s;
  const EvolutionResult evo = lindblad_evolve(decay);

  out.ground_probability.x = evo.times_s;
  out.ground_probability.y = evo.population(0);
  out.fit = fit_exponential(out.ground_probability);
  out.fitted_t1_s = out.fit.value("t1");
  return out;
}

// Truncation-convergence helper: rerun a dim-dependent quantity at dim+4
// and report whether it moved by less than the tolerance.
struct ConvergenceCheck {
  double value = 0.0;
  double value_refined = 0.0;
  bool converged = false;
};

inline ConvergenceCheck check_truncation_convergence(
    const std::function<double(int)>& quantity, int dim, double tolerance) {
  ConvergenceCheck out;
  out.value = quantity(dim);
  out.value_refined = quantity(dim + 4);
  out.converged = std::abs(out.value - out.value_refined) <= tolerance;
  return out;
}

}  // namespace cqed
