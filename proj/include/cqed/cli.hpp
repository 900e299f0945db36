#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "cqed/config.hpp"
#include "cqed/csv.hpp"
#include "cqed/device.hpp"
#include "cqed/duffing.hpp"
#include "cqed/dynamics.hpp"
#include "cqed/errors.hpp"
#include "cqed/fit.hpp"
#include "cqed/geometry.hpp"
#include "cqed/presets.hpp"
#include "cqed/rng.hpp"
#include "cqed/svg.hpp"

// Experiment runner: every subcommand resolves its parameters from the
// device config plus flag overrides, writes CSV (and optionally SVG) into
// the output directory together with a run manifest, and reports a summary
// on the stream. Fixed seed => byte-identical CSV.

namespace cqed::cli {

#ifndef CQED_VERSION
#define CQED_VERSION "dev"
#endif
inline constexpr const char* kVersion = CQED_VERSION;

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerics = 3;

struct ExperimentConfig {
  std::string config_ref;  // file path or built-in preset name
  std::string experiment;
  std::map<std::string, std::string> options;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  double noise_sigma = 0.0;
  bool plot = false;
};

struct ExperimentInfo {
  std::string name;
  std::string description;
  std::string option_keys;
};

inline const std::vector<ExperimentInfo>& experiment_registry() {
  static const std::vector<ExperimentInfo> registry = {
      {"derive-params", "junction energies, zero-point phase and transmon frequency",
       "(none)"},
      {"modes", "analytic rectangular-cavity modes vs measured references", "max-m, max-n"},
      {"critical-power", "junction switching power of the readout mode", "mode"},
      {"thermal", "cavity temperature and thermal photon number", "source-k, freq-ghz"},
      {"sweep-cavity", "driven Kerr-cavity transmission sweep",
       "mode, power-dbm, attenuation-db, phi-b-sq, span-start-khz, span-stop-khz, points, direction"},
      {"hysteresis-map", "ascending-descending transmission difference map",
       "mode, power-start-dbm, power-stop-dbm, power-points, span-start-khz, span-stop-khz, points, phi-b-sq"},
      {"two-tone", "drive-frequency x drive-power response map",
       "drive-span-mhz, drive-points, power-start-dbm, power-stop-dbm, power-points"},
      {"rabi", "ground-state probability vs drive-pulse length",
       "power-dbm, t-max-us, points"},
      {"rabi-sweep", "extracted Rabi frequency vs drive amplitude",
       "sqrt-neff-min, sqrt-neff-max, points, dim"},
      {"t1", "relaxation after a calibrated pi pulse", "power-dbm, delay-max-us, points"},
      {"fit", "least-squares extraction from a CSV trace",
       "model (lorentzian|coupling|kerr|t1|rabi), input, plus model-specific keys"},
  };
  return registry;
}

inline void list_experiments(std::ostream& out) {
  out << "experiments:\n";
  for (const auto& e : experiment_registry()) {
    out << "  " << std::left << std::setw(15) << e.name << " " << e.description << "\n";
    out << "  " << std::setw(15) << " " << " options: " << e.option_keys << "\n";
  }
}

namespace detail {

inline double opt_double(const ExperimentConfig& run, const std::string& key, double fallback) {
  const auto it = run.options.find(key);
  if (it == run.options.end()) return fallback;
  char* end = nullptr;
  const double v = std::strtod(it->second.c_str(), &end);
  if (end == it->second.c_str() || *end != '\0')
    throw ConfigError("option --" + key + ": not a number: '" + it->second + "'");
  return v;
}

inline std::string opt_string(const ExperimentConfig& run, const std::string& key,
                              const std::string& fallback) {
  const auto it = run.options.find(key);
  return it == run.options.end() ? fallback : it->second;
}

inline std::vector<double> linspace(double lo, double hi, int n) {
  if (n < 2 || hi <= lo) throw ConfigError("grid needs at least 2 points and hi > lo");
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = lo + (hi - lo) * i / (n - 1);
  return out;
}

inline Config resolve_config(const ExperimentConfig& run) {
  if (run.config_ref.empty()) throw ConfigError("no device config given (--config)");
  if (std::filesystem::exists(run.config_ref)) return Config::load(run.config_ref);
  if (presets::is_builtin(run.config_ref)) return presets::builtin(run.config_ref);
  throw ConfigError("config '" + run.config_ref + "' is neither a file nor a built-in preset");
}

// Gaussian measurement noise, one deterministic stream per column.
inline void add_noise(std::vector<double>& values, const ExperimentConfig& run,
                      const std::string& column) {
  if (run.noise_sigma <= 0.0) return;
  CounterRng rng(run.seed, column);
  for (double& v : values) v += run.noise_sigma * rng.gaussian();
}

struct Artifacts {
  std::filesystem::path dir;
  const ExperimentConfig* run = nullptr;
  const Config* cfg = nullptr;
  std::ostringstream manifest;

  std::string base_comment_block(std::vector<std::string>* comments) const {
    comments->push_back(std::string("cqedsim v") + kVersion);
    comments->push_back("experiment: " + run->experiment);
    comments->push_back("config: " + cfg->origin() + " (hash " + cfg->hash_hex() + ")");
    comments->push_back("seed: " + std::to_string(run->seed));
    return {};
  }

  void write_table(const std::string& stem, CsvTable& table) const {
    std::vector<std::string> comments;
    base_comment_block(&comments);
    for (const auto& extra : table.comments) comments.push_back(extra);
    table.comments = comments;
    write_csv((dir / (stem + ".csv")).string(), table);
  }

  void write_plot(const std::string& stem, const Plot& plot) const {
    if (run->plot) write_svg((dir / (stem + ".svg")).string(), plot);
  }

  void finish() const {
    std::ofstream out(dir / (run->experiment + "_manifest.txt"));
    out << "tool: cqedsim v" << kVersion << "\n";
    out << "experiment: " << run->experiment << "\n";
    out << "config: " << cfg->origin() << "\n";
    out << "config_hash: " << cfg->hash_hex() << "\n";
    out << "seed: " << run->seed << "\n";
    out << "noise_sigma: " << format_value(run->noise_sigma) << "\n";
    for (const auto& [k, v] : run->options) out << "option " << k << ": " << v << "\n";
    out << manifest.str();
  }
};

// --- individual experiments ------------------------------------------------

inline void run_derive_params(const ExperimentConfig&, const Config& cfg, Artifacts& art,
                              std::ostream& out) {
  const SystemModel sys = presets::system_from_config(cfg);
  if (!sys.junction) throw ConfigError("derive-params needs a junction block");
  const JunctionParameters& j = *sys.junction;
  j.validate();

  const double c_f = j.capacitance_f;
  const Energy ec = charging_energy(c_f);
  const Energy ej = josephson_energy(j.critical_current_a);
  const double l_j = junction_inductance(j.critical_current_a);
  const double phi_zpf = zero_point_phase(ec, ej);
  const double nu_q = transmon_frequency(ej, ec);
  const double ic_inverse = critical_current_from_frequency(sys.qubit.frequency_hz, c_f);

  out << "junction parameter report\n";
  out << "  geometric capacitance : " << format_value(c_f * 1e12) << " pF\n";
  out << "  charging energy E_C/h : " << format_value(ec.hz / 1e6) << " MHz\n";
  out << "  anharmonicity -E_C/h  : " << format_value(-ec.hz / 1e6) << " MHz\n";
  out << "  Josephson energy E_J/h: " << format_value(ej.hz / 1e12) << " THz\n";
  out << "  junction inductance   : " << format_value(l_j * 1e9) << " nH\n";
  out << "  zero-point phase      : " << format_value(phi_zpf) << "\n";
  out << "  transmon frequency    : " << format_value(nu_q / 1e9) << " GHz\n";
  out << "  I_c from measured nu_q: " << format_value(ic_inverse * 1e6) << " uA\n";

  CsvTable table;
  table.columns = {{"capacitance_pf", "pF", {c_f * 1e12}},
                   {"charging_energy_mhz", "MHz", {ec.hz / 1e6}},
                   {"josephson_energy_thz", "THz", {ej.hz / 1e12}},
                   {"inductance_nh", "nH", {l_j * 1e9}},
                   {"phi_zpf", "1", {phi_zpf}},
                   {"transmon_frequency_ghz", "GHz", {nu_q / 1e9}},
                   {"critical_current_from_nu_q_ua", "uA", {ic_inverse * 1e6}}};
  art.write_table("derive_params", table);
  art.manifest << "transmon_frequency_ghz: " << format_value(nu_q / 1e9) << "\n";
}

inline void run_modes(const ExperimentConfig& run, const Config& cfg, Artifacts& art,
                      std::ostream& out) {
  const auto geom = presets::geometry_from_config(cfg);
  if (!geom) throw ConfigError("modes needs cavity.lx_mm/ly_mm/lz_mm");
  const int max_m = int(opt_double(run, "max-m", 1));
  const int max_n = int(opt_double(run, "max-n", 4));
  const auto table = tm_mode_table(*geom, max_m, max_n);

  CsvTable csv;
  CsvColumn cm{"m", "1", {}}, cn{"n", "1", {}}, ca{"analytic_hz", "Hz", {}},
      cr{"measured_hz", "Hz", {}}, cd{"deviation_percent", "%", {}}, cw{"field_weight", "1", {}};
  out << "label   analytic GHz   measured GHz   deviation %   weight at chip\n";
  for (const auto& mode : table) {
    const std::string freq_key = "mode." + mode.label + ".frequency_ghz";
    double measured = 0.0, deviation = 0.0;
    const bool have = cfg.has(freq_key);
    if (have) {
      measured = cfg.get_double(freq_key) * 1e9;
      deviation = 100.0 * (mode.frequency_hz - measured) / measured;
    }
    cm.values.push_back(mode.m);
    cn.values.push_back(mode.n);
    ca.values.push_back(mode.frequency_hz);
    cr.values.push_back(measured);
    cd.values.push_back(deviation);
    cw.values.push_back(mode.field_weight);
    out << "  " << mode.label << "  " << std::setw(10) << format_value(mode.frequency_hz / 1e9);
    if (have)
      out << "   " << std::setw(10) << format_value(measured / 1e9) << "   " << std::setw(8)
          << format_value(deviation);
    else
      out << "   " << std::setw(10) << "-" << "   " << std::setw(8) << "-";
    out << "      " << format_value(mode.field_weight) << "\n";
  }
  csv.columns = {cm, cn, ca, cr, cd, cw};
  art.write_table("modes", csv);
}

inline void run_critical_power(const ExperimentConfig& run, const Config& cfg, Artifacts& art,
                               std::ostream& out) {
  const SystemModel sys = presets::system_from_config(cfg);
  if (!sys.junction) throw ConfigError("critical-power needs a junction block");
  const std::string label = opt_string(run, "mode", cfg.get_string("readout.mode"));
  const CavityMode& mode = sys.mode(label);
  if (!mode.coupling_hz) throw ConfigError("mode " + label + " has no coupling g");

  const CriticalPower p =
      critical_input_power(sys.junction->critical_current_a, mode.frequency_hz,
                           sys.qubit.frequency_hz, *mode.coupling_hz, mode.total_rate());
  out << "critical input power (" << label << "): " << format_value(p.dbm) << " dBm ("
      << format_value(p.watts) << " W)\n";

  CsvTable table;
  table.columns = {{"critical_power_w", "W", {p.watts}},
                   {"critical_power_dbm", "dBm", {p.dbm}}};
  art.write_table("critical_power", table);
  art.manifest << "critical_power_dbm: " << format_value(p.dbm) << "\n";
}

inline void run_thermal(const ExperimentConfig& run, const Config& cfg, Artifacts& art,
                        std::ostream& out) {
  const double source_k =
      opt_double(run, "source-k", cfg.get_double("thermal.source_temperature_k", 4.0));
  double freq_hz = opt_double(run, "freq-ghz", 0.0) * 1e9;
  if (freq_hz <= 0.0) {
    const SystemModel sys = presets::system_from_config(cfg);
    freq_hz = sys.mode(cfg.get_string("readout.mode")).frequency_hz;
  }
  const double t_cav = thermal_cavity_temperature(source_k);
  const double n_bar = bose_occupation(freq_hz, t_cav);
  out << "cavity temperature: " << format_value(t_cav) << " K (source " << format_value(source_k)
      << " K, equal port couplings)\n";
  out << "thermal photons at " << format_value(freq_hz / 1e9) << " GHz: " << format_value(n_bar)
      << "\n";

  CsvTable table;
  table.columns = {{"source_temperature_k", "K", {source_k}},
                   {"cavity_temperature_k", "K", {t_cav}},
                   {"frequency_hz", "Hz", {freq_hz}},
                   {"thermal_photons", "1", {n_bar}}};
  art.write_table("thermal", table);
}

inline void run_sweep_cavity(const ExperimentConfig& run, const Config& cfg, Artifacts& art,
                             std::ostream& out) {
  const SystemModel sys = presets::system_from_config(cfg);
  const std::string label = opt_string(run, "mode", cfg.get_string("sweep.mode"));
  const CavityMode& mode = sys.mode(label);

  const double power_dbm = opt_double(run, "power-dbm", -115.0);
  const double attenuation_db = opt_double(run, "attenuation-db", 0.0);
  const double phi_b_sq = opt_double(run, "phi-b-sq", 0.0);
  const double kerr_eff = effective_kerr(mode.self_kerr_hz, phi_b_sq);
  const double span_lo = opt_double(run, "span-start-khz", -800.0) * 1e3;
  const double span_hi = opt_double(run, "span-stop-khz", 400.0) * 1e3;
  const int points = int(opt_double(run, "points", 801));
  const std::string direction = opt_string(run, "direction", "ascending");
  const SweepDirection dir = direction == "descending" ? SweepDirection::Descending
                            : direction == "ascending" ? SweepDirection::Ascending
                                                       : throw ConfigError(
                                                             "--direction must be "
                                                             "ascending or descending");

  const auto grid = linspace(mode.frequency_hz + span_lo, mode.frequency_hz + span_hi, points);
  const auto sweep = transmission_sweep(mode, kerr_eff, power_dbm, attenuation_db, grid, dir);

  CsvTable table;
  CsvColumn cf{"freq_hz", "Hz", {}}, cm{"s21_mag", "1", {}}, cp{"s21_phase", "rad", {}},
      cn{"n_photons", "1", {}}, cb{"branch_id", "1", {}};
  for (const auto& pt : sweep) {
    cf.values.push_back(pt.frequency_hz);
    cm.values.push_back(std::abs(pt.s21));
    cp.values.push_back(std::arg(pt.s21));
    cn.values.push_back(pt.photons);
    cb.values.push_back(pt.branch);
  }
  add_noise(cm.values, run, "s21_mag");
  add_noise(cp.values, run, "s21_phase");
  table.columns = {cf, cm, cp, cn, cb};
  table.comments.push_back("mode: " + label + ", direction: " + direction +
                           ", kerr_eff_hz: " + format_value(kerr_eff));
  art.write_table("sweep_cavity", table);

  Plot plot;
  plot.title = "cavity sweep (" + label + ", " + direction + ")";
  plot.x_label = "detuning [kHz]";
  plot.y_label = "|S21|";
  PlotSeries series;
  for (const auto& pt : sweep) {
    series.x.push_back((pt.frequency_hz - mode.frequency_hz) / 1e3);
    series.y.push_back(std::abs(pt.s21));
  }
  plot.series.push_back(series);
  art.write_plot("sweep_cavity", plot);

  out << "sweep-cavity: " << points << " points, " << direction << ", K_eff = "
      << format_value(kerr_eff / 1e3) << " kHz\n";
}

inline void run_hysteresis_map(const ExperimentConfig& run, const Config& cfg, Artifacts& art,
                               std::ostream& out) {
  const SystemModel sys = presets::system_from_config(cfg);
  const std::string label = opt_string(run, "mode", cfg.get_string("sweep.mode"));
  const CavityMode& mode = sys.mode(label);

  const double phi_b_sq = opt_double(run, "phi-b-sq", 0.0);
  const double kerr_eff = effective_kerr(mode.self_kerr_hz, phi_b_sq);
  const double attenuation_db = opt_double(run, "attenuation-db", 0.0);
  const auto powers = linspace(opt_double(run, "power-start-dbm", -125.0),
                               opt_double(run, "power-stop-dbm", -108.0),
                               int(opt_double(run, "power-points", 18)));
  const auto grid = linspace(mode.frequency_hz + opt_double(run, "span-start-khz", -800.0) * 1e3,
                             mode.frequency_hz + opt_double(run, "span-stop-khz", 800.0) * 1e3,
                             int(opt_double(run, "points", 321)));

  const HysteresisMap map = hysteresis_map(mode, kerr_eff, powers, attenuation_db, grid);

  CsvTable table;
  CsvColumn cp{"power_dbm", "dBm", {}}, cf{"freq_hz", "Hz", {}}, cd{"s21_diff", "1", {}};
  for (std::size_t p = 0; p < powers.size(); ++p) {
    for (std::size_t f = 0; f < grid.size(); ++f) {
      cp.values.push_back(powers[p]);
      cf.values.push_back(grid[f]);
      cd.values.push_back(map.difference(long(p), long(f)));
    }
  }
  add_noise(cd.values, run, "s21_diff");
  table.columns = {cp, cf, cd};
  table.comments.push_back("mode: " + label + ", kerr_eff_hz: " + format_value(kerr_eff));
  art.write_table("hysteresis_map", table);

  const double max_diff = map.difference.cwiseAbs().maxCoeff();
  out << "hysteresis-map: " << powers.size() << " x " << grid.size()
      << " points, max |ascending - descending| = " << format_value(max_diff) << "\n";
  art.manifest << "max_abs_difference: " << format_value(max_diff) << "\n";

  Plot plot;
  plot.title = "hysteresis (" + label + ")";
  plot.x_label = "detuning [kHz]";
  plot.y_label = "|S21| asc - desc";
  for (std::size_t p : {powers.size() - 1, powers.size() / 2}) {
    PlotSeries s;
    s.label = format_value(powers[p]) + " dBm";
    for (std::size_t f = 0; f < grid.size(); ++f) {
      s.x.push_back((grid[f] - mode.frequency_hz) / 1e3);
      s.y.push_back(map.difference(long(p), long(f)));
    }
    plot.series.push_back(s);
  }
  art.write_plot("hysteresis_map", plot);
}

inline void run_two_tone(const ExperimentConfig& run, const Config& cfg, Artifacts& art,
                         std::ostream& out) {
  const SystemModel sys = presets::system_from_config(cfg);
  const DrivenQubitModel driven = presets::driven_qubit_from_config(cfg, sys);
  const std::string ro_label = cfg.get_string("readout.mode");
  const CavityMode& readout = sys.mode(ro_label);
  std::size_t readout_index = 0;
  for (std::size_t i = 0; i < sys.modes.size(); ++i)
    if (sys.modes[i].label == ro_label) readout_index = i;

  const double span = opt_double(run, "drive-span-mhz", 8.0) * 1e6;
  const auto drive_freqs =
      linspace(sys.qubit.frequency_hz - span, sys.qubit.frequency_hz + span,
               int(opt_double(run, "drive-points", 161)));
  const auto powers = linspace(opt_double(run, "power-start-dbm", -75.0),
                               opt_double(run, "power-stop-dbm", -40.0),
                               int(opt_double(run, "power-points", 15)));

  // Qubit treated as its own softening Duffing oscillator: the steady
  // excitation follows the same cubic with K = alpha and the decoherence
  // half-width, and the readout line shifts by chi * n_b.
  const double gamma2 = sys.qubit.relaxation_rate / 2.0 + sys.qubit.dephasing_rate;
  const double chi = kerr_coefficients(sys, readout_index).cross_kerr_hz;

  CsvTable table;
  CsvColumn cp{"drive_power_dbm", "dBm", {}}, cf{"drive_freq_hz", "Hz", {}},
      cn{"qubit_excitation", "1", {}}, cs{"cavity_shift_hz", "Hz", {}},
      cph{"s21_phase", "rad", {}};
  for (double p_dbm : powers) {
    for (double f_d : drive_freqs) {
      DrivenQubitModel local = driven;
      local.qubit_hz = f_d;  // detuning of the drive from its routing mode
      const double n_eff = effective_photon_number(local, p_dbm);
      const double mu_rad = constants::two_pi * local.coupling_hz * std::sqrt(n_eff);
      const DuffingRoots roots = steady_state_photons(
          constants::two_pi * (f_d - sys.qubit.frequency_hz),
          constants::two_pi * sys.qubit.anharmonicity_hz, 2.0 * gamma2, mu_rad * mu_rad);
      // Cold start at every map pixel: the drive rings up onto the lowest
      // stable branch.
      double n_b = 0.0;
      for (std::size_t r = 0; r < roots.photons.size(); ++r) {
        if (roots.stable[r]) {
          n_b = roots.photons[r];
          break;
        }
      }

      const double cavity_shift = chi * n_b;
      const std::complex<double> s21 = transmission_s21(
          readout, constants::two_pi * (-cavity_shift), 0.0, 0.0);
      cp.values.push_back(p_dbm);
      cf.values.push_back(f_d);
      cn.values.push_back(n_b);
      cs.values.push_back(cavity_shift);
      cph.values.push_back(std::arg(s21));
    }
  }
  add_noise(cph.values, run, "s21_phase");
  table.columns = {cp, cf, cn, cs, cph};
  table.comments.push_back("readout mode: " + ro_label +
                           ", chi_hz: " + format_value(chi));
  art.write_table("two_tone", table);
  out << "two-tone: " << powers.size() << " x " << drive_freqs.size() << " map written\n";
}

inline void run_rabi(const ExperimentConfig& run, const Config& cfg, Artifacts& art,
                     std::ostream& out) {
  const SystemModel sys = presets::system_from_config(cfg);
  DrivenQubitModel m = presets::driven_qubit_from_config(cfg, sys);
  // The pulsed experiments drive the physical qubit; its anharmonicity sets
  // the leakage, so take alpha from the qubit block unless overridden.
  m.anharmonicity_hz = opt_double(run, "anharmonicity-mhz",
                                  sys.qubit.anharmonicity_hz / 1e6) * 1e6;
  m.dim = int(opt_double(run, "dim", m.dim));

  const double power_dbm = opt_double(run, "power-dbm", -68.0);
  const double t_max = opt_double(run, "t-max-us", 20.0) * 1e-6;
  const int points = int(opt_double(run, "points", 241));

  const auto result = rabi_experiment(m, power_dbm, linspace(0.0, t_max, points));

  CsvTable table;
  CsvColumn ct{"duration_s", "s", {}}, cg{"p_ground", "1", {}};
  ct.values = result.ground_probability.x;
  cg.values = result.ground_probability.y;
  add_noise(cg.values, run, "p_ground");
  table.columns = {ct, cg};
  table.comments.push_back("n_eff: " + format_value(result.n_eff) +
                           ", power_dbm: " + format_value(power_dbm));
  art.write_table("rabi", table);

  out << "rabi: n_eff = " << format_value(result.n_eff) << ", extracted nu_Rabi = "
      << format_value(result.extracted_frequency_hz / 1e3) << " kHz ("
      << (result.fit.converged ? "fit" : result.fit.message) << ")\n";
  art.manifest << "n_eff: " << format_value(result.n_eff) << "\n";
  art.manifest << "nu_rabi_hz: " << format_value(result.extracted_frequency_hz) << "\n";
  art.manifest << "fit_converged: " << (result.fit.converged ? "yes" : "no") << "\n";

  Plot plot;
  plot.title = "Rabi oscillation";
  plot.x_label = "pulse length [us]";
  plot.y_label = "P_ground";
  PlotSeries s;
  for (std::size_t i = 0; i < ct.values.size(); ++i) {
    s.x.push_back(ct.values[i] * 1e6);
    s.y.push_back(cg.values[i]);
  }
  plot.series.push_back(s);
  art.write_plot("rabi", plot);
}

inline void run_rabi_sweep(const ExperimentConfig& run, const Config& cfg, Artifacts& art,
                           std::ostream& out) {
  const SystemModel sys = presets::system_from_config(cfg);
  DrivenQubitModel m = presets::driven_qubit_from_config(cfg, sys);
  m.dim = int(opt_double(run, "dim", m.dim));

  const double lo = opt_double(run, "sqrt-neff-min", 0.9e-4);
  const double hi = opt_double(run, "sqrt-neff-max", 3.6e-4);
  const int points = int(opt_double(run, "points", 8));
  std::vector<double> n_eff_grid;
  for (double s : linspace(lo, hi, points)) n_eff_grid.push_back(s * s);

  const auto sweep = rabi_vs_amplitude(m, n_eff_grid);

  CsvTable table;
  CsvColumn cs{"sqrt_n_eff", "1", {}}, cf{"nu_rabi_hz", "Hz", {}},
      ca{"nu_twolevel_hz", "Hz", {}}, cd{"nu_damped_hz", "Hz", {}}, cc{"fit_converged", "1", {}};
  for (const auto& pt : sweep) {
    cs.values.push_back(pt.sqrt_n_eff);
    cf.values.push_back(pt.frequency_hz);
    ca.values.push_back(pt.analytic_hz);
    cd.values.push_back(pt.damped_hz);
    cc.values.push_back(pt.fit_converged ? 1.0 : 0.0);
  }
  add_noise(cf.values, run, "nu_rabi_hz");
  table.columns = {cs, cf, ca, cd, cc};
  art.write_table("rabi_sweep", table);

  out << "rabi-sweep: " << points << " amplitudes, g/2pi = "
      << format_value(m.coupling_hz / 1e6) << " MHz, K_b/2pi = "
      << format_value(m.anharmonicity_hz / 1e6) << " MHz\n";

  Plot plot;
  plot.title = "Rabi frequency vs drive amplitude";
  plot.x_label = "sqrt(n_eff)";
  plot.y_label = "nu_Rabi [kHz]";
  PlotSeries sim, linear;
  sim.label = "simulated";
  sim.markers = true;
  linear.label = "2 g sqrt(n_eff)";
  for (const auto& pt : sweep) {
    sim.x.push_back(pt.sqrt_n_eff);
    sim.y.push_back(pt.frequency_hz / 1e3);
    linear.x.push_back(pt.sqrt_n_eff);
    linear.y.push_back(pt.analytic_hz / 1e3);
  }
  plot.series = {linear, sim};
  art.write_plot("rabi_sweep", plot);
}

inline void run_t1(const ExperimentConfig& run, const Config& cfg, Artifacts& art,
                   std::ostream& out) {
  const SystemModel sys = presets::system_from_config(cfg);
  DrivenQubitModel m = presets::driven_qubit_from_config(cfg, sys);
  m.anharmonicity_hz = opt_double(run, "anharmonicity-mhz",
                                  sys.qubit.anharmonicity_hz / 1e6) * 1e6;
  m.dim = int(opt_double(run, "dim", m.dim));

  const double power_dbm = opt_double(run, "power-dbm", -68.0);
  const double delay_max = opt_double(run, "delay-max-us", 30.0) * 1e-6;
  const int points = int(opt_double(run, "points", 31));

  const auto result = t1_experiment(m, power_dbm, linspace(0.0, delay_max, points));

  CsvTable table;
  CsvColumn ct{"delay_s", "s", {}}, cg{"p_ground", "1", {}};
  ct.values = result.ground_probability.x;
  cg.values = result.ground_probability.y;
  add_noise(cg.values, run, "p_ground");
  table.columns = {ct, cg};
  table.comments.push_back("pi_pulse_s: " + format_value(result.pi_pulse_s));
  art.write_table("t1", table);

  out << "t1: pi pulse " << format_value(result.pi_pulse_s * 1e6) << " us, P_g(0) = "
      << format_value(result.ground_after_pulse) << ", fitted T1 = "
      << format_value(result.fitted_t1_s * 1e6) << " us\n";
  art.manifest << "pi_pulse_s: " << format_value(result.pi_pulse_s) << "\n";
  art.manifest << "ground_after_pulse: " << format_value(result.ground_after_pulse) << "\n";
  art.manifest << "fitted_t1_s: " << format_value(result.fitted_t1_s) << "\n";

  Plot plot;
  plot.title = "T1 relaxation";
  plot.x_label = "delay [us]";
  plot.y_label = "P_ground";
  PlotSeries s;
  s.markers = true;
  for (std::size_t i = 0; i < ct.values.size(); ++i) {
    s.x.push_back(ct.values[i] * 1e6);
    s.y.push_back(cg.values[i]);
  }
  plot.series.push_back(s);
  art.write_plot("t1", plot);
}

inline void print_fit(const FitResult& fit, std::ostream& out) {
  for (std::size_t i = 0; i < fit.names.size(); ++i)
    out << "  " << fit.names[i] << " = " << format_value(fit.values[int(i)]) << " +- "
        << format_value(fit.sigmas[int(i)]) << "\n";
  out << "  residual_norm = " << format_value(fit.residual_norm) << "\n";
  out << "  converged = " << (fit.converged ? "yes" : "no");
  if (!fit.message.empty()) out << " (" << fit.message << ")";
  out << "\n";
}

inline void run_fit(const ExperimentConfig& run, const Config& cfg, Artifacts& art,
                    std::ostream& out) {
  const std::string model = opt_string(run, "model", "");
  const std::string input = opt_string(run, "input", "");
  if (model.empty() || input.empty())
    throw ConfigError("fit needs --model lorentzian|coupling|kerr|t1|rabi and --input file.csv");
  const CsvTable data = read_csv(input);
  if (data.columns.size() < 2) throw ConfigError("fit input needs at least two columns");

  FitResult fit;
  if (model == "lorentzian" || model == "t1" || model == "rabi") {
    Trace trace{data.columns[0].values, data.columns[1].values, {}};
    if (model == "lorentzian")
      fit = fit_lorentzian(trace);
    else if (model == "t1")
      fit = fit_exponential(trace);
    else
      fit = fit_damped_sinusoid(trace);
  } else if (model == "coupling") {
    const SystemModel sys = presets::system_from_config(cfg);
    const std::string label = opt_string(run, "mode", cfg.get_string("readout.mode"));
    std::size_t index = 0;
    for (std::size_t i = 0; i < sys.modes.size(); ++i)
      if (sys.modes[i].label == label) index = i;
    std::vector<std::pair<double, double>> pairs;
    for (std::size_t i = 0; i < data.rows(); ++i)
      pairs.emplace_back(data.columns[0].values[i], data.columns[1].values[i]);
    fit = fit_coupling_from_dressed(pairs, sys.qubit_mode_detuning_hz(index),
                                    sys.qubit.anharmonicity_hz);
  } else if (model == "kerr") {
    const SystemModel sys = presets::system_from_config(cfg);
    const std::string label = opt_string(run, "mode", cfg.get_string("sweep.mode"));
    std::size_t index = 0;
    for (std::size_t i = 0; i < sys.modes.size(); ++i)
      if (sys.modes[i].label == label) index = i;
    const CavityMode& mode = sys.modes[index];
    const double attenuation = opt_double(run, "attenuation-db", -85.0);
    Trace trace{data.columns[0].values, data.columns[1].values, {}};
    fit = fit_self_kerr(trace, mode.total_rate(), mode.frequency_hz, attenuation,
                        sys.qubit.anharmonicity_hz, sys.qubit_mode_detuning_hz(index));
  } else {
    throw ConfigError("unknown fit model '" + model + "'");
  }

  out << "fit " << model << " (" << input << "):\n";
  print_fit(fit, out);

  CsvTable table;
  for (std::size_t i = 0; i < fit.names.size(); ++i) {
    table.columns.push_back({fit.names[i], "", {fit.values[int(i)]}});
    table.columns.push_back({fit.names[i] + "_sigma", "", {fit.sigmas[int(i)]}});
  }
  table.columns.push_back({"residual_norm", "", {fit.residual_norm}});
  table.columns.push_back({"converged", "", {fit.converged ? 1.0 : 0.0}});
  table.comments.push_back("model: " + model + ", input: " + input);
  art.write_table("fit_" + model, table);
  if (!fit.converged && !fit.message.empty())
    art.manifest << "fit_message: " << fit.message << "\n";
}

}  // namespace detail

inline int run(const ExperimentConfig& request, std::ostream& out, std::ostream& err) {
  try {
    const Config cfg = detail::resolve_config(request);

    detail::Artifacts art;
    art.dir = request.out_dir.empty() ? "." : request.out_dir;
    std::filesystem::create_directories(art.dir);
    art.run = &request;
    art.cfg = &cfg;

    const std::string& name = request.experiment;
    if (name == "derive-params")
      detail::run_derive_params(request, cfg, art, out);
    else if (name == "modes")
      detail::run_modes(request, cfg, art, out);
    else if (name == "critical-power")
      detail::run_critical_power(request, cfg, art, out);
    else if (name == "thermal")
      detail::run_thermal(request, cfg, art, out);
    else if (name == "sweep-cavity")
      detail::run_sweep_cavity(request, cfg, art, out);
    else if (name == "hysteresis-map")
      detail::run_hysteresis_map(request, cfg, art, out);
    else if (name == "two-tone")
      detail::run_two_tone(request, cfg, art, out);
    else if (name == "rabi")
      detail::run_rabi(request, cfg, art, out);
    else if (name == "rabi-sweep")
      detail::run_rabi_sweep(request, cfg, art, out);
    else if (name == "t1")
      detail::run_t1(request, cfg, art, out);
    else if (name == "fit")
      detail::run_fit(request, cfg, art, out);
    else
      throw ConfigError("unknown experiment '" + name + "'");

    art.finish();
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ModelError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerics;
  }
}

}  // namespace cqed::cli
