#pragma once

#include <string>
#include <string_view>

#include "cqed/config.hpp"
#include "cqed/device.hpp"
#include "cqed/dynamics.hpp"
#include "cqed/geometry.hpp"

// Built-in device parameter sets and the config -> model builders. The same
// texts ship as presets/nbse2.cfg and presets/al_transmon.cfg; `--config`
// accepts either a file path or one of the built-in names.

namespace cqed::presets {

inline constexpr std::string_view nbse2 = R"(# NbSe2 junction qubit in an Al rectangular cavity
device.name = nbse2

qubit.frequency_ghz = 12.611          # control-tone frequency
qubit.anharmonicity_mhz = -1.3        # alpha/2pi from the charging energy
qubit.relaxation_rate_per_s = 1.53e5  # Gamma_q = 1/T1, T1 = 6.5 us
qubit.dephasing_rate_per_s = 7.65e4   # Gamma_phi = Gamma_q/2

junction.critical_current_ua = 31
junction.area_um2 = 88                # JJ overlap from optical microscopy
junction.barrier_thickness_nm = 1     # assumed NbOx interlayer
junction.relative_permittivity = 20

cavity.lx_mm = 26
cavity.ly_mm = 36
cavity.lz_mm = 8

line.drive_attenuation_db = -85       # input line at the control frequency
line.readout_attenuation_db = -75     # input line at the readout frequency

mode.tm110.frequency_ghz = 7.1873     # measured; readout mode
mode.tm110.linewidth_khz = 53
mode.tm110.port1_khz = 10
mode.tm110.port2_khz = 10
mode.tm110.coupling_mhz = 67          # fitted, 67 +- 17 MHz

mode.tm120.frequency_ghz = 10.40
mode.tm120.linewidth_khz = 200
mode.tm120.port1_khz = 10
mode.tm120.port2_khz = 10
mode.tm120.coupling_mhz = 5           # field-simulation estimate; node at chip

mode.tm130.frequency_ghz = 13.45
mode.tm130.linewidth_khz = 200        # simulated width; measured ~4 MHz
mode.tm130.port1_khz = 10
mode.tm130.port2_khz = 10
mode.tm130.coupling_mhz = 257         # from the self-Kerr route, +-60 syst
mode.tm130.self_kerr_khz = -13.33     # fitted cavity Kerr (softening)

mode.tm140.frequency_ghz = 17.85
mode.tm140.linewidth_khz = 600
mode.tm140.port1_khz = 10
mode.tm140.port2_khz = 10

readout.mode = tm110
sweep.mode = tm130

# Driven-qubit simulation parameters (drive routed through TM130)
rabisim.mode = tm130
rabisim.coupling_mhz = 210            # g_130 used in the time-domain model
rabisim.anharmonicity_mhz = -0.03     # K_b reproducing the amplitude sweep
rabisim.gamma_total_khz = 200
rabisim.gamma_port1_khz = 10          # under-critical input port
rabisim.attenuation_db = -95          # drive-line estimate plus 10 dB margin
rabisim.dim = 6
)";

inline constexpr std::string_view al_transmon = R"(# Al transmon reference device in an identical cavity
device.name = al_transmon

qubit.frequency_ghz = 5.7
qubit.anharmonicity_mhz = 0           # not quoted; unused by these reports
qubit.relaxation_rate_per_s = 0
qubit.dephasing_rate_per_s = 0

junction.critical_current_ua = 0.02   # 20 nA

mode.readout.frequency_ghz = 7.5
mode.readout.linewidth_khz = 200
mode.readout.port1_khz = 10
mode.readout.port2_khz = 10
mode.readout.coupling_mhz = 90

readout.mode = readout
sweep.mode = readout

thermal.source_temperature_k = 4      # HEMT back-radiation stage
)";

inline bool is_builtin(const std::string& name) {
  return name == "nbse2" || name == "al_transmon";
}

inline Config builtin(const std::string& name) {
  if (name == "nbse2") return Config::parse(std::string(nbse2), "builtin:nbse2");
  if (name == "al_transmon")
    return Config::parse(std::string(al_transmon), "builtin:al_transmon");
  throw ConfigError("unknown built-in preset '" + name + "'");
}

// --- config -> model builders ---------------------------------------------

inline SystemModel system_from_config(const Config& cfg) {
  SystemModel sys;
  sys.qubit.frequency_hz = cfg.get_double("qubit.frequency_ghz") * 1e9;
  sys.qubit.anharmonicity_hz = cfg.get_double("qubit.anharmonicity_mhz", 0.0) * 1e6;
  sys.qubit.relaxation_rate = cfg.get_double("qubit.relaxation_rate_per_s", 0.0);
  sys.qubit.dephasing_rate = cfg.get_double("qubit.dephasing_rate_per_s", 0.0);

  if (cfg.has("junction.critical_current_ua")) {
    JunctionParameters j;
    j.critical_current_a = cfg.get_double("junction.critical_current_ua") * 1e-6;
    j.area_m2 = cfg.get_double("junction.area_um2", 0.0) * 1e-12;
    j.barrier_thickness_m = cfg.get_double("junction.barrier_thickness_nm", 0.0) * 1e-9;
    j.relative_permittivity = cfg.get_double("junction.relative_permittivity", 0.0);
    if (j.area_m2 > 0.0 && j.barrier_thickness_m > 0.0 && j.relative_permittivity > 0.0)
      j.capacitance_f = geometric_capacitance(j.area_m2, j.barrier_thickness_m,
                                              j.relative_permittivity);
    sys.junction = j;
  }

  // Mode blocks in file order: collect labels from "mode.<label>.frequency_ghz".
  for (const auto& [key, value] : cfg.entries()) {
    constexpr std::string_view prefix = "mode.";
    constexpr std::string_view suffix = ".frequency_ghz";
    if (key.rfind(prefix, 0) != 0) continue;
    if (key.size() <= prefix.size() + suffix.size()) continue;
    if (key.compare(key.size() - suffix.size(), suffix.size(), suffix) != 0) continue;
    const std::string label =
        key.substr(prefix.size(), key.size() - prefix.size() - suffix.size());
    const std::string base = "mode." + label + ".";

    CavityMode m;
    m.label = label;
    m.frequency_hz = cfg.get_double(base + "frequency_ghz") * 1e9;
    const double total_khz = cfg.get_double(base + "linewidth_khz");
    const double port1_khz = cfg.get_double(base + "port1_khz", 0.0);
    const double port2_khz = cfg.get_double(base + "port2_khz", 0.0);
    if (port1_khz + port2_khz > total_khz)
      throw ConfigError("mode " + label + ": port couplings exceed the total linewidth");
    m.port1_rate = constants::two_pi * port1_khz * 1e3;
    m.port2_rate = constants::two_pi * port2_khz * 1e3;
    m.internal_rate = constants::two_pi * (total_khz - port1_khz - port2_khz) * 1e3;
    if (cfg.has(base + "coupling_mhz")) m.coupling_hz = cfg.get_double(base + "coupling_mhz") * 1e6;
    if (cfg.has(base + "self_kerr_khz")) {
      m.self_kerr_hz = cfg.get_double(base + "self_kerr_khz") * 1e3;
    } else if (m.coupling_hz) {
      const double delta = sys.qubit.frequency_hz - m.frequency_hz;
      if (sys.qubit.anharmonicity_hz != 0.0 && delta != 0.0 &&
          delta != sys.qubit.anharmonicity_hz)
        m.self_kerr_hz =
            kerr_coefficients(sys.qubit.anharmonicity_hz, *m.coupling_hz, delta).cavity_self_kerr_hz;
    }
    sys.modes.push_back(std::move(m));
  }

  sys.validate();
  return sys;
}

inline std::optional<CavityGeometry> geometry_from_config(const Config& cfg) {
  if (!cfg.has("cavity.lx_mm")) return std::nullopt;
  CavityGeometry g = CavityGeometry::centered(cfg.get_double("cavity.lx_mm") * 1e-3,
                                              cfg.get_double("cavity.ly_mm") * 1e-3,
                                              cfg.get_double("cavity.lz_mm") * 1e-3);
  if (cfg.has("cavity.qubit_x_mm")) g.qubit_x_m = cfg.get_double("cavity.qubit_x_mm") * 1e-3;
  if (cfg.has("cavity.qubit_y_mm")) g.qubit_y_m = cfg.get_double("cavity.qubit_y_mm") * 1e-3;
  g.validate();
  return g;
}

// Serialize a device model back into the key-value schema read by
// system_from_config; round trips up to floating-point printing.
inline std::string to_config_text(const SystemModel& sys,
                                  const std::optional<CavityGeometry>& geom = std::nullopt) {
  std::ostringstream out;
  char buf[40];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return std::string(buf);
  };
  out << "qubit.frequency_ghz = " << num(sys.qubit.frequency_hz / 1e9) << "\n";
  out << "qubit.anharmonicity_mhz = " << num(sys.qubit.anharmonicity_hz / 1e6) << "\n";
  out << "qubit.relaxation_rate_per_s = " << num(sys.qubit.relaxation_rate) << "\n";
  out << "qubit.dephasing_rate_per_s = " << num(sys.qubit.dephasing_rate) << "\n";
  if (sys.junction) {
    out << "junction.critical_current_ua = " << num(sys.junction->critical_current_a * 1e6)
        << "\n";
    if (sys.junction->area_m2 > 0.0)
      out << "junction.area_um2 = " << num(sys.junction->area_m2 * 1e12) << "\n";
    if (sys.junction->barrier_thickness_m > 0.0)
      out << "junction.barrier_thickness_nm = " << num(sys.junction->barrier_thickness_m * 1e9)
          << "\n";
    if (sys.junction->relative_permittivity > 0.0)
      out << "junction.relative_permittivity = " << num(sys.junction->relative_permittivity)
          << "\n";
  }
  if (geom) {
    out << "cavity.lx_mm = " << num(geom->lx_m * 1e3) << "\n";
    out << "cavity.ly_mm = " << num(geom->ly_m * 1e3) << "\n";
    out << "cavity.lz_mm = " << num(geom->lz_m * 1e3) << "\n";
    out << "cavity.qubit_x_mm = " << num(geom->qubit_x_m * 1e3) << "\n";
    out << "cavity.qubit_y_mm = " << num(geom->qubit_y_m * 1e3) << "\n";
  }
  for (const auto& m : sys.modes) {
    const std::string base = "mode." + m.label + ".";
    out << base << "frequency_ghz = " << num(m.frequency_hz / 1e9) << "\n";
    out << base << "linewidth_khz = " << num(m.total_rate() / constants::two_pi / 1e3) << "\n";
    out << base << "port1_khz = " << num(m.port1_rate / constants::two_pi / 1e3) << "\n";
    out << base << "port2_khz = " << num(m.port2_rate / constants::two_pi / 1e3) << "\n";
    if (m.coupling_hz) out << base << "coupling_mhz = " << num(*m.coupling_hz / 1e6) << "\n";
    if (m.self_kerr_hz != 0.0)
      out << base << "self_kerr_khz = " << num(m.self_kerr_hz / 1e3) << "\n";
  }
  return out.str();
}

// Driven-qubit model from the rabisim block; the drive is resonant with the
// qubit and routed through the named mode.
inline DrivenQubitModel driven_qubit_from_config(const Config& cfg, const SystemModel& sys) {
  DrivenQubitModel m;
  const std::string mode_label = cfg.get_string("rabisim.mode");
  const CavityMode& mode = sys.mode(mode_label);
  m.coupling_hz = cfg.get_double("rabisim.coupling_mhz") * 1e6;
  m.anharmonicity_hz = cfg.get_double("rabisim.anharmonicity_mhz") * 1e6;
  m.relaxation_rate = sys.qubit.relaxation_rate;
  m.dephasing_rate = sys.qubit.dephasing_rate;
  m.cavity_hz = mode.frequency_hz;
  m.qubit_hz = sys.qubit.frequency_hz;
  m.port1_rate = constants::two_pi * cfg.get_double("rabisim.gamma_port1_khz") * 1e3;
  m.total_rate = constants::two_pi * cfg.get_double("rabisim.gamma_total_khz") * 1e3;
  m.attenuation_db = cfg.get_double("rabisim.attenuation_db", 0.0);
  m.dim = int(cfg.get_double("rabisim.dim", 6));
  return m;
}

}  // namespace cqed::presets
