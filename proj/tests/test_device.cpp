#include <catch2/catch.hpp>

#include "cqed/device.hpp"

using namespace cqed;

TEST_CASE("charging energy") {
  // e^2/(2Ch) evaluated directly with the CODATA constants.
  CHECK(charging_energy(15e-12).hz == Approx(1.29135e6).epsilon(1e-4));
  CHECK(charging_energy(30e-12).hz == Approx(0.5 * charging_energy(15e-12).hz).epsilon(1e-12));
  // EPR input capacitance stays within 10% of the quoted anharmonicity.
  CHECK(charging_energy(15.3e-12).hz == Approx(1.37e6).epsilon(0.10));
  CHECK_THROWS_AS(charging_energy(0.0), ModelError);
}

TEST_CASE("josephson energy") {
  CHECK(josephson_energy(31e-6).hz == Approx(15.3972e12).epsilon(1e-4));
  CHECK(josephson_energy(20e-9).hz == Approx(9.93367e9).epsilon(1e-4));
  CHECK(josephson_energy(62e-6).hz == Approx(2.0 * josephson_energy(31e-6).hz).epsilon(1e-12));
}

TEST_CASE("junction inductance") {
  CHECK(junction_inductance(31e-6) == Approx(1.04e-11).epsilon(0.03));
  CHECK(junction_inductance(20e-9) == Approx(16.455e-9).epsilon(1e-4));
  CHECK(junction_inductance(31e-6) * 31e-6 ==
        Approx(junction_inductance(20e-9) * 20e-9).epsilon(1e-12));
}

TEST_CASE("geometric capacitance") {
  CHECK(geometric_capacitance(88e-12, 1e-9, 20.0) == Approx(15.6e-12).epsilon(0.01));
  CHECK(geometric_capacitance(88e-12, 2e-9, 20.0) ==
        Approx(0.5 * geometric_capacitance(88e-12, 1e-9, 20.0)).epsilon(1e-12));
  CHECK(geometric_capacitance(1.0, 1.0, 1.0) == Approx(constants::vacuum_permittivity));
}

TEST_CASE("transmon frequency and critical-current inversion") {
  const Energy ec = charging_energy(15e-12);
  const Energy ej = josephson_energy(31e-6);
  const double nu_q = transmon_frequency(ej, ec);
  CHECK(nu_q == Approx(12.611e9).epsilon(0.03));

  SECTION("inverse solve recovers I_c") {
    const double ic = critical_current_from_frequency(12.611e9, 15e-12);
    CHECK(ic == Approx(31e-6).epsilon(0.01));
    // Round trip to 1e-9 relative, both directions.
    const double nu_round = transmon_frequency(josephson_energy(ic), ec);
    CHECK(nu_round == Approx(12.611e9).epsilon(1e-9));
    const double ic_round = critical_current_from_frequency(nu_q, 15e-12);
    CHECK(ic_round == Approx(31e-6).epsilon(1e-9));
  }

  SECTION("sqrt scaling in E_J") {
    const Energy ej4 = {4.0 * ej.joules, 4.0 * ej.hz};
    const double plasma = nu_q + ec.hz;        // sqrt(8 E_J E_C)/h part
    const double plasma4 = transmon_frequency(ej4, ec) + ec.hz;
    CHECK(plasma4 == Approx(2.0 * plasma).epsilon(1e-12));
  }

  SECTION("outside transmon regime") {
    CHECK_THROWS_AS(transmon_frequency(ec, ej), ModelError);
  }
}

TEST_CASE("zero-point phase") {
  const Energy half = {1.0, 1.0 / constants::planck_h};
  const Energy full = {2.0, 2.0 / constants::planck_h};
  CHECK(zero_point_phase(half, full) == Approx(1.0));
  // Direct evaluation of (2 E_C/E_J)^(1/4) for the quoted junction energies.
  const Energy ec = {1.3e6 * constants::planck_h, 1.3e6};
  const Energy ej = {15.4e12 * constants::planck_h, 15.4e12};
  CHECK(zero_point_phase(ec, ej) == Approx(0.0202704).epsilon(1e-4));
  const Energy ec2 = {2.6e6 * constants::planck_h, 2.6e6};
  CHECK(zero_point_phase(ec2, ej) > zero_point_phase(ec, ej));
}

TEST_CASE("kerr coefficients") {
  SECTION("TM130-like parameters") {
    const KerrCoefficients k = kerr_coefficients(-1.3e6, 257e6, -839e6);
    CHECK(k.cavity_self_kerr_hz == Approx(-11.445e3).epsilon(1e-3));
    CHECK(std::abs(k.cavity_self_kerr_hz) == Approx(13.33e3).epsilon(0.2));
    CHECK(k.cavity_self_kerr_hz < 0.0);
    CHECK(k.qubit_self_kerr_hz == Approx(-1.3e6));
  }

  SECTION("uncoupled limit") {
    const KerrCoefficients k = kerr_coefficients(-1.3e6, 0.0, -839e6);
    CHECK(k.cavity_self_kerr_hz == 0.0);
    CHECK(k.cross_kerr_hz == 0.0);
  }

  SECTION("cross-Kerr sign (symbolic sign oracle)") {
    for (double alpha : {-1.3e6, 2.0e6}) {
      for (double delta : {-839e6, 5.4e9}) {
        const KerrCoefficients k = kerr_coefficients(alpha, 67e6, delta);
        const double sign_expected = -alpha * delta * (delta - alpha);
        CHECK(std::signbit(k.cross_kerr_hz) == std::signbit(sign_expected));
      }
    }
  }

  SECTION("K_a shares the anharmonicity sign (softening regime)") {
    for (double delta : {-839e6, 874e6, 5.4237e9})
      CHECK(kerr_coefficients(-1.3e6, 67e6, delta).cavity_self_kerr_hz < 0.0);
  }

  SECTION("dispersive breakdown") {
    CHECK_THROWS_AS(kerr_coefficients(-1.3e6, 67e6, 0.0), ModelError);
    CHECK_THROWS_AS(kerr_coefficients(-1.3e6, 67e6, -1.3e6), ModelError);
  }
}

namespace {

SystemModel tm110_system(double coupling_hz = 67e6) {
  SystemModel sys;
  sys.qubit = {12.611e9, -1.3e6, 0.153e6, 0.0765e6};
  CavityMode m;
  m.label = "tm110";
  m.frequency_hz = 7.1873e9;
  m.port1_rate = constants::two_pi * 10e3;
  m.port2_rate = constants::two_pi * 10e3;
  m.internal_rate = constants::two_pi * 33e3;
  m.coupling_hz = coupling_hz;
  sys.modes.push_back(m);
  return sys;
}

}  // namespace

TEST_CASE("dressed frequencies") {
  const SystemModel sys = tm110_system();

  SECTION("no excitation leaves bare frequencies") {
    const DressedFrequencies d = dressed_frequencies(sys, 0, 0.0);
    CHECK(d.cavity_hz == Approx(7.1873e9));
    CHECK(d.qubit_hz == Approx(12.611e9));
  }

  SECTION("slope matches -4g^2/(Delta(Delta-alpha)) (finite-difference oracle)") {
    const double slope_analytic =
        dressed_slope(67e6, sys.qubit_mode_detuning_hz(0), sys.qubit.anharmonicity_hz);
    std::vector<double> nb_grid{0.0, 0.5, 1.0, 2.0, 4.0};
    for (std::size_t i = 1; i < nb_grid.size(); ++i) {
      const DressedFrequencies lo = dressed_frequencies(sys, 0, nb_grid[i - 1]);
      const DressedFrequencies hi = dressed_frequencies(sys, 0, nb_grid[i]);
      const double slope_fd = (hi.cavity_hz - lo.cavity_hz) / (hi.qubit_hz - lo.qubit_hz);
      CHECK(slope_fd == Approx(slope_analytic).epsilon(1e-6));
    }
    // Small-shift magnitude for negligible anharmonicity.
    CHECK(dressed_slope(67e6, 5.424e9, 0.0) == Approx(-6.1022e-4).epsilon(1e-3));
  }

  SECTION("shifts are linear in n_b") {
    const DressedFrequencies one = dressed_frequencies(sys, 0, 1.5);
    const DressedFrequencies two = dressed_frequencies(sys, 0, 3.0);
    CHECK(two.cavity_hz - 7.1873e9 == Approx(2.0 * (one.cavity_hz - 7.1873e9)).epsilon(1e-12));
    CHECK(two.qubit_hz - 12.611e9 == Approx(2.0 * (one.qubit_hz - 12.611e9)).epsilon(1e-12));
  }

  SECTION("negative n_b rejected") {
    CHECK_THROWS_AS(dressed_frequencies(sys, 0, -1.0), ModelError);
  }
}

TEST_CASE("critical input power") {
  // Al-transmon parameter set from the device presets. The formula value
  // is frozen from direct evaluation of E_J (omega_r/omega_q) (Delta/g)^2
  // gamma; see also the acceptance suite.
  const CriticalPower p =
      critical_input_power(20e-9, 7.5e9, 5.7e9, 90e6, constants::two_pi * 200e3);
  CHECK(p.watts == Approx(4.35333e-15).epsilon(1e-4));
  CHECK(p.dbm == Approx(-113.612).margin(0.01));

  SECTION("NbSe2 junction pushes the critical power up by ~3 orders") {
    const CriticalPower nb =
        critical_input_power(31e-6, 7.1873e9, 12.611e9, 67e6, constants::two_pi * 53e3);
    const double orders = std::log10(nb.watts / p.watts);
    CHECK(orders > 3.0);
    CHECK(orders < 5.0);
  }

  SECTION("linear in gamma") {
    const CriticalPower doubled =
        critical_input_power(20e-9, 7.5e9, 5.7e9, 90e6, 2.0 * constants::two_pi * 200e3);
    CHECK(doubled.watts == Approx(2.0 * p.watts).epsilon(1e-12));
  }

  SECTION("g = 0 is an error") {
    CHECK_THROWS_AS(critical_input_power(20e-9, 7.5e9, 5.7e9, 0.0, 1e5), ModelError);
  }
}

TEST_CASE("effective Kerr sign flip") {
  const double k_a = -13.33e3;
  CHECK(effective_kerr(k_a, 0.0) == Approx(k_a));
  CHECK(effective_kerr(k_a, 2.0) == Approx(0.0).margin(1e-12));
  CHECK(effective_kerr(k_a, 4.0) > 0.0);  // softening turned hardening
  CHECK(effective_kerr(k_a, 4.0) == Approx(-k_a).epsilon(1e-12));
  CHECK_THROWS_AS(effective_kerr(k_a, -0.5), ModelError);
}

TEST_CASE("composed junction chain reproduces the anharmonicity") {
  const double c = geometric_capacitance(88e-12, 1e-9, 20.0);
  CHECK(c == Approx(15e-12).epsilon(0.10));
  CHECK(charging_energy(c).hz == Approx(1.29e6).epsilon(0.05));
}

TEST_CASE("system model validation") {
  SystemModel sys = tm110_system();
  CHECK_NOTHROW(sys.validate());
  sys.modes.push_back(sys.modes[0]);
  CHECK_THROWS_AS(sys.validate(), ModelError);
  CHECK_THROWS_AS(sys.mode("tm999"), ModelError);
  CHECK_THROWS_AS(sys.mode(7), ModelError);
}
