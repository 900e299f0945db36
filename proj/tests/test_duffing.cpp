#include <catch2/catch.hpp>

#include "cqed/duffing.hpp"

using namespace cqed;

namespace {

CavityMode tm130_like() {
  CavityMode m;
  m.label = "tm130";
  m.frequency_hz = 13.45e9;
  m.port1_rate = constants::two_pi * 10e3;
  m.port2_rate = constants::two_pi * 10e3;
  m.internal_rate = constants::two_pi * 180e3;
  m.coupling_hz = 210e6;
  m.self_kerr_hz = -13.33e3;
  return m;
}

std::vector<double> detuning_grid(const CavityMode& m, double lo_hz, double hi_hz, int n) {
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = m.frequency_hz + lo_hz + (hi_hz - lo_hz) * i / (n - 1);
  return out;
}

// Drive power (dBm at the port) that would park n photons in the linear
// cavity on resonance.
double power_for_photons(const CavityMode& m, double n) {
  const double gamma = m.total_rate();
  const double watts = n * constants::hbar * constants::two_pi * m.frequency_hz * gamma * gamma /
                       (4.0 * m.port1_rate);
  return units::dbm_from_watt(watts);
}

}  // namespace

TEST_CASE("linear cavity is a Lorentzian of width gamma_tot") {
  const CavityMode m = tm130_like();
  const DriveTone on_resonance{m.frequency_hz, -120.0, 0.0};
  const DuffingRoots peak = steady_state_roots(m, 0.0, on_resonance);
  REQUIRE(peak.photons.size() == 1);
  CHECK(peak.stable[0]);

  // Half maximum at half a linewidth detuning.
  const double half_width_hz = m.total_rate() / constants::two_pi / 2.0;
  const DriveTone detuned{m.frequency_hz + half_width_hz, -120.0, 0.0};
  const DuffingRoots half = steady_state_roots(m, 0.0, detuned);
  REQUIRE(half.photons.size() == 1);
  CHECK(half.photons[0] == Approx(0.5 * peak.photons[0]).epsilon(1e-9));

  // Linear-limit occupation matches 4 gamma_1 P / (hbar omega_r gamma_tot^2).
  const double expected = 4.0 * m.port1_rate * units::watt_from_dbm(-120.0) /
                          (constants::hbar * constants::two_pi * m.frequency_hz *
                           m.total_rate() * m.total_rate());
  CHECK(peak.photons[0] == Approx(expected).epsilon(1e-12));
}

TEST_CASE("kerr response matches the Lorentzian in the linear limit") {
  const CavityMode m = tm130_like();
  const double kerr = m.self_kerr_hz;
  // n below 0.01 * half-width / |K|: pointwise agreement within 1%.
  const double power = power_for_photons(m, 0.005 * (m.total_rate() / constants::two_pi) /
                                                std::abs(kerr));
  for (double detuning_hz : {-300e3, -50e3, 0.0, 80e3, 250e3}) {
    const DriveTone tone{m.frequency_hz + detuning_hz, power, 0.0};
    const DuffingRoots lin = steady_state_roots(m, 0.0, tone);
    const DuffingRoots ker = steady_state_roots(m, kerr, tone);
    REQUIRE(lin.photons.size() == 1);
    REQUIRE(ker.photons.size() == 1);
    CHECK(ker.photons[0] == Approx(lin.photons[0]).epsilon(0.01));
  }
}

TEST_CASE("every root satisfies the cubic to 1e-9 relative") {
  const CavityMode m = tm130_like();
  const double power = power_for_photons(m, 40.0);
  const double drive_d = drive_strength(m, units::watt_from_dbm(power));
  int multivalued_points = 0;
  for (int i = 0; i <= 400; ++i) {
    const double detuning_hz = -900e3 + i * (1200e3 / 400.0);
    const DuffingRoots r = steady_state_roots(m, m.self_kerr_hz,
                                              {m.frequency_hz + detuning_hz, power, 0.0});
    REQUIRE(!r.photons.empty());
    if (r.photons.size() == 3) ++multivalued_points;
    for (double n : r.photons) {
      const double shifted =
          constants::two_pi * detuning_hz - constants::two_pi * m.self_kerr_hz * n;
      const double residual =
          (shifted * shifted + 0.25 * m.total_rate() * m.total_rate()) * n - drive_d;
      CHECK(std::abs(residual) <= 1e-9 * drive_d);
    }
  }
  CHECK(multivalued_points > 10);  // the scan actually crossed the bistable window
}

TEST_CASE("line shape turns from symmetric to step-like as power rises") {
  const CavityMode m = tm130_like();
  const auto grid = detuning_grid(m, -500e3, 500e3, 501);
  auto asymmetry = [&](double photons_at_peak) {
    const auto sweep = transmission_sweep(m, m.self_kerr_hz,
                                          power_for_photons(m, photons_at_peak), 0.0, grid,
                                          SweepDirection::Ascending);
    // Compare |S21| mirrored around the bare frequency.
    double worst = 0.0;
    const std::size_t n = grid.size();
    for (std::size_t i = 0; i < n; ++i)
      worst = std::max(worst, std::abs(std::abs(sweep[i].s21) - std::abs(sweep[n - 1 - i].s21)));
    return worst;
  };
  // Deep in the linear regime the trace is symmetric to better than 1%,
  // near threshold it is visibly skewed.
  CHECK(asymmetry(0.05) < 0.01);
  CHECK(asymmetry(12.0) > 0.05);
}

TEST_CASE("softening oscillator peaks below the bare frequency") {
  const CavityMode m = tm130_like();
  const double power = power_for_photons(m, 50.0);
  const auto grid = detuning_grid(m, -900e3, 300e3, 601);
  const auto sweep = transmission_sweep(m, m.self_kerr_hz, power, 0.0, grid,
                                        SweepDirection::Ascending);
  std::size_t best = 0;
  for (std::size_t i = 1; i < sweep.size(); ++i)
    if (std::abs(sweep[i].s21) > std::abs(sweep[best].s21)) best = i;
  CHECK(sweep[best].frequency_hz < m.frequency_hz);
}

TEST_CASE("bistability onset agrees with a dense discriminant scan (oracle)") {
  const CavityMode m = tm130_like();
  const double power = power_for_photons(m, 40.0);
  const auto window = bistable_window(m, m.self_kerr_hz, power, 0.0, -900e3, 300e3);
  REQUIRE(window.has_value());
  CHECK(window->first < window->second);
  CHECK(window->second < 0.0);  // softening: the whole window sits red of the line

  // Oracle: brute-force scan of the drive polynomial D(n) for three sign
  // changes, independent of the closed-form solver.
  const double drive_d = drive_strength(m, units::watt_from_dbm(power));
  const double kerr_rad = constants::two_pi * m.self_kerr_hz;
  auto root_count = [&](double detuning_hz) {
    const double delta = constants::two_pi * detuning_hz;
    int crossings = 0;
    const double n_max = 3.0 * drive_d / (0.25 * m.total_rate() * m.total_rate());
    double prev = -drive_d;  // D(0) - D
    const int steps = 40000;
    for (int i = 1; i <= steps; ++i) {
      const double n = n_max * i / steps;
      const double s = delta - kerr_rad * n;
      const double val = (s * s + 0.25 * m.total_rate() * m.total_rate()) * n - drive_d;
      if ((val >= 0.0) != (prev >= 0.0)) ++crossings;
      prev = val;
    }
    return crossings;
  };
  // Inside the window the cubic has three roots, outside one.
  const double mid = 0.5 * (window->first + window->second);
  CHECK(root_count(mid) == 3);
  const double margin = 0.05 * (window->second - window->first);
  CHECK(root_count(window->first - margin) == 1);
  CHECK(root_count(window->second + margin) == 1);
  CHECK(root_count(window->first + margin) == 3);
  CHECK(root_count(window->second - margin) == 3);
}

TEST_CASE("below threshold ascending and descending sweeps coincide") {
  const CavityMode m = tm130_like();
  const double power = power_for_photons(m, 1.0);  // deep below n_crit
  const auto grid = detuning_grid(m, -600e3, 300e3, 401);
  const auto up = transmission_sweep(m, m.self_kerr_hz, power, 0.0, grid,
                                     SweepDirection::Ascending);
  const auto down = transmission_sweep(m, m.self_kerr_hz, power, 0.0, grid,
                                       SweepDirection::Descending);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(std::abs(up[i].s21 - down[i].s21) == Approx(0.0).margin(1e-12));
    CHECK(up[i].photons == Approx(down[i].photons).epsilon(1e-9));
  }
}

TEST_CASE("hysteresis confined to the bistable window, jumps ordered") {
  const CavityMode m = tm130_like();
  const double power = power_for_photons(m, 40.0);
  const auto grid = detuning_grid(m, -900e3, 300e3, 1201);
  const double step_hz = (grid[1] - grid[0]);
  const auto up = transmission_sweep(m, m.self_kerr_hz, power, 0.0, grid,
                                     SweepDirection::Ascending);
  const auto down = transmission_sweep(m, m.self_kerr_hz, power, 0.0, grid,
                                       SweepDirection::Descending);
  const auto window = bistable_window(m, m.self_kerr_hz, power, 0.0, -900e3, 300e3);
  REQUIRE(window.has_value());

  double differ_lo = 0.0, differ_hi = 0.0;
  bool any = false;
  double up_jump = 0.0, down_jump = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (std::abs(up[i].photons - down[i].photons) >
        1e-6 * std::max(1.0, up[i].photons)) {
      if (!any) differ_lo = grid[i] - m.frequency_hz;
      differ_hi = grid[i] - m.frequency_hz;
      any = true;
    }
    if (i > 0 && std::abs(up[i].photons - up[i - 1].photons) > 0.5 * up[i - 1].photons + 1.0)
      up_jump = grid[i] - m.frequency_hz;
    if (i + 1 < grid.size() &&
        std::abs(down[i].photons - down[i + 1].photons) > 0.5 * down[i + 1].photons + 1.0)
      down_jump = grid[i] - m.frequency_hz;
  }
  REQUIRE(any);
  // Traces differ exactly inside the discriminant window (one grid step).
  CHECK(std::abs(differ_lo - window->first) <= 1.5 * step_hz);
  CHECK(std::abs(differ_hi - window->second) <= 1.5 * step_hz);
  // Softening: the descending sweep falls off the upper branch at or below
  // the ascending jump.
  CHECK(down_jump <= up_jump + 1.5 * step_hz);
}

TEST_CASE("solution sets map exactly under (delta, K) -> (-delta, -K)") {
  const CavityMode m = tm130_like();
  const double drive_d = drive_strength(m, units::watt_from_dbm(power_for_photons(m, 40.0)));
  for (double detuning_hz : {-400e3, -150e3, 0.0, 90e3, 333e3}) {
    const DuffingRoots a = steady_state_photons(constants::two_pi * detuning_hz,
                                                constants::two_pi * m.self_kerr_hz,
                                                m.total_rate(), drive_d);
    const DuffingRoots b = steady_state_photons(-constants::two_pi * detuning_hz,
                                                -constants::two_pi * m.self_kerr_hz,
                                                m.total_rate(), drive_d);
    REQUIRE(a.photons.size() == b.photons.size());
    for (std::size_t i = 0; i < a.photons.size(); ++i) {
      CHECK(a.photons[i] == Approx(b.photons[i]).epsilon(1e-10));
      CHECK(a.stable[i] == b.stable[i]);
    }
  }
}

TEST_CASE("hysteresis map: zero for a linear cavity, wedge flips with the Kerr sign") {
  const CavityMode m = tm130_like();
  std::vector<double> powers;
  for (int i = 0; i < 6; ++i) powers.push_back(power_for_photons(m, 5.0 + 15.0 * i));
  const auto grid = detuning_grid(m, -900e3, 900e3, 301);

  const HysteresisMap flat = hysteresis_map(m, 0.0, powers, 0.0, grid);
  CHECK(flat.difference.cwiseAbs().maxCoeff() == Approx(0.0).margin(1e-12));

  const HysteresisMap soft = hysteresis_map(m, m.self_kerr_hz, powers, 0.0, grid);
  const HysteresisMap hard =
      hysteresis_map(m, effective_kerr(m.self_kerr_hz, 4.0), powers, 0.0, grid);

  double soft_red = 0.0, soft_blue = 0.0, hard_red = 0.0, hard_blue = 0.0;
  for (long p = 0; p < soft.difference.rows(); ++p) {
    for (long f = 0; f < soft.difference.cols(); ++f) {
      const bool red = grid[std::size_t(f)] < m.frequency_hz;
      (red ? soft_red : soft_blue) += std::abs(soft.difference(p, f));
      (red ? hard_red : hard_blue) += std::abs(hard.difference(p, f));
    }
  }
  CHECK(soft_red > 0.0);
  CHECK(soft_blue == Approx(0.0).margin(1e-9));
  CHECK(hard_blue > 0.0);
  CHECK(hard_red == Approx(0.0).margin(1e-9));
  // Mirror wedges of equal weight.
  CHECK(hard_blue == Approx(soft_red).epsilon(1e-6));
}

TEST_CASE("photon number continuous along branches between folds") {
  const CavityMode m = tm130_like();
  const double power = power_for_photons(m, 40.0);
  const auto grid = detuning_grid(m, -900e3, 300e3, 2001);
  const auto up = transmission_sweep(m, m.self_kerr_hz, power, 0.0, grid,
                                     SweepDirection::Ascending);
  int jumps = 0;
  for (std::size_t i = 1; i < up.size(); ++i) {
    const double rel = std::abs(up[i].photons - up[i - 1].photons) /
                       std::max(1.0, up[i - 1].photons);
    if (rel > 0.2) ++jumps;
  }
  CHECK(jumps == 1);  // a single fold jump on this grid
}

TEST_CASE("drive tone validation") {
  DriveTone bad{13.45e9, -100.0, +3.0};
  CHECK_THROWS_AS(bad.validate(), ModelError);
  DriveTone good{13.45e9, -100.0, -85.0};
  CHECK_NOTHROW(good.validate());
  CHECK(good.power_at_port_w() == Approx(units::watt_from_dbm(-185.0)).epsilon(1e-12));
}
