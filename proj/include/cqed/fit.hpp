#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "cqed/constants.hpp"
#include "cqed/errors.hpp"

// Parameter extraction: small nonlinear least-squares models fitted with
// Levenberg-Marquardt damping and analytic Jacobians, plus the closed-form
// thermal-photon relations. All fits are pure per-trace.

namespace cqed {

struct Trace {
  std::vector<double> x;      // Hz or s
  std::vector<double> y;
  std::vector<double> sigma;  // optional per-point uncertainties

  void validate() const {
    if (x.size() != y.size()) throw ModelError("trace: x and y lengths differ");
    if (!sigma.empty() && sigma.size() != x.size())
      throw ModelError("trace: sigma length differs");
    for (std::size_t i = 1; i < x.size(); ++i)
      if (x[i] <= x[i - 1]) throw ModelError("trace: x grid must be strictly monotone");
  }
};

struct FitResult {
  std::vector<std::string> names;
  Eigen::VectorXd values;
  Eigen::VectorXd sigmas;
  double residual_norm = 0.0;
  bool converged = false;
  int iterations = 0;
  std::string message;

  double value(const std::string& name) const { return values[index(name)]; }
  double sigma(const std::string& name) const { return sigmas[index(name)]; }

 private:
  std::size_t index(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
      if (names[i] == name) return i;
    throw ModelError("fit result: no parameter '" + name + "'");
  }
};

namespace detail {

struct LmModel {
  std::function<double(double, const Eigen::VectorXd&)> eval;
  std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)> grad;
};

struct LmOptions {
  int max_iterations = 200;
  double step_tolerance = 1e-10;
};

inline FitResult levenberg_marquardt(const LmModel& model, const Trace& trace,
                                     std::vector<std::string> names, Eigen::VectorXd p,
                                     const LmOptions& opts = {}) {
  const int n = int(trace.x.size());
  const int k = int(p.size());

  auto residuals = [&](const Eigen::VectorXd& params) {
    Eigen::VectorXd r(n);
    for (int i = 0; i < n; ++i) r[i] = model.eval(trace.x[i], params) - trace.y[i];
    return r;
  };
  auto jacobian = [&](const Eigen::VectorXd& params) {
    Eigen::MatrixXd j(n, k);
    for (int i = 0; i < n; ++i) j.row(i) = model.grad(trace.x[i], params).transpose();
    return j;
  };

  Eigen::VectorXd r = residuals(p);
  double cost = r.squaredNorm();
  double lambda = 1e-3;
  int iter = 0;
  bool converged = false;

  for (; iter < opts.max_iterations; ++iter) {
    const Eigen::MatrixXd j = jacobian(p);
    const Eigen::MatrixXd jtj = j.transpose() * j;
    const Eigen::VectorXd jtr = j.transpose() * r;
    bool stepped = false;
    for (int attempt = 0; attempt < 40; ++attempt) {
      Eigen::MatrixXd damped = jtj;
      for (int d = 0; d < k; ++d)
        damped(d, d) += lambda * std::max(jtj(d, d), 1e-300);
      const Eigen::VectorXd step = damped.ldlt().solve(-jtr);
      if (!step.allFinite()) {
        lambda *= 10.0;
        continue;
      }
      const Eigen::VectorXd candidate = p + step;
      const Eigen::VectorXd rc = residuals(candidate);
      const double cost_c = rc.squaredNorm();
      if (cost_c <= cost) {
        const double rel_step = step.norm() / std::max(p.norm(), 1e-300);
        p = candidate;
        r = rc;
        const double improvement = cost - cost_c;
        cost = cost_c;
        lambda = std::max(lambda * 0.1, 1e-14);
        stepped = true;
        if (rel_step < opts.step_tolerance ||
            improvement <= 1e-28 * std::max(cost, 1e-300))
          converged = true;
        break;
      }
      lambda *= 10.0;
    }
    if (!stepped || converged) break;
  }

  FitResult out;
  out.names = std::move(names);
  out.values = p;
  out.residual_norm = std::sqrt(cost);
  out.converged = converged;
  out.iterations = iter;

  // 1-sigma uncertainties from the inverse normal matrix scaled by the
  // residual variance.
  const Eigen::MatrixXd j = jacobian(p);
  const Eigen::MatrixXd jtj = j.transpose() * j;
  const double dof = std::max(1, n - k);
  const double variance = cost / dof;
  Eigen::MatrixXd cov = jtj.completeOrthogonalDecomposition().pseudoInverse() * variance;
  out.sigmas.resize(k);
  for (int d = 0; d < k; ++d) out.sigmas[d] = std::sqrt(std::max(0.0, cov(d, d)));
  return out;
}

inline double span(const std::vector<double>& x) { return x.back() - x.front(); }

}  // namespace detail

// --- Lorentzian resonance ------------------------------------------------
//
// y = offset + amplitude / (1 + ((x - f0) / (width/2))^2), width = FWHM.
inline FitResult fit_lorentzian(const Trace& trace) {
  trace.validate();
  if (trace.x.size() < 8) throw ModelError("fit_lorentzian: need at least 8 points");

  const auto [min_it, max_it] = std::minmax_element(trace.y.begin(), trace.y.end());
  const double offset0 = *min_it;
  const double amp0 = *max_it - *min_it;
  const double f0_0 = trace.x[std::distance(trace.y.begin(), max_it)];

  const double y_scale = std::max(std::abs(*max_it), std::abs(*min_it));
  if (amp0 <= 1e-12 * std::max(1.0, y_scale)) {
    FitResult flat;
    flat.names = {"f0", "width", "amplitude", "offset"};
    flat.values = Eigen::Vector4d(f0_0, 0.0, 0.0, offset0);
    flat.sigmas = Eigen::Vector4d::Zero();
    flat.message = "no peak: trace is flat";
    return flat;
  }

  // Half-maximum crossing distance as the initial width.
  double width0 = detail::span(trace.x) / 10.0;
  for (std::size_t i = 0; i < trace.x.size(); ++i) {
    if (trace.y[i] - offset0 > 0.5 * amp0) {
      double hi = trace.x[i];
      for (std::size_t j = trace.x.size(); j-- > 0;) {
        if (trace.y[j] - offset0 > 0.5 * amp0) {
          hi = trace.x[j];
          break;
        }
      }
      width0 = std::max(hi - trace.x[i], detail::span(trace.x) / double(trace.x.size()));
      break;
    }
  }

  detail::LmModel model;
  model.eval = [](double x, const Eigen::VectorXd& p) {
    const double u = (x - p[0]) / (0.5 * p[1]);
    return p[3] + p[2] / (1.0 + u * u);
  };
  model.grad = [](double x, const Eigen::VectorXd& p) {
    const double hw = 0.5 * p[1];
    const double u = (x - p[0]) / hw;
    const double denom = 1.0 + u * u;
    Eigen::VectorXd g(4);
    g[0] = p[2] * 2.0 * u / (denom * denom * hw);
    g[1] = p[2] * u * u / (denom * denom * p[1]) * 2.0;
    g[2] = 1.0 / denom;
    g[3] = 1.0;
    return g;
  };

  Eigen::VectorXd p0(4);
  p0 << f0_0, width0, amp0, offset0;
  FitResult res = detail::levenberg_marquardt(model, trace, {"f0", "width", "amplitude", "offset"}, p0);
  res.values[1] = std::abs(res.values[1]);
  if (res.value("f0") < trace.x.front() || res.value("f0") > trace.x.back()) {
    res.converged = false;
    res.message = "fitted center outside the grid";
  }
  return res;
}

// --- Exponential recovery ------------------------------------------------
//
// y = offset - amplitude * exp(-t / T1); for a relaxation trace offset ~ 1.
inline FitResult fit_exponential(const Trace& trace) {
  trace.validate();
  if (trace.x.size() < 6) throw ModelError("fit_exponential: need at least 6 points");

  const double offset0 = trace.y.back();
  const double amp0 = offset0 - trace.y.front();
  const auto [min_it, max_it] = std::minmax_element(trace.y.begin(), trace.y.end());
  if (std::abs(amp0) <= 1e-12 * std::max(1.0, std::abs(*max_it)) ||
      *max_it - *min_it <= 1e-12 * std::max(1.0, std::abs(*max_it))) {
    FitResult flat;
    flat.names = {"t1", "amplitude", "offset"};
    flat.values = Eigen::Vector3d(0.0, 0.0, offset0);
    flat.sigmas = Eigen::Vector3d::Zero();
    flat.message = "no decay: trace is flat";
    return flat;
  }
  const double t1_0 = detail::span(trace.x) / 3.0;

  detail::LmModel model;
  model.eval = [](double t, const Eigen::VectorXd& p) {
    return p[2] - p[1] * std::exp(-t / p[0]);
  };
  model.grad = [](double t, const Eigen::VectorXd& p) {
    const double e = std::exp(-t / p[0]);
    Eigen::VectorXd g(3);
    g[0] = -p[1] * e * t / (p[0] * p[0]);
    g[1] = -e;
    g[2] = 1.0;
    return g;
  };

  Eigen::VectorXd p0(3);
  p0 << t1_0, amp0, offset0;
  return detail::levenberg_marquardt(model, trace, {"t1", "amplitude", "offset"}, p0);
}

// --- Damped sinusoid -----------------------------------------------------
//
// y = offset + amplitude * exp(-decay t) * cos(2 pi f t + phase). The
// initial frequency comes from a dense discrete-spectrum scan; if the
// refinement does not converge the spectral peak itself is reported
// (message "dft fallback").

namespace detail {

// Peak of |sum (y - mean) e^{-2 pi i f t}| over an oversampled frequency
// grid, plus the complex amplitude at the peak. An expected-frequency band
// can narrow the search when a prior is available.
inline std::pair<double, std::complex<double>> spectrum_peak(const Trace& trace,
                                                             double band_min_hz = 0.0,
                                                             double band_max_hz = 0.0) {
  const int n = int(trace.x.size());
  const double total = span(trace.x);
  double mean = 0.0;
  for (double v : trace.y) mean += v;
  mean /= n;

  const double f_min = (band_min_hz > 0.0) ? band_min_hz : 0.25 / total;
  const double f_max =
      (band_max_hz > band_min_hz && band_max_hz > 0.0) ? band_max_hz : 0.5 * n / total;
  const int count = 8 * n;
  double best_f = f_min, best_mag = -1.0;
  std::complex<double> best_amp;
  for (int i = 0; i <= count; ++i) {
    const double f = f_min + (f_max - f_min) * i / count;
    std::complex<double> acc = 0.0;
    for (int j = 0; j < n; ++j)
      acc += (trace.y[j] - mean) *
             std::exp(std::complex<double>(0.0, -constants::two_pi * f * trace.x[j]));
    if (std::abs(acc) > best_mag) {
      best_mag = std::abs(acc);
      best_f = f;
      best_amp = acc;
    }
  }
  return {best_f, best_amp * (2.0 / double(n))};
}

}  // namespace detail

inline FitResult fit_damped_sinusoid(const Trace& trace, double band_min_hz = 0.0,
                                     double band_max_hz = 0.0) {
  trace.validate();
  if (trace.x.size() < 8) throw ModelError("fit_damped_sinusoid: need at least 8 points");

  const auto [f0, amp_c] = detail::spectrum_peak(trace, band_min_hz, band_max_hz);
  const double record_periods = detail::span(trace.x) * f0;
  double mean = 0.0;
  for (double v : trace.y) mean += v;
  mean /= double(trace.y.size());

  if (record_periods < 2.0 || std::abs(amp_c) < 1e-12) {
    FitResult bad;
    bad.names = {"frequency", "decay", "phase", "amplitude", "offset"};
    bad.values = Eigen::VectorXd::Zero(5);
    bad.values[0] = f0;
    bad.values[4] = mean;
    bad.sigmas = Eigen::VectorXd::Zero(5);
    bad.message = "under-resolved oscillation";
    return bad;
  }

  detail::LmModel model;
  model.eval = [](double t, const Eigen::VectorXd& p) {
    return p[4] + p[3] * std::exp(-p[1] * t) * std::cos(constants::two_pi * p[0] * t + p[2]);
  };
  model.grad = [](double t, const Eigen::VectorXd& p) {
    const double e = std::exp(-p[1] * t);
    const double arg = constants::two_pi * p[0] * t + p[2];
    const double c = std::cos(arg), s = std::sin(arg);
    Eigen::VectorXd g(5);
    g[0] = -p[3] * e * s * constants::two_pi * t;
    g[1] = -p[3] * e * c * t;
    g[2] = -p[3] * e * s;
    g[3] = e * c;
    g[4] = 1.0;
    return g;
  };

  Eigen::VectorXd p0(5);
  p0 << f0, 0.5 / detail::span(trace.x), std::arg(amp_c), std::abs(amp_c), mean;
  FitResult res = detail::levenberg_marquardt(
      model, trace, {"frequency", "decay", "phase", "amplitude", "offset"}, p0);
  res.values[0] = std::abs(res.values[0]);
  if (!res.converged) {
    res.values[0] = f0;
    res.message = "dft fallback";
  }
  return res;
}

// --- Coupling from the dressed-frequency relation ------------------------
//
// Linear fit of nu_r' against nu_q'; the slope m = -4 g^2 / (Delta(Delta -
// alpha)) gives g = sqrt(-m Delta (Delta - alpha) / 4). The result depends
// on the slope only, so common offsets on both axes drop out.
inline FitResult fit_coupling_from_dressed(const std::vector<std::pair<double, double>>& pairs,
                                           double detuning_hz, double anharmonicity_hz) {
  if (pairs.size() < 3) throw ModelError("fit_coupling_from_dressed: need at least 3 pairs");

  // Centered sums: the anchors sit at ~1e10 Hz while the shifts are ~1e6,
  // so the raw normal equations would lose the signal to cancellation.
  const int n = int(pairs.size());
  double mean_q = 0, mean_r = 0;
  for (const auto& [q, r] : pairs) {
    mean_q += q;
    mean_r += r;
  }
  mean_q /= n;
  mean_r /= n;
  double sqq = 0, sqr = 0;
  for (const auto& [q, r] : pairs) {
    sqq += (q - mean_q) * (q - mean_q);
    sqr += (q - mean_q) * (r - mean_r);
  }
  if (sqq == 0.0) throw ModelError("fit_coupling_from_dressed: degenerate qubit-frequency grid");
  const double slope = sqr / sqq;

  double rss = 0.0;
  for (const auto& [q, r] : pairs) {
    const double d = (r - mean_r) - slope * (q - mean_q);
    rss += d * d;
  }
  const double slope_sigma = (n > 2) ? std::sqrt((rss / (n - 2)) / sqq) : 0.0;

  FitResult out;
  out.names = {"g", "slope"};
  out.values = Eigen::Vector2d::Zero();
  out.sigmas = Eigen::Vector2d::Zero();
  out.residual_norm = std::sqrt(rss);
  out.iterations = 1;

  const double product = -slope * detuning_hz * (detuning_hz - anharmonicity_hz) / 4.0;
  out.values[1] = slope;
  out.sigmas[1] = slope_sigma;
  if (product < 0.0) {
    out.message = "slope sign incompatible with a real coupling";
    return out;
  }
  const double g = std::sqrt(product);
  out.values[0] = g;
  out.sigmas[0] = (g > 0.0 && slope != 0.0) ? 0.5 * g * slope_sigma / std::abs(slope) : 0.0;
  out.converged = true;
  return out;
}

// --- Self-Kerr from the power-dependent cavity shift ----------------------
//
// nu_r'(P) = nu_r + (K_a/2) n with n = P / (gamma hbar omega_r) photons in
// a critically coupled cavity. Powers arrive in dBm at the instrument and
// are attenuated before the port. Also inverts K_a = alpha (g/Delta)^4 for
// the coupling, with a K_a-vs-alpha sign-consistency flag.
inline FitResult fit_self_kerr(const Trace& power_dbm_vs_freq, double cavity_rate,
                               double cavity_hz, double attenuation_db,
                               double anharmonicity_hz, double detuning_hz) {
  power_dbm_vs_freq.validate();
  if (power_dbm_vs_freq.x.size() < 3) throw ModelError("fit_self_kerr: need at least 3 points");
  if (cavity_rate <= 0.0 || cavity_hz <= 0.0)
    throw ModelError("fit_self_kerr: cavity parameters must be > 0");

  const double hbar_omega = constants::hbar * constants::two_pi * cavity_hz;
  const int n = int(power_dbm_vs_freq.x.size());
  std::vector<double> photons(n);
  for (int i = 0; i < n; ++i)
    photons[i] =
        units::watt_from_dbm(power_dbm_vs_freq.x[i], attenuation_db) / (cavity_rate * hbar_omega);

  double mean_n = 0, mean_y = 0;
  for (int i = 0; i < n; ++i) {
    mean_n += photons[i];
    mean_y += power_dbm_vs_freq.y[i];
  }
  mean_n /= n;
  mean_y /= n;
  double snn = 0, sny = 0;
  for (int i = 0; i < n; ++i) {
    snn += (photons[i] - mean_n) * (photons[i] - mean_n);
    sny += (photons[i] - mean_n) * (power_dbm_vs_freq.y[i] - mean_y);
  }
  if (snn == 0.0) throw ModelError("fit_self_kerr: degenerate photon-number grid");
  const double slope = sny / snn;  // Hz per photon = K_a/2
  const double intercept = mean_y - slope * mean_n;

  double rss = 0.0;
  for (int i = 0; i < n; ++i) {
    const double d = power_dbm_vs_freq.y[i] - (intercept + slope * photons[i]);
    rss += d * d;
  }
  const double slope_sigma = (n > 2) ? std::sqrt((rss / (n - 2)) / snn) : 0.0;

  const double kerr_hz = 2.0 * slope;
  FitResult out;
  out.names = {"kerr", "f0", "g"};
  out.values = Eigen::Vector3d(kerr_hz, intercept, 0.0);
  out.sigmas = Eigen::Vector3d(2.0 * slope_sigma, 0.0, 0.0);
  out.residual_norm = std::sqrt(rss);
  out.iterations = 1;

  if (kerr_hz != 0.0 && anharmonicity_hz != 0.0 &&
      std::signbit(kerr_hz) != std::signbit(anharmonicity_hz)) {
    out.message = "self-Kerr and anharmonicity signs disagree";
    return out;
  }
  if (anharmonicity_hz != 0.0)
    out.values[2] = std::abs(detuning_hz) * std::pow(std::abs(kerr_hz / anharmonicity_hz), 0.25);
  out.converged = true;
  return out;
}

// --- Thermal photons -------------------------------------------------------

// Equal input/output couplings: radiated balance k_B T_source gamma =
// 2 gamma k_B T_cav, so the cavity sits at half the source temperature.
inline double thermal_cavity_temperature(double source_temperature_k) {
  if (source_temperature_k <= 0.0)
    throw ModelError("thermal_cavity_temperature: source temperature must be > 0");
  return 0.5 * source_temperature_k;
}

inline double bose_occupation(double frequency_hz, double temperature_k) {
  if (temperature_k <= 0.0) return 0.0;
  return 1.0 / std::expm1(constants::planck_h * frequency_hz /
                          (constants::boltzmann_k * temperature_k));
}

// --- Systematic-sensitivity helper ----------------------------------------
//
// Evaluate a quantity while scanning one input over a decade around its
// nominal value, five points per half-decade side; returns (input, output)
// samples for a coarse systematic band.
inline std::vector<std::pair<double, double>> sensitivity_scan(
    const std::function<double(double)>& quantity, double nominal, int points_per_decade = 5) {
  std::vector<std::pair<double, double>> out;
  for (int k = -points_per_decade; k <= points_per_decade; ++k) {
    const double value = nominal * std::pow(10.0, double(k) / (2.0 * points_per_decade));
    out.emplace_back(value, quantity(value));
  }
  return out;
}

}  // namespace cqed
