#pragma once

#include <cmath>
#include <complex>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "cqed/constants.hpp"
#include "cqed/errors.hpp"
#include "cqed/fock.hpp"

// Lindblad master-equation propagation. The generator is built once as a
// dense superoperator on vec(rho) and integrated with fixed-step RK4; at
// the dimensions used here (<= ~12 levels) that is both exact enough and
// fast. RK4 is a linear combination of applications of the generator, and
// trace(L x) = 0 for any x, so the trace is preserved to rounding.

namespace cqed {

struct CollapseOperator {
  FockOperator op;
  double rate_per_s = 0.0;
};

struct LindbladSpec {
  FockOperator hamiltonian;                 // simulation units (2pi GHz)
  std::vector<CollapseOperator> collapses;  // rates in 1/s
  ComplexMatrix initial_state;              // density matrix
  std::vector<double> times_s;              // output grid, seconds, ascending

  void validate() const {
    const int d = hamiltonian.dim;
    if (initial_state.rows() != d || initial_state.cols() != d)
      throw ModelError("lindblad: initial state dimension mismatch");
    for (const auto& c : collapses) {
      if (c.rate_per_s < 0.0) throw ModelError("lindblad: collapse rates must be >= 0");
      if (c.op.dim != d) throw ModelError("lindblad: collapse operator dimension mismatch");
    }
    if ((initial_state - initial_state.adjoint().eval()).norm() > 1e-10 * std::max(1.0, initial_state.norm()))
      throw ModelError("lindblad: initial state not Hermitian");
    if (std::abs(initial_state.trace().real() - 1.0) > 1e-10 ||
        std::abs(initial_state.trace().imag()) > 1e-10)
      throw ModelError("lindblad: initial state trace must be 1");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(initial_state);
    if (es.eigenvalues().minCoeff() < -1e-10)
      throw ModelError("lindblad: initial state not positive semidefinite");
    for (std::size_t i = 1; i < times_s.size(); ++i)
      if (times_s[i] <= times_s[i - 1])
        throw ModelError("lindblad: time grid must be strictly ascending");
  }
};

namespace detail {

inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (long i = 0; i < a.rows(); ++i)
    for (long j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace detail

// Right-hand side -i[H, rho] + sum_k Gamma_k (C rho C+ - 1/2 {C+C, rho}),
// everything already in simulation units. Kept as the independent route
// the superoperator construction is checked against.
inline ComplexMatrix lindblad_rhs(const FockOperator& h_sim,
                                  const std::vector<std::pair<FockOperator, double>>& collapses_sim,
                                  const ComplexMatrix& rho) {
  const std::complex<double> i_unit(0.0, 1.0);
  ComplexMatrix out = -i_unit * (h_sim.entries * rho - rho * h_sim.entries);
  for (const auto& [c, rate] : collapses_sim) {
    const ComplexMatrix cdc = c.entries.adjoint() * c.entries;
    out += rate * (c.entries * rho * c.entries.adjoint() - 0.5 * (cdc * rho + rho * cdc));
  }
  return out;
}

// Dense superoperator acting on column-stacked rho, in simulation units.
inline ComplexMatrix build_liouvillian(const FockOperator& h_sim,
                                       const std::vector<std::pair<FockOperator, double>>& collapses_sim) {
  const int d = h_sim.dim;
  const ComplexMatrix eye = ComplexMatrix::Identity(d, d);
  const std::complex<double> i_unit(0.0, 1.0);
  ComplexMatrix L = -i_unit * (detail::kron(eye, h_sim.entries) -
                               detail::kron(h_sim.entries.transpose(), eye));
  for (const auto& [c, rate] : collapses_sim) {
    const ComplexMatrix cdc = c.entries.adjoint() * c.entries;
    L += rate * (detail::kron(c.entries.conjugate(), c.entries) -
                 0.5 * detail::kron(eye, cdc) -
                 0.5 * detail::kron(cdc.transpose(), eye));
  }
  return L;
}

struct EvolutionResult {
  std::vector<double> times_s;
  std::vector<ComplexMatrix> states;

  // Population of Fock level k along the trajectory.
  std::vector<double> population(int k) const {
    std::vector<double> out(states.size());
    for (std::size_t i = 0; i < states.size(); ++i) out[i] = states[i](k, k).real();
    return out;
  }

  std::vector<double> expectation_series(const FockOperator& op) const {
    std::vector<double> out(states.size());
    for (std::size_t i = 0; i < states.size(); ++i)
      out[i] = expectation(op, states[i]).real();
    return out;
  }
};

inline EvolutionResult lindblad_evolve(const LindbladSpec& spec) {
  spec.validate();
  const int d = spec.hamiltonian.dim;

  std::vector<std::pair<FockOperator, double>> collapses_sim;
  collapses_sim.reserve(spec.collapses.size());
  double rate_scale = 0.0;
  for (const auto& c : spec.collapses) {
    const double rate_sim = units::sim_from_rate(c.rate_per_s);
    collapses_sim.emplace_back(c.op, rate_sim);
    rate_scale += rate_sim * (c.op.entries.adjoint() * c.op.entries)
                                 .cwiseAbs().rowwise().sum().maxCoeff();
  }
  const ComplexMatrix liouvillian = build_liouvillian(spec.hamiltonian, collapses_sim);

  // Step choice: 1/(50 * spectral scale of the generator), never coarser
  // than a tenth of the output spacing.
  const double h_scale = spec.hamiltonian.entries.cwiseAbs().rowwise().sum().maxCoeff();
  const double scale = h_scale + rate_scale;

  EvolutionResult result;
  result.times_s = spec.times_s;
  result.states.reserve(spec.times_s.size());
  result.states.push_back(spec.initial_state);

  Eigen::VectorXcd v = Eigen::Map<const Eigen::VectorXcd>(spec.initial_state.data(), d * d);

  for (std::size_t i = 1; i < spec.times_s.size(); ++i) {
    const double span = units::sim_from_seconds(spec.times_s[i] - spec.times_s[i - 1]);
    double dt = span / 10.0;
    if (scale > 0.0) dt = std::min(dt, 1.0 / (50.0 * scale));
    const long substeps = std::max(1L, long(std::ceil(span / dt)));
    const double h = span / double(substeps);

    for (long s = 0; s < substeps; ++s) {
      const Eigen::VectorXcd k1 = liouvillian * v;
      const Eigen::VectorXcd k2 = liouvillian * (v + 0.5 * h * k1);
      const Eigen::VectorXcd k3 = liouvillian * (v + 0.5 * h * k2);
      const Eigen::VectorXcd k4 = liouvillian * (v + h * k3);
      v += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      // Re-Hermitize; RK4 preserves this only to rounding.
      Eigen::Map<ComplexMatrix> rho(v.data(), d, d);
      rho = 0.5 * (rho + rho.adjoint().eval());
    }

    ComplexMatrix rho = Eigen::Map<ComplexMatrix>(v.data(), d, d);
    const double trace_drift = std::abs(rho.trace().real() - 1.0) + std::abs(rho.trace().imag());
    if (trace_drift > 1e-6)
      throw NumericsError("lindblad_evolve: trace drift " + std::to_string(trace_drift) +
                          " exceeds 1e-6; reduce the step size");
    result.states.push_back(std::move(rho));
  }
  return result;
}

// Convenience: qubit decay/dephasing collapse set used by the pulse
// experiments. Dephasing enters through sqrt(2 Gamma_phi) b+b.
inline std::vector<CollapseOperator> qubit_collapses(int dim, double relaxation_rate,
                                                     double dephasing_rate) {
  std::vector<CollapseOperator> out;
  if (relaxation_rate > 0.0) out.push_back({annihilation(dim), relaxation_rate});
  if (dephasing_rate > 0.0) out.push_back({number_operator(dim), 2.0 * dephasing_rate});
  return out;
}

}  // namespace cqed
