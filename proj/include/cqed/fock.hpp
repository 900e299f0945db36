#pragma once

#include <complex>

#include <Eigen/Dense>

#include "cqed/constants.hpp"
#include "cqed/device.hpp"
#include "cqed/errors.hpp"

// Truncated Fock-space operators and Hamiltonian assembly. Operators are
// immutable values; every function returns a fresh matrix. Hamiltonian
// entries are angular frequencies in simulation units (2pi * 1 GHz, i.e.
// numerically the ordinary frequency in GHz); bare ladder operators are
// dimensionless.

namespace cqed {

using ComplexMatrix = Eigen::MatrixXcd;

struct FockOperator {
  int dim = 0;            // truncation dimension of the underlying space
  ComplexMatrix entries;  // dim x dim

  FockOperator() = default;
  FockOperator(int d, ComplexMatrix m) : dim(d), entries(std::move(m)) {}

  FockOperator adjoint() const { return {dim, entries.adjoint()}; }
};

inline constexpr int kTensorDimensionCap = 4096;

inline void check_dim(int dim) {
  if (dim < 2) throw ModelError("operator dimension must be >= 2");
}

// a with entries a[i, i+1] = sqrt(i+1). On the truncated space the
// commutator [a, a+] is the identity except for entry (d-1, d-1) = 1-d.
inline FockOperator annihilation(int dim) {
  check_dim(dim);
  ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
  for (int i = 0; i + 1 < dim; ++i) m(i, i + 1) = std::sqrt(double(i + 1));
  return {dim, std::move(m)};
}

inline FockOperator creation(int dim) { return annihilation(dim).adjoint(); }

inline FockOperator identity(int dim) {
  check_dim(dim);
  return {dim, ComplexMatrix::Identity(dim, dim)};
}

inline FockOperator number_operator(int dim) {
  check_dim(dim);
  ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) m(i, i) = double(i);
  return {dim, std::move(m)};
}

inline FockOperator operator*(const FockOperator& a, const FockOperator& b) {
  if (a.dim != b.dim) throw ModelError("operator product: dimension mismatch");
  return {a.dim, a.entries * b.entries};
}

inline FockOperator operator+(const FockOperator& a, const FockOperator& b) {
  if (a.dim != b.dim) throw ModelError("operator sum: dimension mismatch");
  return {a.dim, a.entries + b.entries};
}

inline FockOperator operator*(std::complex<double> c, const FockOperator& a) {
  return {a.dim, c * a.entries};
}

inline FockOperator commutator(const FockOperator& a, const FockOperator& b) {
  return {a.dim, (a * b).entries - (b * a).entries};
}

inline FockOperator tensor_product(const FockOperator& a, const FockOperator& b,
                                   int dimension_cap = kTensorDimensionCap) {
  check_dim(a.dim);
  check_dim(b.dim);
  if (static_cast<long>(a.dim) * b.dim > dimension_cap)
    throw ModelError("tensor_product: composite dimension exceeds cap");
  const int dim = a.dim * b.dim;
  ComplexMatrix m(dim, dim);
  for (int i = 0; i < a.dim; ++i)
    for (int j = 0; j < a.dim; ++j)
      m.block(i * b.dim, j * b.dim, b.dim, b.dim) = a.entries(i, j) * b.entries;
  return {dim, std::move(m)};
}

// Relative Frobenius deviation from Hermiticity.
inline double hermiticity_deviation(const FockOperator& op) {
  const double norm = op.entries.norm();
  if (norm == 0.0) return 0.0;
  return (op.entries - op.entries.adjoint().eval()).norm() / norm;
}

inline std::complex<double> expectation(const FockOperator& op, const ComplexMatrix& rho) {
  return (op.entries * rho).trace();
}

// --- Hamiltonians -------------------------------------------------------

// Dispersive qubit-cavity Hamiltonian, Fock-diagonal:
//   H = (w_r + chi b+b) a+a + (K_a/2) a+^2 a^2 + w_q b+b + (K_b/2) b+^2 b^2
// with chi, K_a, K_b derived from the device model for the given mode.
// Ordering of the composite space: cavity (x) qubit.
inline FockOperator hamiltonian_dispersive(const SystemModel& system, std::size_t mode_index,
                                           int dim_cavity, int dim_qubit) {
  check_dim(dim_cavity);
  check_dim(dim_qubit);
  const CavityMode& mode = system.mode(mode_index);
  const KerrCoefficients kerr = kerr_coefficients(system, mode_index);

  const double w_r = units::sim_from_hz(mode.frequency_hz);
  const double w_q = units::sim_from_hz(system.qubit.frequency_hz);
  const double chi = units::sim_from_hz(kerr.cross_kerr_hz);
  const double k_a = units::sim_from_hz(kerr.cavity_self_kerr_hz);
  const double k_b = units::sim_from_hz(kerr.qubit_self_kerr_hz);

  const int dim = dim_cavity * dim_qubit;
  ComplexMatrix h = ComplexMatrix::Zero(dim, dim);
  for (int na = 0; na < dim_cavity; ++na) {
    for (int nb = 0; nb < dim_qubit; ++nb) {
      const int idx = na * dim_qubit + nb;
      h(idx, idx) = (w_r + chi * nb) * na + 0.5 * k_a * na * (na - 1) +
                    w_q * nb + 0.5 * k_b * nb * (nb - 1);
    }
  }
  return {dim, std::move(h)};
}

// Driven multilevel qubit in the frame rotating at the drive:
//   H = (K_b/2) b+^2 b^2 + g sqrt(n_eff) (b+ + b) + detuning b+b
// The detuning term (w_q - w_d) vanishes for a resonant drive, which is the
// assumption behind the pulsed-experiment presets.
inline FockOperator hamiltonian_driven_qubit(double qubit_self_kerr_hz, double coupling_hz,
                                             double n_eff, int dim,
                                             double drive_detuning_hz = 0.0) {
  check_dim(dim);
  if (n_eff < 0.0) throw ModelError("hamiltonian_driven_qubit: n_eff must be >= 0");
  const double k_b = units::sim_from_hz(qubit_self_kerr_hz);
  const double g = units::sim_from_hz(coupling_hz);
  const double det = units::sim_from_hz(drive_detuning_hz);
  const double amp = g * std::sqrt(n_eff);

  ComplexMatrix h = ComplexMatrix::Zero(dim, dim);
  for (int n = 0; n < dim; ++n) {
    h(n, n) = 0.5 * k_b * n * (n - 1) + det * n;
    if (n + 1 < dim) {
      const double step = amp * std::sqrt(double(n + 1));
      h(n, n + 1) = step;
      h(n + 1, n) = step;
    }
  }
  return {dim, std::move(h)};
}

}  // namespace cqed
