#pragma once

#include <Eigen/Dense>
#include <complex>

#include "geophase/field.hpp"

namespace geophase {

using Complex = std::complex<double>;

/// Amplitudes (a0, a1) of |0>, |1>.
using PureState = Eigen::Vector2cd;
using Operator = Eigen::Matrix2cd;
/// 2x2 Hermitian, unit trace, positive semidefinite.
using DensityMatrix = Eigen::Matrix2cd;

enum class Axis { x, y, z };

namespace pauli {
Operator identity();
Operator x();
Operator y();
Operator z();
Operator along(Axis axis);
}  // namespace pauli

PureState ket0();
PureState ket1();
/// (|0> + |1>)/sqrt(2)
PureState ket_plus();
/// (|0> + i|1>)/sqrt(2)
PureState ket_plus_i();

DensityMatrix density(const PureState& psi);

/// B.sigma/2
Operator hamiltonian(const FieldVector& b);

/// exp(-i angle sigma_axis / 2), the instantaneous rotation used for ideal pulses.
Operator rotation(Axis axis, double angle);

double trace_distance(const DensityMatrix& a, const DensityMatrix& b);
double min_eigenvalue(const DensityMatrix& rho);
/// Largest |rho - rho^dagger| entry.
double hermiticity_error(const Operator& m);

}  // namespace geophase
