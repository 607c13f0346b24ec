#include "geophase/qubit.hpp"

#include <algorithm>
#include <cmath>

namespace geophase {

namespace pauli {

Operator identity() { return Operator::Identity(); }

Operator x() {
  Operator m;
  m << 0, 1, 1, 0;
  return m;
}

Operator y() {
  Operator m;
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return m;
}

Operator z() {
  Operator m;
  m << 1, 0, 0, -1;
  return m;
}

Operator along(Axis axis) {
  switch (axis) {
    case Axis::x:
      return x();
    case Axis::y:
      return y();
    case Axis::z:
      return z();
  }
  return identity();
}

}  // namespace pauli

PureState ket0() { return PureState(1.0, 0.0); }
PureState ket1() { return PureState(0.0, 1.0); }
PureState ket_plus() { return PureState(1.0, 1.0) / std::sqrt(2.0); }
PureState ket_plus_i() { return PureState(Complex(1.0), Complex(0.0, 1.0)) / std::sqrt(2.0); }

DensityMatrix density(const PureState& psi) { return psi * psi.adjoint(); }

Operator hamiltonian(const FieldVector& b) {
  Operator h;
  h << b.bz, Complex(b.bx, -b.by), Complex(b.bx, b.by), -b.bz;
  return 0.5 * h;
}

Operator rotation(Axis axis, double angle) {
  return std::cos(angle / 2) * pauli::identity() -
         Complex(0, 1) * std::sin(angle / 2) * pauli::along(axis);
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  // Hermitian 2x2: half the sum of |eigenvalues| of the difference.
  const Operator d = 0.5 * ((a - b) + (a - b).adjoint());
  Eigen::SelfAdjointEigenSolver<Operator> es(d, Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

double min_eigenvalue(const DensityMatrix& rho) {
  const Operator h = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<Operator> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double hermiticity_error(const Operator& m) { return (m - m.adjoint()).cwiseAbs().maxCoeff(); }

}  // namespace geophase
