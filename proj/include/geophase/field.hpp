#pragma once

#include <cmath>
#include <numbers>

namespace geophase {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Angular frequency in rad/ns for a frequency given in MHz.
constexpr double rad_per_ns_from_mhz(double mhz) { return kTwoPi * mhz * 1e-3; }

/// Effective magnetic field in the rotating frame, in rad/ns. The qubit
/// Hamiltonian is B.sigma/2 (hbar = 1).
struct FieldVector {
  double bx = 0.0;
  double by = 0.0;
  double bz = 0.0;

  double norm() const { return std::sqrt(bx * bx + by * by + bz * bz); }
  double norm_sq() const { return bx * bx + by * by + bz * bz; }
  bool finite() const { return std::isfinite(bx) && std::isfinite(by) && std::isfinite(bz); }

  FieldVector& operator+=(const FieldVector& o) {
    bx += o.bx;
    by += o.by;
    bz += o.bz;
    return *this;
  }
  friend FieldVector operator+(FieldVector a, const FieldVector& b) { return a += b; }
  friend FieldVector operator-(const FieldVector& a, const FieldVector& b) {
    return {a.bx - b.bx, a.by - b.by, a.bz - b.bz};
  }
  friend FieldVector operator*(double s, const FieldVector& v) { return {s * v.bx, s * v.by, s * v.bz}; }
  friend bool operator==(const FieldVector&, const FieldVector&) = default;
};

inline double dot(const FieldVector& a, const FieldVector& b) {
  return a.bx * b.bx + a.by * b.by + a.bz * b.bz;
}

inline FieldVector cross(const FieldVector& a, const FieldVector& b) {
  return {a.by * b.bz - a.bz * b.by, a.bz * b.bx - a.bx * b.bz, a.bx * b.by - a.by * b.bx};
}

}  // namespace geophase
