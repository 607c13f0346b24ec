#include <cmath>
#include <complex>
#include <stdexcept>

#include "geophase/simd/su2_batch.hpp"

namespace geophase::simd {

namespace {

void check_sizes(FieldView f, SpinorView s) {
  const std::size_t n = f.bx.size();
  if (f.by.size() != n || f.bz.size() != n || s.re0.size() != n || s.im0.size() != n ||
      s.re1.size() != n || s.im1.size() != n) {
    throw std::invalid_argument("su2_step: lane count mismatch");
  }
}

}  // namespace

void su2_step_scalar(FieldView f, double dt, SpinorView s) {
  check_sizes(f, s);
  using C = std::complex<double>;
  const C i(0.0, 1.0);
  for (std::size_t k = 0; k < f.bx.size(); ++k) {
    const double n = std::sqrt(f.bx[k] * f.bx[k] + f.by[k] * f.by[k] + f.bz[k] * f.bz[k]);
    C u00 = 1.0, u01 = 0.0, u10 = 0.0, u11 = 1.0;
    if (n > 0.0) {
      const double c = std::cos(0.5 * n * dt);
      const double sn = std::sin(0.5 * n * dt);
      const double ux = f.bx[k] / n, uy = f.by[k] / n, uz = f.bz[k] / n;
      // cos I - i sin (u.sigma)
      u00 = c - i * sn * uz;
      u01 = -i * sn * C(ux, -uy);
      u10 = -i * sn * C(ux, uy);
      u11 = c + i * sn * uz;
    }
    const C a0(s.re0[k], s.im0[k]);
    const C a1(s.re1[k], s.im1[k]);
    const C b0 = u00 * a0 + u01 * a1;
    const C b1 = u10 * a0 + u11 * a1;
    s.re0[k] = b0.real();
    s.im0[k] = b0.imag();
    s.re1[k] = b1.real();
    s.im1[k] = b1.imag();
  }
}

void sincos_scalar(std::span<const double> x, std::span<double> s, std::span<double> c) {
  if (s.size() != x.size() || c.size() != x.size()) throw std::invalid_argument("sincos: size mismatch");
  for (std::size_t k = 0; k < x.size(); ++k) {
    s[k] = std::sin(x[k]);
    c[k] = std::cos(x[k]);
  }
}

}  // namespace geophase::simd
