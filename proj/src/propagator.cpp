#include "geophase/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "geophase/error.hpp"
#include "geophase/simd/su2_batch.hpp"

namespace geophase {

namespace {

constexpr Complex kI(0.0, 1.0);

// Walks the slice grid of a program. on_slice(seg, local_mid, h, t_end) is
// called for every timed slice, on_pulse(seg, pulse, t) for ideal pulses.
template <class SliceFn, class PulseFn>
void walk(const PulseProgram& program, SliceFn&& on_slice, PulseFn&& on_pulse) {
  const auto& segs = program.segments();
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const Segment& seg = segs[i];
    const double t0 = program.start_time(i);
    if (seg.kind() == SegmentKind::ideal_pulse) {
      on_pulse(i, seg.as<IdealPulse>(), t0);
      continue;
    }
    const std::size_t n = slice_count(seg.duration(), program.dt());
    if (n == 0) continue;
    const double h = seg.duration() / static_cast<double>(n);
    for (std::size_t j = 0; j < n; ++j) {
      const double mid = (static_cast<double>(j) + 0.5) * h;
      const double t_end = j + 1 == n ? t0 + seg.duration() : t0 + static_cast<double>(j + 1) * h;
      on_slice(i, mid, h, t_end);
    }
  }
}

FieldVector slice_field(const Segment& seg, std::size_t index, double mid, const FieldHook& hook) {
  const FieldVector nominal = segment_field(seg, mid);
  return hook ? hook(index, mid, nominal) : nominal;
}

}  // namespace

Operator step_unitary(const FieldVector& b, double dt) {
  const double n = b.norm();
  if (n == 0.0 || dt == 0.0) return Operator::Identity();
  const double a = 0.5 * n * dt;
  const double c = std::cos(a);
  const double s = std::sin(a) / n;
  Operator u;
  u << Complex(c, -s * b.bz), Complex(-s * b.by, -s * b.bx), Complex(s * b.by, -s * b.bx),
      Complex(c, s * b.bz);
  return u;
}

void DissipationParams::validate() const {
  if (!(std::isfinite(t1) && t1 > 0.0)) throw ValidationError("t1 must be positive");
  if (!(std::isfinite(t2_echo) && t2_echo > 0.0)) throw ValidationError("t2_echo must be positive");
}

std::vector<StateSample> evolve_unitary(const PulseProgram& program, const PureState& psi0,
                                        const EvolveOptions& opts) {
  std::vector<StateSample> out{{0.0, psi0}};
  PureState psi = psi0;
  const auto& segs = program.segments();
  walk(
      program,
      [&](std::size_t i, double mid, double h, double t_end) {
        psi = step_unitary(slice_field(segs[i], i, mid, opts.hook), h) * psi;
        if (opts.record) out.push_back({t_end, psi});
      },
      [&](std::size_t, const IdealPulse& p, double t) {
        psi = rotation(p.axis, p.angle) * psi;
        if (opts.record) out.push_back({t, psi});
      });
  if (!opts.record) out.push_back({program.total_duration(), psi});
  return out;
}

PureState evolve_unitary_final(const PulseProgram& program, const PureState& psi0, const FieldHook& hook) {
  EvolveOptions opts;
  opts.record = false;
  opts.hook = hook;
  return evolve_unitary(program, psi0, opts).back().psi;
}

DensityMatrix lindblad_rhs(const FieldVector& b, const DensityMatrix& rho, const DissipationParams& dis) {
  const Operator h = hamiltonian(b);
  DensityMatrix d = -kI * (h * rho - rho * h);
  // sigma_- = |0><1|; sigma_+ sigma_- = |1><1|
  const double g1 = 1.0 / dis.t1;
  const double g2 = 2.0 / dis.t2_echo;
  const Complex r11 = rho(1, 1);
  const Complex r01 = rho(0, 1);
  const Complex r10 = rho(1, 0);
  d(0, 0) += g1 * r11;
  d(1, 1) -= g1 * r11;
  d(0, 1) -= 0.5 * (g1 + g2) * r01;
  d(1, 0) -= 0.5 * (g1 + g2) * r10;
  return d;
}

std::vector<DensitySample> evolve_lindblad(const PulseProgram& program, const DensityMatrix& rho0,
                                           const DissipationParams& dis, const EvolveOptions& opts) {
  dis.validate();
  std::vector<DensitySample> out{{0.0, rho0}};
  DensityMatrix rho = rho0;
  const Complex tr0 = rho0.trace();
  const auto& segs = program.segments();
  walk(
      program,
      [&](std::size_t i, double mid, double h, double t_end) {
        const FieldVector b = slice_field(segs[i], i, mid, opts.hook);
        const DensityMatrix k1 = lindblad_rhs(b, rho, dis);
        const DensityMatrix k2 = lindblad_rhs(b, rho + 0.5 * h * k1, dis);
        const DensityMatrix k3 = lindblad_rhs(b, rho + 0.5 * h * k2, dis);
        const DensityMatrix k4 = lindblad_rhs(b, rho + h * k3, dis);
        rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!(std::abs(rho.trace() - tr0) <= 1e-6)) {
          char buf[160];
          std::snprintf(buf, sizeof buf, "trace drift %.3g at t = %.6g ns; reduce dt",
                        std::abs(rho.trace() - tr0), t_end);
          throw IntegrationError(buf);
        }
        // RK4 conserves the trace of a trace-free generator exactly, so an
        // unstable step shows up as a loss of positivity instead.
        const double half_sum = 0.5 * (rho(0, 0).real() + rho(1, 1).real());
        const double half_diff = 0.5 * (rho(0, 0).real() - rho(1, 1).real());
        const double lo = half_sum - std::sqrt(half_diff * half_diff + std::norm(rho(1, 0)));
        if (!(lo >= -1e-6)) {
          char buf[160];
          std::snprintf(buf, sizeof buf, "negative eigenvalue %.3g at t = %.6g ns; reduce dt", lo, t_end);
          throw IntegrationError(buf);
        }
        if (opts.record) out.push_back({t_end, rho});
      },
      [&](std::size_t, const IdealPulse& p, double t) {
        const Operator u = rotation(p.axis, p.angle);
        rho = u * rho * u.adjoint();
        if (opts.record) out.push_back({t, rho});
      });
  if (!opts.record) out.push_back({program.total_duration(), rho});
  return out;
}

DensityMatrix evolve_lindblad_final(const PulseProgram& program, const DensityMatrix& rho0,
                                    const DissipationParams& dis) {
  EvolveOptions opts;
  opts.record = false;
  return evolve_lindblad(program, rho0, dis, opts).back().rho;
}

std::vector<PureState> evolve_unitary_batch(std::span<const PulseProgram> programs,
                                            std::span<const PureState> psi0, const BatchFieldHook& hook) {
  if (programs.size() != psi0.size()) throw ValidationError("one initial state per program required");
  const std::size_t lanes = programs.size();
  if (lanes == 0) return {};
  const PulseProgram& shape = programs[0];
  for (const auto& p : programs) {
    bool same = p.dt() == shape.dt() && p.segments().size() == shape.segments().size();
    for (std::size_t i = 0; same && i < p.segments().size(); ++i) {
      same = p.segments()[i].kind() == shape.segments()[i].kind() &&
             p.segments()[i].duration() == shape.segments()[i].duration();
    }
    if (!same) throw ValidationError("batched programs must share their timing structure");
  }

  simd::SpinorBatch st(lanes);
  for (std::size_t l = 0; l < lanes; ++l) {
    st.re0[l] = psi0[l](0).real();
    st.im0[l] = psi0[l](0).imag();
    st.re1[l] = psi0[l](1).real();
    st.im1[l] = psi0[l](1).imag();
  }
  simd::FieldBatch fb(lanes);
  walk(
      shape,
      [&](std::size_t i, double mid, double h, double) {
        for (std::size_t l = 0; l < lanes; ++l) {
          FieldVector b = segment_field(programs[l].segments()[i], mid);
          if (hook) b = hook(l, i, mid, b);
          fb.bx[l] = b.bx;
          fb.by[l] = b.by;
          fb.bz[l] = b.bz;
        }
        simd::su2_step(simd::view(fb), h, simd::view(st));
      },
      [&](std::size_t i, const IdealPulse&, double) {
        for (std::size_t l = 0; l < lanes; ++l) {
          const auto& p = programs[l].segments()[i].as<IdealPulse>();
          const PureState v = rotation(p.axis, p.angle) * PureState(Complex(st.re0[l], st.im0[l]),
                                                                     Complex(st.re1[l], st.im1[l]));
          st.re0[l] = v(0).real();
          st.im0[l] = v(0).imag();
          st.re1[l] = v(1).real();
          st.im1[l] = v(1).imag();
        }
      });

  std::vector<PureState> out(lanes);
  for (std::size_t l = 0; l < lanes; ++l) {
    out[l] = PureState(Complex(st.re0[l], st.im0[l]), Complex(st.re1[l], st.im1[l]));
  }
  return out;
}

EigenPair instantaneous_eigenstates(const FieldVector& b0) {
  const double n = b0.norm();
  if (!(n > 0.0)) throw DomainError("eigenstates are degenerate at zero field");
  const double theta = std::atan2(std::hypot(b0.bx, b0.by), b0.bz);
  const double phi = std::atan2(b0.by, b0.bx);
  const double c = std::cos(0.5 * theta);
  const double s = std::sin(0.5 * theta);
  const Complex e = std::polar(1.0, phi);
  EigenPair p;
  p.s_up << c, e * s;
  p.s_down << -std::conj(e) * s, c;
  return p;
}

double tracking_fidelity(const std::vector<StateSample>& states, const PulseProgram& program) {
  if (program.total_duration() <= 0.0 || states.empty()) return 1.0;
  int branch = -1;
  double worst = 1.0;
  for (const auto& smp : states) {
    const FieldVector b0 = reference_field(program, std::min(smp.t, program.total_duration()));
    if (!(b0.norm() > 0.0)) continue;
    const EigenPair e = instantaneous_eigenstates(b0);
    const double up = std::abs(e.s_up.dot(smp.psi));
    const double down = std::abs(e.s_down.dot(smp.psi));
    if (branch < 0) branch = up >= down ? 0 : 1;
    worst = std::min(worst, branch == 0 ? up : down);
  }
  return worst;
}

void write_csv(std::ostream& os, const std::vector<StateSample>& states) {
  os << "t_ns,re_a0,im_a0,re_a1,im_a1\n";
  char buf[160];
  for (const auto& s : states) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", s.t, s.psi(0).real(), s.psi(0).imag(),
                  s.psi(1).real(), s.psi(1).imag());
    os << buf;
  }
}

void write_csv(std::ostream& os, const std::vector<DensitySample>& states) {
  os << "t_ns,rho00,re_rho01,im_rho01,rho11\n";
  char buf[160];
  for (const auto& s : states) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", s.t, s.rho(0, 0).real(),
                  s.rho(0, 1).real(), s.rho(0, 1).imag(), s.rho(1, 1).real());
    os << buf;
  }
}

}  // namespace geophase
