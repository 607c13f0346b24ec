#include "geophase/frame_compiler.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <ostream>

#include "geophase/error.hpp"

namespace geophase {

namespace {

void put_u64(std::ostream& os, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  os.write(b, 8);
}

std::uint64_t get_u64(std::istream& is) {
  unsigned char b[8];
  if (!is.read(reinterpret_cast<char*>(b), 8)) throw ValidationError("truncated IQW1 stream");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

void put_f64(std::ostream& os, double v) { put_u64(os, std::bit_cast<std::uint64_t>(v)); }
double get_f64(std::istream& is) { return std::bit_cast<double>(get_u64(is)); }

std::size_t grid_index(double t, const IQWaveform& wave) {
  const double k = std::round(t / wave.dt);
  if (!(k >= 0.0 && k < static_cast<double>(wave.size())) || std::abs(t - k * wave.dt) > 1e-9 * std::max(1.0, t)) {
    throw DomainError("time is not on the waveform grid");
  }
  return static_cast<std::size_t>(k);
}

}  // namespace

LabFrameSpec LabFrameSpec::scaled(double f10_ghz, double delta0, double dt_fine) {
  const double w10 = kTwoPi * f10_ghz;
  return {w10, w10 + delta0, dt_fine};
}

void LabFrameSpec::validate() const {
  if (!(omega10 > 0.0 && omega_d > 0.0)) throw ValidationError("lab frequencies must be positive");
  if (!(dt_fine > 0.0 && dt_fine <= kTwoPi / (20.0 * omega_d))) {
    throw ValidationError("dt_fine must be at most 2 pi / (20 omega_d) to resolve the carrier");
  }
}

IQWaveform compile_iq(const PulseProgram& program, double delta0, double omega_d, std::optional<double> dt) {
  for (const auto& s : program.segments()) {
    if (s.kind() == SegmentKind::ideal_pulse) {
      throw ValidationError("ideal pulses have no waveform; use resonant pulses for compilation");
    }
  }
  const double step = dt.value_or(program.dt());
  validate_dt(step);
  const double total = program.total_duration();
  const std::size_t n = total > 0.0 ? std::max<std::size_t>(1, std::llround(total / step)) : 0;
  const double h = n > 0 ? total / static_cast<double>(n) : step;
  IQWaveform w;
  w.dt = h;
  w.omega_d = omega_d;
  w.i_samples.assign(n + 1, 0.0);
  w.q_samples.assign(n + 1, 0.0);
  w.xi_samples.assign(n + 1, 0.0);
  double xi = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const FieldVector b = total_field(program, (static_cast<double>(k) + 0.5) * h);
    const double xi_mid = xi + 0.5 * h * (b.bz - delta0);
    const double c = std::cos(xi_mid), s = std::sin(xi_mid);
    // Omega cos(xi - phi) and Omega sin(xi - phi) in Cartesian form.
    w.i_samples[k] = b.bx * c + b.by * s;
    w.q_samples[k] = b.bx * s - b.by * c;
    xi += h * (b.bz - delta0);
    w.xi_samples[k + 1] = xi;
  }
  if (n > 0) {
    w.i_samples[n] = w.i_samples[n - 1];
    w.q_samples[n] = w.q_samples[n - 1];
  }
  return w;
}

std::vector<StateSample> simulate_lab_frame(const IQWaveform& wave, const LabFrameSpec& lab, const PureState& psi0) {
  lab.validate();
  if (wave.omega_d > 0.0 && std::abs(wave.omega_d - lab.omega_d) > 1e-12 * lab.omega_d) {
    throw ValidationError("waveform carrier does not match the lab drive frequency");
  }
  std::vector<StateSample> out{{0.0, psi0}};
  if (wave.size() < 2) return out;
  const auto sub = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(wave.dt / lab.dt_fine - 1e-9)));
  const double h = wave.dt / static_cast<double>(sub);
  PureState psi = psi0;
  for (std::size_t k = 0; k + 1 < wave.size(); ++k) {
    const double t0 = static_cast<double>(k) * wave.dt;
    for (std::size_t j = 0; j < sub; ++j) {
      const double t = t0 + (static_cast<double>(j) + 0.5) * h;
      const double lambda = wave.i_samples[k] * std::cos(lab.omega_d * t) - wave.q_samples[k] * std::sin(lab.omega_d * t);
      psi = step_unitary({2.0 * lambda, 0.0, -lab.omega10}, h) * psi;
    }
    out.push_back({static_cast<double>(k + 1) * wave.dt, psi});
  }
  return out;
}

PureState frame_correct(const PureState& psi_lab, double t, const IQWaveform& wave) {
  const std::size_t k = grid_index(t, wave);
  PureState out = psi_lab;
  out(1) *= std::polar(1.0, wave.omega_d * t + wave.xi_samples[k]);
  return out;
}

double rwa_deviation(const PulseProgram& program, double delta0, const LabFrameSpec& lab) {
  lab.validate();
  const IQWaveform wave = compile_iq(program, delta0, lab.omega_d, lab.dt_fine);
  const auto lab_states = simulate_lab_frame(wave, lab, ket0());
  const PulseProgram fine(program.segments(), wave.dt);
  const PureState rot = evolve_unitary_final(fine, ket0());
  const StateSample& last = lab_states.back();
  const PureState corrected = frame_correct(last.psi, last.t, wave);
  return 1.0 - std::norm(rot.dot(corrected));
}

void write_csv(std::ostream& os, const IQWaveform& wave) {
  os << "t_ns,I_rad_per_ns,Q_rad_per_ns,xi_rad\n";
  char buf[128];
  for (std::size_t k = 0; k < wave.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", static_cast<double>(k) * wave.dt, wave.i_samples[k],
                  wave.q_samples[k], wave.xi_samples[k]);
    os << buf;
  }
}

void write_iqw1(std::ostream& os, const IQWaveform& wave) {
  os.write("IQW1", 4);
  put_u64(os, wave.size());
  put_f64(os, wave.dt);
  put_f64(os, wave.omega_d);
  for (std::size_t k = 0; k < wave.size(); ++k) {
    put_f64(os, wave.i_samples[k]);
    put_f64(os, wave.q_samples[k]);
    put_f64(os, wave.xi_samples[k]);
  }
}

IQWaveform read_iqw1(std::istream& is) {
  char magic[4];
  if (!is.read(magic, 4) || std::string(magic, 4) != "IQW1") throw ValidationError("not an IQW1 stream");
  const std::uint64_t n = get_u64(is);
  IQWaveform w;
  w.dt = get_f64(is);
  w.omega_d = get_f64(is);
  if (n > (1ULL << 32)) throw ValidationError("IQW1 sample count is implausible");
  w.i_samples.resize(n);
  w.q_samples.resize(n);
  w.xi_samples.resize(n);
  for (std::uint64_t k = 0; k < n; ++k) {
    w.i_samples[k] = get_f64(is);
    w.q_samples[k] = get_f64(is);
    w.xi_samples[k] = get_f64(is);
  }
  return w;
}

}  // namespace geophase
