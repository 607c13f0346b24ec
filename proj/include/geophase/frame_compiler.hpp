#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "geophase/propagator.hpp"
#include "geophase/pulse_schedule.hpp"

namespace geophase {

/// Baseband quadratures on t_k = k dt, k = 0..N. I and Q are held constant
/// over [t_k, t_k + dt) (the last entry repeats the final slice); xi_samples
/// holds the accumulated frame phase at t_k.
struct IQWaveform {
  double dt = 0.0;
  std::vector<double> i_samples;
  std::vector<double> q_samples;
  std::vector<double> xi_samples;
  double omega_d = 0.0;

  std::size_t size() const { return i_samples.size(); }
};

struct LabFrameSpec {
  double omega10 = 0.0;
  double omega_d = 0.0;
  double dt_fine = 0.0;

  /// Qubit at f10 GHz driven at omega10 + delta0, 0.002 ns steps.
  static LabFrameSpec scaled(double f10_ghz, double delta0, double dt_fine = 0.002);
  /// Throws ValidationError unless dt_fine resolves the carrier with 20 samples per period.
  void validate() const;
};

/// Reads the rotating-frame field as (Omega, phi, Delta) at each slice
/// midpoint and emits I = Omega cos(xi - phi), Q = Omega sin(xi - phi) with
/// xi(t) = int_0^t (Delta - delta0). Ideal pulses have no waveform and are
/// rejected with ValidationError. dt defaults to the program dt.
IQWaveform compile_iq(const PulseProgram& program, double delta0, double omega_d = 0.0,
                      std::optional<double> dt = std::nullopt);

/// Lab-frame Schrodinger evolution under omega10 |1><1| + lambda(t) sigma_x,
/// lambda = I cos(omega_d t) - Q sin(omega_d t), no RWA. Samples are
/// returned on the waveform grid.
std::vector<StateSample> simulate_lab_frame(const IQWaveform& wave, const LabFrameSpec& lab, const PureState& psi0);

/// Multiplies the |1> amplitude by exp(i (omega_d t + xi(t))); t must lie on the waveform grid.
PureState frame_correct(const PureState& psi_lab, double t, const IQWaveform& wave);

/// 1 - |<psi_rot|psi_lab,corrected>|^2 at the final time, starting from |0>.
/// The rotating-frame reference is the same program stepped at the lab dt.
double rwa_deviation(const PulseProgram& program, double delta0, const LabFrameSpec& lab);

void write_csv(std::ostream& os, const IQWaveform& wave);
/// "IQW1", uint64 count, f64 dt, f64 omega_d, then interleaved (I, Q, xi); all little-endian.
void write_iqw1(std::ostream& os, const IQWaveform& wave);
IQWaveform read_iqw1(std::istream& is);

}  // namespace geophase
