#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "geophase/propagator.hpp"
#include "geophase/pulse_schedule.hpp"

namespace geophase {

enum class NoiseKind { amplitude, phase, detuning };

std::string to_string(NoiseKind kind);
NoiseKind parse_noise_kind(const std::string& s);

struct OUParams {
  /// Reduced strength c_Omega or c_phi.
  double c = 0.0;
  /// Bandwidth Gamma in 1/ns.
  double gamma_bw = 0.01;
  NoiseKind kind = NoiseKind::amplitude;

  void validate() const;
};

/// Ornstein-Uhlenbeck samples on t_k = k dt, k = 0..n. The value at time t
/// is held constant over [t_k, t_k + dt).
struct NoiseTrace {
  double dt = 0.0;
  std::vector<double> values;
  NoiseKind kind = NoiseKind::amplitude;

  double at(double t) const;
  /// Integral over [0, duration] as seen by the midpoint slicing of a
  /// segment of that duration.
  double integral(double duration) const;
};

/// Exact discretization delta(t+dt) = delta(t) e^{-Gamma dt} + s sqrt(1 - e^{-2 Gamma dt}) N(0,1)
/// with stationary deviation s = c |scale| and a stationary first sample.
NoiseTrace generate_ou(const OUParams& params, double duration, double dt, double scale, std::uint64_t seed);

/// Stationary scale of the perturbed quantity: |Omega_tot| (amplitude),
/// 1 (phase) or |Delta_tot| (detuning); the reference values when sta is off.
double noise_scale(const RotationSpec& spec, bool sta, NoiseKind kind);

/// Applies the trace to a baseline rotation field at local time t:
/// amplitude adds delta along the in-plane direction phi, phase rotates the
/// in-plane component by delta, detuning adds delta to bz.
FieldVector perturbed_rotation_field(const RotationSpec& spec, const FieldVector& baseline, const NoiseTrace& trace,
                                     double t);

/// Dynamic phase of one ramp: integral of |B0| = delta0 T / theta0 ln(sec theta0 + tan theta0).
double ramp_dynamic_phase(const RampSpec& spec);

/// Relative dynamic phase of the rotation, |B0| T_rot, plus the first-order
/// noise correction of the STA loop when a trace is given:
///   amplitude: sin theta0 (Omega_tot - omega0 sin theta0 cos theta0) / Omega_tot * int dOmega
///   detuning:  (cos theta0 + omega0 sin^2 theta0 / b) * int dDelta, b = |B0| - omega0 cos theta0
///   phase:     0
/// with omega0 signed by the loop direction.
double dynamic_phase_reference(const RotationSpec& spec, const NoiseTrace* trace = nullptr);

struct EnsembleConfig {
  LoopGeometry geometry;
  Loop direction = Loop::plus;
  OUParams noise;
  std::size_t n_traj = 300;
  std::uint64_t base_seed = 1;
  std::optional<DissipationParams> dissipation;
  double dt = 0.01;
  /// 0 means hardware concurrency.
  unsigned workers = 0;
};

struct TrajectoryResult {
  std::size_t index;
  std::uint64_t seed;
  double gamma;
};

/// Single-loop ensemble. Trajectory i uses seed base_seed + i. Each gamma is
/// the final relative phase minus the dynamic-phase reference (both ramps and
/// the rotation), unwrapped to the branch nearest the noiseless value.
/// Results are ordered by index and independent of the worker count.
std::vector<TrajectoryResult> run_noise_ensemble(const EnsembleConfig& cfg);

struct Histogram {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<std::size_t> counts;
};

struct GaussianFit {
  double center = 0.0;
  double width = 0.0;
};

struct EnsembleStats {
  std::size_t n = 0;
  double mean_gamma = 0.0;
  /// Unbiased standard deviation.
  double sigma = 0.0;
  /// |<exp(i gamma)>|
  double nu = 0.0;
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
  Histogram histogram;
  GaussianFit gaussian_fit;
};

/// Throws DomainError for fewer than two samples.
EnsembleStats ensemble_stats(const std::vector<double>& gammas, std::size_t bins = 30);

/// 2 sqrt(2) c pi sin^2 theta0 cos theta0 sqrt(x - 1 + e^{-x}) / x with x = Gamma T.
double analytic_sigma_omega(double c_omega, double theta0, double gamma_bw, double t_rot);
double analytic_nu(double sigma);

void write_csv(std::ostream& os, const std::vector<TrajectoryResult>& results);

}  // namespace geophase
