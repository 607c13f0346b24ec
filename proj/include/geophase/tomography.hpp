#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "geophase/propagator.hpp"
#include "geophase/qubit.hpp"

namespace geophase {

struct BlochVector {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double norm() const { return std::sqrt(x * x + y * y + z * z); }
};

/// (Tr sigma_x rho, Tr sigma_y rho, Tr sigma_z rho)
BlochVector bloch_vector(const DensityMatrix& rho);
BlochVector bloch_vector(const PureState& psi);

/// Finite-shot readout: per axis, `shots` Bernoulli draws with probability
/// (1 + <sigma_i>)/2, averaged to an estimate in [-1, 1].
BlochVector sample_qst(const DensityMatrix& rho, std::uint64_t shots, std::uint64_t seed);

enum class BerryVariant { echo_plus_minus, echo_minus_plus, single_plus, single_minus };

struct BerryPhaseResult {
  double gamma;
  double branch_offset;
  /// atan2(y, x), in (-pi, pi].
  double raw_angle;
};

/// Lower end of the interval gamma is assigned to, given the designed solid
/// angle. C+-: (-2pi, 0) for S < pi, (-4pi, -2pi) otherwise; C-+ mirrored;
/// single C+: (0, 2pi); single C-: (-2pi, 0).
double branch_lower_bound(BerryVariant variant, double s_design);

/// Throws DomainError when (x, y) = (0, 0) or s_design is outside [0, 2pi).
BerryPhaseResult extract_berry_phase(double x, double y, double s_design, BerryVariant variant);

/// Shifts angle by a multiple of 2pi to land nearest `target`.
double unwrap_nearest(double angle, double target);

/// Continuity unwrap of a sweep: each gamma is moved by 2pi multiples to be
/// nearest the previous one; the first is anchored by the branch rule.
std::vector<double> unwrap_sweep(const std::vector<double>& raw_angles, double first_s_design,
                                 BerryVariant variant);

/// Theory value: -2S, +2S, +S, -S for the four variants.
double gamma_theory(BerryVariant variant, double s_design);

struct SphericalSample {
  double t;
  double r;
  double theta;
  double phi;
  /// False where r = 0 (theta and phi are then reported as 0 and the
  /// previous phi respectively).
  bool defined;
};

std::vector<SphericalSample> spherical_trajectory(const std::vector<StateSample>& states);
std::vector<SphericalSample> spherical_trajectory(const std::vector<DensitySample>& states);

/// Trapezoidal integral of (1 - cos theta) dphi along the path.
double solid_angle(const std::vector<SphericalSample>& samples);

struct SlopeFit {
  /// gamma = -k S + intercept
  double k;
  /// Standard error of k; NaN with only two points (no residual degrees of freedom).
  double k_err;
  double intercept;
};

struct SweepPoint {
  double s;
  double gamma;
};

SlopeFit fit_slope(const std::vector<SweepPoint>& points);

struct ContrastPoint {
  double s;
  double x;
  double y;
};

/// Least-squares r in (x, y) = r (cos g, sin g) with g = gamma_theory(variant, S).
double fit_contrast(const std::vector<ContrastPoint>& points,
                    BerryVariant variant = BerryVariant::echo_plus_minus);

std::string to_string(BerryVariant v);

void write_csv(std::ostream& os, const std::vector<SphericalSample>& samples);

}  // namespace geophase
