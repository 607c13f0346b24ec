#include "geophase/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>
#include <string>

#include "geophase/error.hpp"

namespace geophase {

BlochVector bloch_vector(const DensityMatrix& rho) {
  return {2.0 * rho(1, 0).real(), 2.0 * rho(1, 0).imag(), (rho(0, 0) - rho(1, 1)).real()};
}

BlochVector bloch_vector(const PureState& psi) { return bloch_vector(density(psi)); }

BlochVector sample_qst(const DensityMatrix& rho, std::uint64_t shots, std::uint64_t seed) {
  if (shots == 0) throw DomainError("shots must be at least 1");
  const BlochVector b = bloch_vector(rho);
  std::mt19937_64 rng(seed);
  auto estimate = [&](double expectation) {
    const double p = std::clamp(0.5 * (1.0 + expectation), 0.0, 1.0);
    std::binomial_distribution<std::uint64_t> draw(shots, p);
    const auto ups = draw(rng);
    return (2.0 * static_cast<double>(ups) - static_cast<double>(shots)) / static_cast<double>(shots);
  };
  BlochVector out;
  out.x = estimate(b.x);
  out.y = estimate(b.y);
  out.z = estimate(b.z);
  return out;
}

double branch_lower_bound(BerryVariant variant, double s_design) {
  switch (variant) {
    case BerryVariant::echo_plus_minus:
      return s_design < kPi ? -kTwoPi : -2.0 * kTwoPi;
    case BerryVariant::echo_minus_plus:
      return s_design < kPi ? 0.0 : kTwoPi;
    case BerryVariant::single_plus:
      return 0.0;
    case BerryVariant::single_minus:
      return -kTwoPi;
  }
  return 0.0;
}

BerryPhaseResult extract_berry_phase(double x, double y, double s_design, BerryVariant variant) {
  if (x == 0.0 && y == 0.0) throw DomainError("Berry phase undefined for a vanishing in-plane Bloch vector");
  if (!(s_design >= 0.0 && s_design < kTwoPi)) throw DomainError("designed solid angle must lie in [0, 2pi)");
  const double raw = std::atan2(y, x);
  const double lower = branch_lower_bound(variant, s_design);
  const double k = std::floor((lower - raw) / kTwoPi) + 1.0;
  const double offset = k * kTwoPi;
  return {raw + offset, offset, raw};
}

double unwrap_nearest(double angle, double target) {
  return angle + kTwoPi * std::round((target - angle) / kTwoPi);
}

std::vector<double> unwrap_sweep(const std::vector<double>& raw_angles, double first_s_design,
                                 BerryVariant variant) {
  std::vector<double> out;
  out.reserve(raw_angles.size());
  for (std::size_t i = 0; i < raw_angles.size(); ++i) {
    if (i == 0) {
      const double lower = branch_lower_bound(variant, first_s_design);
      out.push_back(raw_angles[0] + kTwoPi * (std::floor((lower - raw_angles[0]) / kTwoPi) + 1.0));
    } else {
      out.push_back(unwrap_nearest(raw_angles[i], out.back()));
    }
  }
  return out;
}

double gamma_theory(BerryVariant variant, double s_design) {
  switch (variant) {
    case BerryVariant::echo_plus_minus:
      return -2.0 * s_design;
    case BerryVariant::echo_minus_plus:
      return 2.0 * s_design;
    case BerryVariant::single_plus:
      return s_design;
    case BerryVariant::single_minus:
      return -s_design;
  }
  return 0.0;
}

namespace {

template <class Sample, class ToBloch>
std::vector<SphericalSample> to_spherical(const std::vector<Sample>& states, ToBloch&& to_bloch) {
  if (states.empty()) throw DomainError("empty trajectory");
  std::vector<SphericalSample> out;
  out.reserve(states.size());
  bool have_phi = false;
  double prev_phi = 0.0;
  for (const auto& s : states) {
    const BlochVector b = to_bloch(s);
    const double r = b.norm();
    SphericalSample o{s.t, r, 0.0, prev_phi, r > 0.0};
    if (r > 0.0) {
      o.theta = std::acos(std::clamp(b.z / r, -1.0, 1.0));
      if (std::hypot(b.x, b.y) > 0.0) {
        const double phi = std::atan2(b.y, b.x);
        o.phi = have_phi ? unwrap_nearest(phi, prev_phi) : phi;
        have_phi = true;
        prev_phi = o.phi;
      }
    }
    out.push_back(o);
  }
  return out;
}

}  // namespace

std::vector<SphericalSample> spherical_trajectory(const std::vector<StateSample>& states) {
  return to_spherical(states, [](const StateSample& s) { return bloch_vector(s.psi); });
}

std::vector<SphericalSample> spherical_trajectory(const std::vector<DensitySample>& states) {
  return to_spherical(states, [](const DensitySample& s) { return bloch_vector(s.rho); });
}

double solid_angle(const std::vector<SphericalSample>& samples) {
  if (samples.size() < 2) throw DomainError("solid angle needs at least two samples");
  double acc = 0.0;
  for (std::size_t i = 1; i < samples.size(); ++i) {
    const double f0 = 1.0 - std::cos(samples[i - 1].theta);
    const double f1 = 1.0 - std::cos(samples[i].theta);
    acc += 0.5 * (f0 + f1) * (samples[i].phi - samples[i - 1].phi);
  }
  return acc;
}

SlopeFit fit_slope(const std::vector<SweepPoint>& points) {
  const std::size_t n = points.size();
  if (n < 2) throw FitError("slope fit needs at least two points");
  double ms = 0.0, mg = 0.0;
  for (const auto& p : points) {
    ms += p.s;
    mg += p.gamma;
  }
  ms /= static_cast<double>(n);
  mg /= static_cast<double>(n);
  double sss = 0.0, ssg = 0.0;
  for (const auto& p : points) {
    sss += (p.s - ms) * (p.s - ms);
    ssg += (p.s - ms) * (p.gamma - mg);
  }
  if (!(sss > 1e-24)) throw FitError("slope fit needs at least two distinct S values");
  const double slope = ssg / sss;
  const double intercept = mg - slope * ms;
  double k_err = std::nan("");
  if (n > 2) {
    double rss = 0.0;
    for (const auto& p : points) {
      const double r = p.gamma - (slope * p.s + intercept);
      rss += r * r;
    }
    k_err = std::sqrt(rss / static_cast<double>(n - 2) / sss);
  }
  return {-slope, k_err, intercept};
}

double fit_contrast(const std::vector<ContrastPoint>& points, BerryVariant variant) {
  if (points.size() < 3) throw FitError("contrast fit needs at least three points");
  double num = 0.0;
  double power = 0.0;
  for (const auto& p : points) {
    const double g = gamma_theory(variant, p.s);
    num += p.x * std::cos(g) + p.y * std::sin(g);
    power += p.x * p.x + p.y * p.y;
  }
  if (!(power > 0.0)) throw FitError("contrast fit is degenerate for all-zero data");
  return num / static_cast<double>(points.size());
}

std::string to_string(BerryVariant v) {
  switch (v) {
    case BerryVariant::echo_plus_minus:
      return "C+-";
    case BerryVariant::echo_minus_plus:
      return "C-+";
    case BerryVariant::single_plus:
      return "C+";
    case BerryVariant::single_minus:
      return "C-";
  }
  return "?";
}

void write_csv(std::ostream& os, const std::vector<SphericalSample>& samples) {
  os << "t_ns,r,theta_rad,phi_rad\n";
  char buf[128];
  for (const auto& s : samples) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", s.t, s.r, s.theta, s.phi);
    os << buf;
  }
}

}  // namespace geophase
