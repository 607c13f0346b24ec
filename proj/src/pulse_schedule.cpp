#include "geophase/pulse_schedule.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "geophase/error.hpp"

namespace geophase {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require(bool ok, const std::string& what) {
  if (!ok) throw ValidationError(what);
}

void check_theta0(double theta0) {
  require(std::isfinite(theta0) && theta0 > 0.0 && theta0 < kMaxTheta0,
          "theta0 must lie in (0, pi/2)");
}

void check_delta0(double delta0) {
  require(std::isfinite(delta0) && delta0 > 0.0, "delta0 must be positive");
}

void check_ramp(const RampSpec& s) {
  check_theta0(s.theta0);
  check_delta0(s.delta0);
  require(std::isfinite(s.t_ramp) && s.t_ramp > 0.0, "t_ramp must be positive");
}

void check_rotation(const RotationSpec& s) {
  check_theta0(s.theta0);
  check_delta0(s.delta0);
  require(std::isfinite(s.t_rot) && s.t_rot > 0.0, "t_rot must be positive");
  require(std::abs(std::abs(s.omega0) - kTwoPi / s.t_rot) <= 1e-9 * kTwoPi / s.t_rot,
          "|omega0| must equal 2 pi / t_rot");
}

void check_window(double t, double length, const char* what) {
  // Tolerate accumulated rounding at the window edges.
  const double slack = 1e-9 * std::max(1.0, length);
  if (!(t >= -slack && t <= length + slack)) {
    std::ostringstream os;
    os << what << ": t = " << t << " outside [0, " << length << "]";
    throw DomainError(os.str());
  }
}

FieldVector pulse_field(Axis axis, double magnitude) {
  switch (axis) {
    case Axis::x:
      return {magnitude, 0.0, 0.0};
    case Axis::y:
      return {0.0, magnitude, 0.0};
    case Axis::z:
      return {0.0, 0.0, magnitude};
  }
  return {};
}

Segment make_pulse(Axis axis, double angle, const PulseOptions& opts) {
  if (opts.model == PulseModel::ideal) return Segment::ideal_pulse(axis, angle);
  return Segment::resonant_pulse(axis, angle, opts.duration);
}

}  // namespace

RotationSpec RotationSpec::make(double theta0, double delta0, double t_rot, Loop loop) {
  RotationSpec s{theta0, delta0, 0.0, t_rot};
  require(std::isfinite(t_rot) && t_rot > 0.0, "t_rot must be positive");
  s.omega0 = loop_sign(loop) * kTwoPi / t_rot;
  check_rotation(s);
  return s;
}

double RotationSpec::omega_ref() const { return delta0 * std::tan(theta0); }

double RotationSpec::omega_total() const {
  return omega_ref() - omega0 * std::sin(theta0) * std::cos(theta0);
}

double RotationSpec::delta_total() const {
  const double s = std::sin(theta0);
  return delta0 + omega0 * s * s;
}

// ---------------------------------------------------------------------------

Segment::Segment(Body body, bool sta, double duration)
    : body_(std::move(body)), sta_(sta), duration_(duration) {}

Segment Segment::ramp(const RampSpec& spec, bool sta) {
  check_ramp(spec);
  return Segment(spec, sta, spec.t_ramp);
}

Segment Segment::rotation(const RotationSpec& spec, bool sta) {
  return rotation(spec, sta, spec.t_rot);
}

Segment Segment::rotation(const RotationSpec& spec, bool sta, double duration) {
  check_rotation(spec);
  require(std::isfinite(duration) && duration >= 0.0 && duration <= spec.t_rot * (1 + 1e-12),
          "rotation duration must lie in [0, t_rot]");
  return Segment(spec, sta, std::min(duration, spec.t_rot));
}

Segment Segment::ideal_pulse(Axis axis, double angle) {
  require(std::isfinite(angle), "pulse angle must be finite");
  return Segment(IdealPulse{axis, angle}, false, 0.0);
}

Segment Segment::resonant_pulse(Axis axis, double angle, double duration) {
  require(std::isfinite(angle), "pulse angle must be finite");
  require(std::isfinite(duration) && duration > 0.0, "resonant pulse duration must be positive");
  return Segment(ResonantPulse{axis, angle, duration}, false, duration);
}

Segment Segment::idle(double duration) {
  require(std::isfinite(duration) && duration >= 0.0, "idle duration must be non-negative");
  return Segment(Idle{duration}, false, duration);
}

SegmentKind Segment::kind() const {
  return std::visit(Overloaded{
                        [](const RampSpec&) { return SegmentKind::ramp; },
                        [](const RotationSpec&) { return SegmentKind::rotation; },
                        [](const IdealPulse&) { return SegmentKind::ideal_pulse; },
                        [](const ResonantPulse&) { return SegmentKind::resonant_pulse; },
                        [](const Idle&) { return SegmentKind::idle; },
                    },
                    body_);
}

// ---------------------------------------------------------------------------

PulseProgram::PulseProgram(std::vector<Segment> segments, double dt)
    : segments_(std::move(segments)), dt_(dt) {
  validate_dt(dt);
  starts_.reserve(segments_.size());
  double t = 0.0;
  for (const auto& s : segments_) {
    starts_.push_back(t);
    t += s.duration();
  }
  total_ = t;
}

PulseProgram::Location PulseProgram::locate(double t) const {
  check_window(t, total_, "program");
  std::size_t last_timed = segments_.size();
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    const double d = segments_[i].duration();
    if (d <= 0.0) continue;
    last_timed = i;
    if (t < starts_[i] + d) return {i, std::max(0.0, t - starts_[i])};
  }
  if (last_timed == segments_.size()) throw DomainError("program has no timed segment");
  return {last_timed, segments_[last_timed].duration()};
}

std::size_t slice_count(double duration, double dt) {
  if (duration <= 0.0) return 0;
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(duration / dt)));
}

// ---------------------------------------------------------------------------

FieldVector reference_ramp_field(const RampSpec& spec, double t) {
  check_window(t, spec.t_ramp, "ramp");
  const double frac = std::clamp(t / spec.t_ramp, 0.0, 1.0);
  const double theta = spec.theta0 * (spec.direction == RampDirection::up ? frac : 1.0 - frac);
  return {spec.delta0 * std::tan(theta), 0.0, spec.delta0};
}

FieldVector reference_ramp_rate(const RampSpec& spec, double t) {
  check_window(t, spec.t_ramp, "ramp");
  const double frac = std::clamp(t / spec.t_ramp, 0.0, 1.0);
  const bool up = spec.direction == RampDirection::up;
  const double theta = spec.theta0 * (up ? frac : 1.0 - frac);
  const double theta_dot = (up ? 1.0 : -1.0) * spec.theta0 / spec.t_ramp;
  const double sec = 1.0 / std::cos(theta);
  return {spec.delta0 * sec * sec * theta_dot, 0.0, 0.0};
}

FieldVector reference_rotation_field(const RotationSpec& spec, double t) {
  check_window(t, spec.t_rot, "rotation");
  const double phi = spec.omega0 * t;
  const double amp = spec.omega_ref();
  return {amp * std::cos(phi), amp * std::sin(phi), spec.delta0};
}

FieldVector reference_rotation_rate(const RotationSpec& spec, double t) {
  check_window(t, spec.t_rot, "rotation");
  const double phi = spec.omega0 * t;
  const double amp = spec.omega_ref() * spec.omega0;
  return {-amp * std::sin(phi), amp * std::cos(phi), 0.0};
}

FieldVector counter_diabatic_field(const FieldVector& b0, const FieldVector& b0_dot) {
  const double n2 = b0.norm_sq();
  if (!(n2 > 0.0)) throw SingularFieldError("counter-diabatic field undefined for a zero reference field");
  return (1.0 / n2) * cross(b0, b0_dot);
}

FieldVector segment_reference_field(const Segment& seg, double t) {
  return std::visit(Overloaded{
                        [&](const RampSpec& s) { return reference_ramp_field(s, t); },
                        [&](const RotationSpec& s) { return reference_rotation_field(s, t); },
                        [](const IdealPulse&) { return FieldVector{}; },
                        [&](const ResonantPulse& p) {
                          check_window(t, p.duration, "pulse");
                          return pulse_field(p.axis, p.angle / p.duration);
                        },
                        [&](const Idle& i) {
                          check_window(t, i.duration, "idle");
                          return FieldVector{};
                        },
                    },
                    seg.body());
}

FieldVector segment_field(const Segment& seg, double t) {
  const FieldVector b0 = segment_reference_field(seg, t);
  if (!seg.sta_enabled()) return b0;
  switch (seg.kind()) {
    case SegmentKind::ramp:
      return b0 + counter_diabatic_field(b0, reference_ramp_rate(seg.as<RampSpec>(), t));
    case SegmentKind::rotation:
      return b0 + counter_diabatic_field(b0, reference_rotation_rate(seg.as<RotationSpec>(), t));
    default:
      return b0;
  }
}

FieldVector total_field(const PulseProgram& program, double t) {
  const auto loc = program.locate(t);
  return segment_field(program.segments()[loc.index], loc.local_t);
}

FieldVector reference_field(const PulseProgram& program, double t) {
  const auto loc = program.locate(t);
  return segment_reference_field(program.segments()[loc.index], loc.local_t);
}

// ---------------------------------------------------------------------------

void validate_geometry(const LoopGeometry& g) {
  check_theta0(g.theta0);
  check_delta0(g.delta0);
  require(std::isfinite(g.t_ramp) && g.t_ramp > 0.0, "t_ramp must be positive");
  require(std::isfinite(g.t_rot) && g.t_rot > 0.0, "t_rot must be positive");
}

void validate_dt(double dt) { require(std::isfinite(dt) && dt > 0.0, "dt must be positive"); }

namespace {

void append_loop(std::vector<Segment>& out, const LoopGeometry& g, Loop loop, bool sta) {
  out.push_back(Segment::ramp({g.theta0, g.delta0, g.t_ramp, RampDirection::up}, sta));
  out.push_back(Segment::rotation(RotationSpec::make(g.theta0, g.delta0, g.t_rot, loop), sta));
  out.push_back(Segment::ramp({g.theta0, g.delta0, g.t_ramp, RampDirection::down}, sta));
}

}  // namespace

PulseProgram build_echo_program(const LoopGeometry& g, EchoVariant variant, bool sta, double dt,
                                const PulseOptions& pulses) {
  validate_geometry(g);
  validate_dt(dt);
  const Loop first = variant == EchoVariant::plus_minus ? Loop::plus : Loop::minus;
  const Loop second = variant == EchoVariant::plus_minus ? Loop::minus : Loop::plus;
  std::vector<Segment> segs;
  segs.push_back(make_pulse(Axis::y, kPi / 2, pulses));
  append_loop(segs, g, first, sta);
  segs.push_back(make_pulse(Axis::x, kPi, pulses));
  append_loop(segs, g, second, sta);
  return PulseProgram(std::move(segs), dt);
}

PulseProgram build_single_loop_program(const LoopGeometry& g, Loop loop, double dt,
                                       const PulseOptions& pulses) {
  validate_geometry(g);
  validate_dt(dt);
  std::vector<Segment> segs;
  segs.push_back(make_pulse(Axis::y, kPi / 2, pulses));
  segs.push_back(make_pulse(Axis::x, kPi, pulses));
  append_loop(segs, g, loop, true);
  return PulseProgram(std::move(segs), dt);
}

PulseProgram build_trajectory_program(const LoopGeometry& g, double t_stop, Loop loop, double dt) {
  validate_geometry(g);
  validate_dt(dt);
  if (!(t_stop >= 0.0 && t_stop <= g.t_rot)) throw DomainError("t_stop must lie in [0, t_rot]");
  std::vector<Segment> segs;
  segs.push_back(Segment::ramp({g.theta0, g.delta0, g.t_ramp, RampDirection::up}, true));
  if (t_stop > 0.0) {
    segs.push_back(
        Segment::rotation(RotationSpec::make(g.theta0, g.delta0, g.t_rot, loop), true, t_stop));
  }
  return PulseProgram(std::move(segs), dt);
}

PulseProgram build_phase_gate_program(const LoopGeometry& g, bool sta, double dt) {
  validate_geometry(g);
  validate_dt(dt);
  std::vector<Segment> segs;
  append_loop(segs, g, Loop::plus, sta);
  segs.push_back(Segment::ideal_pulse(Axis::x, kPi));
  append_loop(segs, g, Loop::minus, sta);
  segs.push_back(Segment::ideal_pulse(Axis::x, kPi));
  return PulseProgram(std::move(segs), dt);
}

// ---------------------------------------------------------------------------

std::string to_string(Loop loop) { return loop == Loop::plus ? "C+" : "C-"; }

std::string to_string(EchoVariant v) { return v == EchoVariant::plus_minus ? "C+-" : "C-+"; }

Loop parse_loop(const std::string& s) {
  if (s == "C+" || s == "plus" || s == "+") return Loop::plus;
  if (s == "C-" || s == "minus" || s == "-") return Loop::minus;
  throw ValidationError("unknown loop direction '" + s + "' (expected C+ or C-)");
}

EchoVariant parse_echo_variant(const std::string& s) {
  if (s == "C+-" || s == "plus_minus") return EchoVariant::plus_minus;
  if (s == "C-+" || s == "minus_plus") return EchoVariant::minus_plus;
  throw ValidationError("unknown echo variant '" + s + "' (expected C+- or C-+)");
}

std::string to_string(Axis axis) {
  switch (axis) {
    case Axis::x:
      return "x";
    case Axis::y:
      return "y";
    case Axis::z:
      return "z";
  }
  return "?";
}

Axis parse_axis(const std::string& s) {
  if (s == "x") return Axis::x;
  if (s == "y") return Axis::y;
  if (s == "z") return Axis::z;
  throw ValidationError("unknown pulse axis '" + s + "'");
}

}  // namespace geophase
