#pragma once

// Control-field synthesis: reference ramps and rotations, their
// counter-diabatic corrections, and the experiment programs built from them.

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "geophase/field.hpp"
#include "geophase/qubit.hpp"

namespace geophase {

/// Largest admissible design polar angle; tan(theta0) must stay finite.
inline constexpr double kMaxTheta0 = kPi / 2 - 1e-6;

enum class RampDirection { up, down };

/// Orientation of a circular loop: plus is counterclockwise (phi = +omega0 t).
enum class Loop { plus, minus };

/// Echo procedures: C+- runs the plus loop before the refocusing pulse.
enum class EchoVariant { plus_minus, minus_plus };

constexpr double loop_sign(Loop loop) { return loop == Loop::plus ? 1.0 : -1.0; }

struct RampSpec {
  double theta0 = 0.0;
  double delta0 = 0.0;
  double t_ramp = 0.0;
  RampDirection direction = RampDirection::up;
};

struct RotationSpec {
  double theta0 = 0.0;
  double delta0 = 0.0;
  /// Signed angular speed; positive for the plus loop. |omega0| = 2 pi / t_rot.
  double omega0 = 0.0;
  double t_rot = 0.0;

  static RotationSpec make(double theta0, double delta0, double t_rot, Loop loop);

  Loop loop() const { return omega0 >= 0 ? Loop::plus : Loop::minus; }
  /// In-plane amplitude of the reference field, delta0 tan(theta0).
  double omega_ref() const;
  /// In-plane amplitude of reference plus counter-diabatic field.
  double omega_total() const;
  /// z component of reference plus counter-diabatic field.
  double delta_total() const;
};

/// Instantaneous rotation (zero duration).
struct IdealPulse {
  Axis axis = Axis::x;
  double angle = 0.0;
};

/// Square resonant pulse: constant field of magnitude angle/duration along
/// the axis, with zero detuning.
struct ResonantPulse {
  Axis axis = Axis::x;
  double angle = 0.0;
  double duration = 0.0;
};

struct Idle {
  double duration = 0.0;
};

enum class SegmentKind { ramp, rotation, ideal_pulse, resonant_pulse, idle };

class Segment {
 public:
  using Body = std::variant<RampSpec, RotationSpec, IdealPulse, ResonantPulse, Idle>;

  static Segment ramp(const RampSpec& spec, bool sta);
  /// A rotation may be interrupted early: duration <= spec.t_rot.
  static Segment rotation(const RotationSpec& spec, bool sta);
  static Segment rotation(const RotationSpec& spec, bool sta, double duration);
  static Segment ideal_pulse(Axis axis, double angle);
  static Segment resonant_pulse(Axis axis, double angle, double duration);
  static Segment idle(double duration);

  SegmentKind kind() const;
  const Body& body() const { return body_; }
  bool sta_enabled() const { return sta_; }
  double duration() const { return duration_; }

  template <class T>
  const T& as() const {
    return std::get<T>(body_);
  }

 private:
  Segment(Body body, bool sta, double duration);

  Body body_;
  bool sta_ = false;
  double duration_ = 0.0;
};

class PulseProgram {
 public:
  PulseProgram() = default;
  PulseProgram(std::vector<Segment> segments, double dt);

  const std::vector<Segment>& segments() const { return segments_; }
  double dt() const { return dt_; }
  double total_duration() const { return total_; }
  /// Start time of segment i.
  double start_time(std::size_t i) const { return starts_.at(i); }

  struct Location {
    std::size_t index;
    double local_t;
  };
  /// Timed segment covering t. Boundaries belong to the later segment,
  /// except t == total_duration which maps to the end of the last one.
  Location locate(double t) const;

 private:
  std::vector<Segment> segments_;
  std::vector<double> starts_;
  double dt_ = 0.01;
  double total_ = 0.0;
};

/// Number of integration slices for a segment of the given duration.
std::size_t slice_count(double duration, double dt);

FieldVector reference_ramp_field(const RampSpec& spec, double t);
FieldVector reference_ramp_rate(const RampSpec& spec, double t);
FieldVector reference_rotation_field(const RotationSpec& spec, double t);
FieldVector reference_rotation_rate(const RotationSpec& spec, double t);

/// (b0 x b0_dot) / |b0|^2. Throws SingularFieldError when |b0| = 0.
FieldVector counter_diabatic_field(const FieldVector& b0, const FieldVector& b0_dot);

/// Reference field of a timed segment at local time t (pulses: the pulse field).
FieldVector segment_reference_field(const Segment& seg, double t);
/// Reference plus counter-diabatic field when the segment has STA enabled.
FieldVector segment_field(const Segment& seg, double t);

FieldVector total_field(const PulseProgram& program, double t);
FieldVector reference_field(const PulseProgram& program, double t);

struct LoopGeometry {
  double theta0 = 0.0;
  double delta0 = 0.0;
  double t_ramp = 0.0;
  double t_rot = 0.0;
};

enum class PulseModel { ideal, resonant };

/// How the pi/2 and pi pulses are realized.
struct PulseOptions {
  PulseModel model = PulseModel::ideal;
  double duration = 2.0;
};

/// Throws ValidationError listing the first violated invariant.
void validate_geometry(const LoopGeometry& g);
void validate_dt(double dt);

/// pi/2(y), ramp-up, first loop, ramp-down, pi(x), ramp-up, second loop, ramp-down.
PulseProgram build_echo_program(const LoopGeometry& g, EchoVariant variant, bool sta, double dt,
                                const PulseOptions& pulses = {});

/// pi/2(y), pi(x), ramp-up, loop, ramp-down; STA always on.
PulseProgram build_single_loop_program(const LoopGeometry& g, Loop loop, double dt,
                                       const PulseOptions& pulses = {});

/// Ramp-up followed by a rotation interrupted at t_stop; no preparation pulse.
PulseProgram build_trajectory_program(const LoopGeometry& g, double t_stop, Loop loop, double dt);

/// Echo body without the preparation pulse, followed by an ideal pi(x): the
/// 2S-phase gate whose process matrix is compared with the ideal one.
PulseProgram build_phase_gate_program(const LoopGeometry& g, bool sta, double dt);

std::string to_string(Loop loop);
std::string to_string(EchoVariant v);
Loop parse_loop(const std::string& s);
EchoVariant parse_echo_variant(const std::string& s);
std::string to_string(Axis axis);
Axis parse_axis(const std::string& s);

}  // namespace geophase
