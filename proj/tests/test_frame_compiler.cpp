#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "geophase/error.hpp"
#include "geophase/frame_compiler.hpp"
#include "geophase/tomography.hpp"

using namespace geophase;

namespace {

const double kD0 = rad_per_ns_from_mhz(7.0);

PulseProgram rotation_only(double theta0, bool sta, double t_rot = 30.0) {
  return PulseProgram({Segment::rotation(RotationSpec::make(theta0, kD0, t_rot, Loop::plus), sta)}, 0.01);
}

}  // namespace

TEST(CompileIq, ReferenceRotationHasNoFramePhase) {
  const double th = 0.7;
  const IQWaveform w = compile_iq(rotation_only(th, false), kD0);
  const double o0 = kD0 * std::tan(th), w0 = kTwoPi / 30.0;
  ASSERT_EQ(w.size(), 3001u);
  for (std::size_t k = 0; k + 1 < w.size(); k += 97) {
    const double t = (k + 0.5) * w.dt;
    EXPECT_NEAR(w.i_samples[k], o0 * std::cos(w0 * t), 1e-15);
    EXPECT_NEAR(w.q_samples[k], -o0 * std::sin(w0 * t), 1e-15);
    EXPECT_NEAR(w.xi_samples[k], 0.0, 1e-15);
  }
}

TEST(CompileIq, StaRotationHasLinearFrameRamp) {
  const double th = kPi / 4;
  const IQWaveform w = compile_iq(rotation_only(th, true), kD0);
  const double slope = (kTwoPi / 30.0) * std::pow(std::sin(th), 2);
  for (std::size_t k = 0; k < w.size(); k += 113) EXPECT_NEAR(w.xi_samples[k], slope * k * w.dt, 1e-12);
}

TEST(CompileIq, ZeroFieldIdle) {
  const IQWaveform w = compile_iq(PulseProgram({Segment::idle(5.0)}, 0.01), kD0);
  for (std::size_t k = 0; k < w.size(); ++k) {
    EXPECT_EQ(w.i_samples[k], 0.0);
    EXPECT_EQ(w.q_samples[k], 0.0);
    EXPECT_NEAR(w.xi_samples[k], -kD0 * k * w.dt, 1e-12);
  }
}

TEST(CompileIq, RecoversRotatingFrameField) {
  const PulseProgram p = build_echo_program({1.0, kD0, 10.0, 30.0}, EchoVariant::plus_minus, true, 0.01,
                                            {PulseModel::resonant, 20.0});
  const IQWaveform w = compile_iq(p, kD0);
  for (std::size_t k = 0; k + 1 < w.size(); ++k) {
    const double xi_mid = 0.5 * (w.xi_samples[k] + w.xi_samples[k + 1]);
    const double c = std::cos(xi_mid), s = std::sin(xi_mid);
    const FieldVector b = total_field(p, (k + 0.5) * w.dt);
    ASSERT_NEAR(w.i_samples[k] * c + w.q_samples[k] * s, b.bx, 1e-12);
    ASSERT_NEAR(w.i_samples[k] * s - w.q_samples[k] * c, b.by, 1e-12);
    ASSERT_NEAR(kD0 + (w.xi_samples[k + 1] - w.xi_samples[k]) / w.dt, b.bz, 1e-12);
  }
}

TEST(CompileIq, IdealPulsesRejected) {
  const PulseProgram p = build_echo_program({1.0, kD0, 10.0, 30.0}, EchoVariant::plus_minus, true, 0.01);
  EXPECT_THROW(compile_iq(p, kD0), ValidationError);
}

TEST(Iqw1, RoundTripIsExact) {
  const IQWaveform w = compile_iq(rotation_only(0.9, true), kD0, 6.3);
  std::stringstream ss;
  write_iqw1(ss, w);
  const IQWaveform r = read_iqw1(ss);
  EXPECT_EQ(r.dt, w.dt);
  EXPECT_EQ(r.omega_d, w.omega_d);
  EXPECT_EQ(r.i_samples, w.i_samples);
  EXPECT_EQ(r.q_samples, w.q_samples);
  EXPECT_EQ(r.xi_samples, w.xi_samples);
}

TEST(Iqw1, RejectsGarbage) {
  std::stringstream bad("IQW0xxxxxxxx");
  EXPECT_THROW(read_iqw1(bad), ValidationError);
  std::stringstream ss;
  write_iqw1(ss, compile_iq(rotation_only(0.9, true), kD0));
  std::string s = ss.str();
  std::stringstream cut(s.substr(0, s.size() - 5));
  EXPECT_THROW(read_iqw1(cut), ValidationError);
}

TEST(LabFrame, ZeroWaveformPrecesses) {
  IQWaveform w;
  w.dt = 0.1;
  w.i_samples.assign(101, 0.0);
  w.q_samples.assign(101, 0.0);
  w.xi_samples.assign(101, 0.0);
  const LabFrameSpec lab = LabFrameSpec::scaled(1.0, kD0);
  const auto out = simulate_lab_frame(w, lab, ket1());
  const double t = 10.0;
  EXPECT_NEAR(out.back().t, t, 1e-12);
  EXPECT_LT((out.back().psi - std::polar(1.0, -lab.omega10 * t / 2) * ket1()).norm(), 1e-10);
}

TEST(LabFrame, ResonantRabiFlop) {
  const double omega = 0.05;
  const LabFrameSpec lab{kTwoPi, kTwoPi, 0.002};
  const double t_pi = kPi / omega;
  const std::size_t n = 2000;
  IQWaveform w;
  w.dt = t_pi / n;
  w.omega_d = lab.omega_d;
  w.i_samples.assign(n + 1, omega);
  w.q_samples.assign(n + 1, 0.0);
  w.xi_samples.assign(n + 1, 0.0);
  const auto out = simulate_lab_frame(w, lab, ket0());
  EXPECT_GT(std::norm(out.back().psi(1)), 1.0 - 1e-3);
  EXPECT_NEAR(std::norm(out[n / 2].psi(1)), 0.5, 1e-2);
}

TEST(LabFrame, UnderResolvedCarrierRefused) {
  LabFrameSpec lab = LabFrameSpec::scaled(1.0, kD0, 0.05);
  EXPECT_THROW(lab.validate(), ValidationError);
  const IQWaveform w = compile_iq(rotation_only(0.5, true), kD0, lab.omega_d);
  EXPECT_THROW(simulate_lab_frame(w, lab, ket0()), ValidationError);
}

TEST(FrameCorrect, IdentityCases) {
  IQWaveform w;
  w.dt = 1.0;
  w.omega_d = 3.0;
  w.i_samples.assign(3, 0.0);
  w.q_samples.assign(3, 0.0);
  w.xi_samples = {0.0, 0.4, 0.9};
  EXPECT_EQ(frame_correct(ket_plus(), 0.0, w), ket_plus());
  EXPECT_EQ(frame_correct(ket0(), 2.0, w), ket0());
  EXPECT_LT((frame_correct(ket1(), 2.0, w) - std::polar(1.0, 6.9) * ket1()).norm(), 1e-15);
  EXPECT_THROW(frame_correct(ket1(), 0.5, w), DomainError);
}

TEST(Rwa, WeakDriveDeviationIsSmall) {
  const double omega_d = kTwoPi + kD0;
  const double omega = 0.01 * omega_d;
  const PulseProgram p({Segment::resonant_pulse(Axis::x, kPi, kPi / omega)}, 0.01);
  EXPECT_LE(rwa_deviation(p, kD0, LabFrameSpec::scaled(1.0, kD0)), 1e-3);
}

TEST(Rwa, DeviationGrowsWithDriveStrength) {
  const LabFrameSpec lab = LabFrameSpec::scaled(1.0, kD0);
  auto dev = [&](double ratio) {
    const double omega = ratio * lab.omega_d;
    return rwa_deviation(PulseProgram({Segment::resonant_pulse(Axis::x, kPi / 2, kPi / 2 / omega)}, 0.01), kD0, lab);
  };
  EXPECT_LT(dev(0.01), dev(0.04));
}

TEST(Rwa, NoDriveNoDeviation) {
  EXPECT_LE(rwa_deviation(PulseProgram({Segment::idle(20.0)}, 0.01), kD0, LabFrameSpec::scaled(1.0, kD0)), 1e-10);
}

TEST(Rwa, CompiledEchoReproducesBerryPhase) {
  const double th = kPi / 6;
  const double s = kTwoPi * (1 - std::cos(th));
  const PulseProgram p = build_echo_program({th, kD0, 10.0, 30.0}, EchoVariant::plus_minus, true, 0.01,
                                            {PulseModel::resonant, 20.0});
  const LabFrameSpec lab = LabFrameSpec::scaled(1.0, kD0);
  const IQWaveform w = compile_iq(p, kD0, lab.omega_d, lab.dt_fine);
  const auto out = simulate_lab_frame(w, lab, ket0());
  const PureState corrected = frame_correct(out.back().psi, out.back().t, w);
  const PureState rot = evolve_unitary_final(PulseProgram(p.segments(), w.dt), ket0());
  EXPECT_GE(std::norm(rot.dot(corrected)), 0.999);
  const BlochVector bl = bloch_vector(corrected);
  const BlochVector br = bloch_vector(rot);
  const double g_lab = extract_berry_phase(bl.x, bl.y, s, BerryVariant::echo_plus_minus).gamma;
  const double g_rot = extract_berry_phase(br.x, br.y, s, BerryVariant::echo_plus_minus).gamma;
  EXPECT_NEAR(g_lab, g_rot, 0.01);
}
