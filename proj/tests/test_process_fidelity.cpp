#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

#include "geophase/process_fidelity.hpp"

using namespace geophase;

namespace {

const double kD0 = rad_per_ns_from_mhz(7.0);
const double kGateTheta = std::acos(0.75);

ChiMatrix unit_chi(int i) {
  ChiMatrix c = ChiMatrix::Zero();
  c(i, i) = 1.0;
  return c;
}

DensityMatrix random_density(std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Eigen::Matrix2cd a;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) a(i, j) = {nd(rng), nd(rng)};
  DensityMatrix rho = a * a.adjoint();
  return rho / rho.trace();
}

void expect_physical(const ChiMatrix& chi) {
  EXPECT_LT((chi - chi.adjoint()).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_NEAR(chi.trace().real(), 1.0, 1e-8);
  Eigen::SelfAdjointEigenSolver<ChiMatrix> es(0.5 * (chi + chi.adjoint()));
  EXPECT_GT(es.eigenvalues().minCoeff(), -1e-8);
}

}  // namespace

TEST(Chi, IdentityProgram) {
  const PulseProgram p({Segment::idle(5.0)}, 0.01);
  EXPECT_LT((simulate_process(p, std::nullopt) - unit_chi(0)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Chi, IdealPhaseGate) {
  const PulseProgram p = build_phase_gate_program({kGateTheta, kD0, 10.0, 30.0}, true, 0.01);
  const ChiMatrix chi = simulate_process(p, std::nullopt);
  EXPECT_LT((chi - unit_chi(3)).cwiseAbs().maxCoeff(), 1e-3);
  expect_physical(chi);
}

TEST(Chi, InfiniteTimesMatchUnitaryPath) {
  const PulseProgram p = build_phase_gate_program({0.9, kD0, 10.0, 30.0}, true, 0.01);
  const ChiMatrix a = simulate_process(p, std::nullopt);
  const ChiMatrix b = simulate_process(p, DissipationParams{1e12, 1e12});
  EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Chi, ReproducesDissipativeMapOnRandomStates) {
  const PulseProgram p = build_phase_gate_program({0.9, kD0, 10.0, 30.0}, true, 0.01);
  const DissipationParams dis{270.0, 450.0};
  const ChiMatrix chi = simulate_process(p, dis);
  expect_physical(chi);
  std::mt19937_64 rng(99);
  for (int k = 0; k < 50; ++k) {
    const DensityMatrix rho = random_density(rng);
    const DensityMatrix direct = evolve_lindblad_final(p, rho, dis);
    EXPECT_LT((apply_chi(chi, rho) - direct).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(Chi, SuperoperatorRoundTrip) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> nd;
  for (int k = 0; k < 20; ++k) {
    SuperOperator m;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) m(i, j) = {nd(rng), nd(rng)};
    EXPECT_LT((superoperator_from_chi(chi_from_superoperator(m)) - m).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(IdealGate, SpecialAngles) {
  EXPECT_LT((ideal_gate_chi(kPi / 2) - unit_chi(3)).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT((ideal_gate_chi(0.0) - unit_chi(0)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(IdealGate, RankOneUnitTrace) {
  for (double s : {0.1, 0.8, 2.0, 4.5}) {
    const ChiMatrix chi = ideal_gate_chi(s);
    EXPECT_NEAR(chi.trace().real(), 1.0, 1e-14);
    Eigen::SelfAdjointEigenSolver<ChiMatrix> es(chi);
    EXPECT_NEAR(es.eigenvalues()(3), 1.0, 1e-14);
    EXPECT_NEAR(es.eigenvalues().head<3>().cwiseAbs().maxCoeff(), 0.0, 1e-14);
  }
}

TEST(IdealGate, MatchesUnitaryChi) {
  const double s = 1.3;
  Operator core;
  core << 0, std::polar(1.0, s), std::polar(1.0, -s), 0;
  const Operator u = Complex(0, -1) * pauli::x() * core;
  EXPECT_LT((chi_of_unitary(u) - ideal_gate_chi(s)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Fidelity, SelfAndDepolarizing) {
  const ChiMatrix ideal = ideal_gate_chi(kPi / 2);
  EXPECT_NEAR(fidelity(ideal, ideal), 1.0, 1e-15);
  EXPECT_NEAR(fidelity(ideal, 0.25 * ChiMatrix::Identity()), 0.25, 1e-15);
  const ChiMatrix other = ideal_gate_chi(1.1);
  EXPECT_NEAR(fidelity(other, other), 1.0, 1e-14);
}

TEST(TableRunner, OrderAndLabels) {
  const std::vector<QubitSpec> qubits{{"a", 1e5, 1e5}, {"b", 200.0, 300.0}};
  const std::vector<ProtocolSpec> protocols{{ProtocolKind::sta, kD0, 10.0, 30.0}};
  const auto cells = table_s1_runner(qubits, protocols, 0.02, 2);
  ASSERT_EQ(cells.size(), 2u);
  EXPECT_EQ(cells[0].qubit.label, "a");
  EXPECT_EQ(cells[1].qubit.label, "b");
  EXPECT_GT(cells[0].fidelity, 0.99);
  EXPECT_LT(cells[1].fidelity, cells[0].fidelity);
}

TEST(TableRunner, LongerAdiabaticProtocolApproachesFloor) {
  const std::vector<QubitSpec> qubits{{"phase", 270.0, 450.0}};
  const std::vector<ProtocolSpec> protocols{{ProtocolKind::adiabatic, kD0, 35.0, 100.0},
                                            {ProtocolKind::adiabatic, kD0, 70.0, 200.0},
                                            {ProtocolKind::adiabatic, kD0, 140.0, 400.0}};
  const auto cells = table_s1_runner(qubits, protocols, 0.02);
  for (std::size_t i = 1; i < cells.size(); ++i) {
    EXPECT_LT(std::abs(cells[i].fidelity - 0.25), std::abs(cells[i - 1].fidelity - 0.25));
  }
}

TEST(TableRunner, DefaultsDescribeTheTwoDevices) {
  const auto q = default_qubits();
  ASSERT_EQ(q.size(), 2u);
  EXPECT_EQ(q[0].t1, 270.0);
  EXPECT_EQ(q[0].t2_echo, 450.0);
  EXPECT_EQ(q[1].t1, 20000.0);
  const auto p = default_protocols();
  ASSERT_EQ(p.size(), 2u);
}
