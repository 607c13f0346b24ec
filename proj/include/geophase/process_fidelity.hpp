#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "geophase/propagator.hpp"
#include "geophase/pulse_schedule.hpp"

namespace geophase {

/// Process matrix in the basis {I, sigma_x, sigma_y, sigma_z}:
/// E(rho) = sum_ij chi_ij u_i rho u_j^dagger.
using ChiMatrix = Eigen::Matrix4cd;
/// Linear map on column-stacked 2x2 matrices.
using SuperOperator = Eigen::Matrix4cd;

/// Superoperator of the program, built from the outputs for |0>, |1>, |+>, |+i>.
SuperOperator simulate_superoperator(const PulseProgram& program, const std::optional<DissipationParams>& dis);

ChiMatrix chi_from_superoperator(const SuperOperator& m);
SuperOperator superoperator_from_chi(const ChiMatrix& chi);

ChiMatrix simulate_process(const PulseProgram& program, const std::optional<DissipationParams>& dis);

DensityMatrix apply_chi(const ChiMatrix& chi, const DensityMatrix& rho);

/// Rank-one chi of U_tot = (-i sigma_x) [[0, e^{iS}], [e^{-iS}, 0]].
ChiMatrix ideal_gate_chi(double s_design);
ChiMatrix chi_of_unitary(const Operator& u);

/// Re Tr(chi_ideal chi)
double fidelity(const ChiMatrix& chi_ideal, const ChiMatrix& chi);

struct QubitSpec {
  std::string label;
  double t1 = 0.0;
  double t2_echo = 0.0;
};

enum class ProtocolKind { sta, adiabatic };

struct ProtocolSpec {
  ProtocolKind kind = ProtocolKind::sta;
  double delta0 = 0.0;
  double t_ramp = 0.0;
  double t_rot = 0.0;
};

std::string to_string(ProtocolKind kind);

struct FidelityCell {
  QubitSpec qubit;
  ProtocolSpec protocol;
  double fidelity;
};

/// theta0 = arccos(3/4): the C+- echo followed by an ideal pi_x, compared
/// with the ideal pi-phase gate. Cells are evaluated in parallel and
/// returned qubit-major.
std::vector<FidelityCell> table_s1_runner(const std::vector<QubitSpec>& qubits,
                                          const std::vector<ProtocolSpec>& protocols, double dt = 0.01,
                                          unsigned workers = 0);

std::vector<QubitSpec> default_qubits();
std::vector<ProtocolSpec> default_protocols();

void write_table_text(std::ostream& os, const std::vector<FidelityCell>& cells);

}  // namespace geophase
