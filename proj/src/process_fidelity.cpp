#include "geophase/process_fidelity.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <thread>

#include "geophase/error.hpp"

namespace geophase {

namespace {

constexpr Complex kI(0.0, 1.0);

std::array<Operator, 4> pauli_basis() { return {pauli::identity(), pauli::x(), pauli::y(), pauli::z()}; }

Eigen::Vector4cd vec(const Operator& m) { return Eigen::Map<const Eigen::Vector4cd>(m.data()); }

Operator unvec(const Eigen::Vector4cd& v) { return Eigen::Map<const Operator>(v.data()); }

// Kronecker product a (x) b of 2x2 matrices.
Eigen::Matrix4cd kron(const Operator& a, const Operator& b) {
  Eigen::Matrix4cd k;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) k.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return k;
}

DensityMatrix run(const PulseProgram& program, const DensityMatrix& rho0, const std::optional<DissipationParams>& dis) {
  if (dis) return evolve_lindblad_final(program, rho0, *dis);
  // Pure inputs only; the four spanning inputs are all pure.
  Eigen::SelfAdjointEigenSolver<Operator> es(rho0);
  const PureState psi = es.eigenvectors().col(1);
  return density(evolve_unitary_final(program, psi));
}

}  // namespace

SuperOperator simulate_superoperator(const PulseProgram& program, const std::optional<DissipationParams>& dis) {
  const DensityMatrix e00 = run(program, density(ket0()), dis);
  const DensityMatrix e11 = run(program, density(ket1()), dis);
  const DensityMatrix ep = run(program, density(ket_plus()), dis);
  const DensityMatrix epi = run(program, density(ket_plus_i()), dis);
  const DensityMatrix diag = e00 + e11;
  // |+><+| +- i|+i><+i| isolate the off-diagonal units.
  const DensityMatrix e01 = ep + kI * epi - 0.5 * (1.0 + kI) * diag;
  const DensityMatrix e10 = ep - kI * epi - 0.5 * (1.0 - kI) * diag;
  SuperOperator m;
  m.col(0) = vec(e00);
  m.col(1) = vec(e10);
  m.col(2) = vec(e01);
  m.col(3) = vec(e11);
  return m;
}

ChiMatrix chi_from_superoperator(const SuperOperator& m) {
  const auto u = pauli_basis();
  ChiMatrix chi;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) chi(i, j) = (kron(u[j].conjugate(), u[i]).adjoint() * m).trace() / 4.0;
  return chi;
}

SuperOperator superoperator_from_chi(const ChiMatrix& chi) {
  const auto u = pauli_basis();
  SuperOperator m = SuperOperator::Zero();
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m += chi(i, j) * kron(u[j].conjugate(), u[i]);
  return m;
}

ChiMatrix simulate_process(const PulseProgram& program, const std::optional<DissipationParams>& dis) {
  return chi_from_superoperator(simulate_superoperator(program, dis));
}

DensityMatrix apply_chi(const ChiMatrix& chi, const DensityMatrix& rho) {
  return unvec(superoperator_from_chi(chi) * vec(rho));
}

ChiMatrix chi_of_unitary(const Operator& u) {
  const auto basis = pauli_basis();
  Eigen::Vector4cd c;
  for (int i = 0; i < 4; ++i) c(i) = (basis[i].adjoint() * u).trace() / 2.0;
  return c * c.adjoint();
}

ChiMatrix ideal_gate_chi(double s_design) {
  Operator u;
  u << 0.0, std::polar(1.0, s_design), std::polar(1.0, -s_design), 0.0;
  return chi_of_unitary(-kI * pauli::x() * u);
}

double fidelity(const ChiMatrix& chi_ideal, const ChiMatrix& chi) { return (chi_ideal * chi).trace().real(); }

std::string to_string(ProtocolKind kind) { return kind == ProtocolKind::sta ? "STA" : "adiabatic"; }

std::vector<FidelityCell> table_s1_runner(const std::vector<QubitSpec>& qubits,
                                          const std::vector<ProtocolSpec>& protocols, double dt, unsigned workers) {
  validate_dt(dt);
  const double theta0 = std::acos(0.75);
  const ChiMatrix ideal = ideal_gate_chi(kPi / 2);
  std::vector<FidelityCell> cells;
  for (const auto& q : qubits) {
    DissipationParams{q.t1, q.t2_echo}.validate();
    for (const auto& p : protocols) cells.push_back({q, p, 0.0});
  }
  auto eval = [&](std::size_t k) {
    const auto& cell = cells[k];
    const LoopGeometry g{theta0, cell.protocol.delta0, cell.protocol.t_ramp, cell.protocol.t_rot};
    const PulseProgram prog = build_phase_gate_program(g, cell.protocol.kind == ProtocolKind::sta, dt);
    const ChiMatrix chi = simulate_process(prog, DissipationParams{cell.qubit.t1, cell.qubit.t2_echo});
    cells[k].fidelity = fidelity(ideal, chi);
  };
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, cells.size()));
  if (workers <= 1) {
    for (std::size_t k = 0; k < cells.size(); ++k) eval(k);
    return cells;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t k = next++; k < cells.size(); k = next++) eval(k);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return cells;
}

std::vector<QubitSpec> default_qubits() {
  return {{"phase qubit", 270.0, 450.0}, {"Xmon qubit", 20000.0, 20000.0}};
}

std::vector<ProtocolSpec> default_protocols() {
  const double d0 = rad_per_ns_from_mhz(7.0);
  return {{ProtocolKind::adiabatic, d0, 350.0, 1000.0}, {ProtocolKind::sta, d0, 10.0, 30.0}};
}

void write_table_text(std::ostream& os, const std::vector<FidelityCell>& cells) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-14s %9s %9s %-10s %10s %10s %10s\n", "qubit", "T1 (ns)", "T2e (ns)", "protocol",
                "Tramp (ns)", "Trot (ns)", "fidelity");
  os << buf;
  for (const auto& c : cells) {
    std::snprintf(buf, sizeof buf, "%-14s %9.0f %9.0f %-10s %10.0f %10.0f %10.4f\n", c.qubit.label.c_str(),
                  c.qubit.t1, c.qubit.t2_echo, to_string(c.protocol.kind).c_str(), c.protocol.t_ramp,
                  c.protocol.t_rot, c.fidelity);
    os << buf;
  }
}

}  // namespace geophase
