#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "geophase/pulse_schedule.hpp"
#include "geophase/qubit.hpp"

namespace geophase {

/// exp(-i (B.sigma/2) dt) in closed form. dt >= 0.
Operator step_unitary(const FieldVector& b, double dt);

struct StateSample {
  double t;
  PureState psi;
};

struct DensitySample {
  double t;
  DensityMatrix rho;
};

struct DissipationParams {
  double t1 = 0.0;
  double t2_echo = 0.0;

  /// Throws ValidationError unless both times are positive.
  void validate() const;
};

/// Replaces the field applied on a slice. Receives the segment index, the
/// segment-local midpoint time of the slice and the nominal field.
using FieldHook = std::function<FieldVector(std::size_t segment, double local_t, const FieldVector& nominal)>;

struct EvolveOptions {
  /// Keep every slice boundary; otherwise only the initial and final states.
  bool record = true;
  FieldHook hook;
};

/// Midpoint-field SU(2) stepping. Every segment of duration d is cut into
/// slice_count(d, dt) equal slices; ideal pulses act instantly and add a
/// sample with the same time stamp.
std::vector<StateSample> evolve_unitary(const PulseProgram& program, const PureState& psi0,
                                        const EvolveOptions& opts = {});
PureState evolve_unitary_final(const PulseProgram& program, const PureState& psi0,
                               const FieldHook& hook = {});

/// Generator of the master equation: -i[H, rho] + relaxation (1/T1) +
/// dephasing (2/T2echo) on |1><1|.
DensityMatrix lindblad_rhs(const FieldVector& b, const DensityMatrix& rho, const DissipationParams& dis);

/// Classical RK4 per slice with the slice-midpoint field. Throws
/// IntegrationError when the trace drifts by more than 1e-6.
std::vector<DensitySample> evolve_lindblad(const PulseProgram& program, const DensityMatrix& rho0,
                                           const DissipationParams& dis, const EvolveOptions& opts = {});
DensityMatrix evolve_lindblad_final(const PulseProgram& program, const DensityMatrix& rho0,
                                    const DissipationParams& dis);

/// Lane-wise field override for batched runs.
using BatchFieldHook =
    std::function<FieldVector(std::size_t lane, std::size_t segment, double local_t, const FieldVector& nominal)>;

/// Evolves one state per program with the runtime-selected SU(2) kernel.
/// All programs must share segment kinds, durations and dt (they may differ
/// in field parameters). Returns the final states.
std::vector<PureState> evolve_unitary_batch(std::span<const PulseProgram> programs,
                                            std::span<const PureState> psi0, const BatchFieldHook& hook = {});

struct EigenPair {
  PureState s_up;
  PureState s_down;
};

/// Instantaneous eigenstates of b0.sigma/2. Throws DomainError for b0 = 0.
EigenPair instantaneous_eigenstates(const FieldVector& b0);

/// Minimum over samples of |<s_n(t)|psi(t)>|, where s_n is the reference
/// eigenstate the first sample overlaps most. Samples at zero reference
/// field are skipped.
double tracking_fidelity(const std::vector<StateSample>& states, const PulseProgram& program);

void write_csv(std::ostream& os, const std::vector<StateSample>& states);
void write_csv(std::ostream& os, const std::vector<DensitySample>& states);

}  // namespace geophase
