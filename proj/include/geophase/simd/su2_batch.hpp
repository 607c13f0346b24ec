#pragma once

// Batched SU(2) propagation: many independent two-level states, one field per
// lane, advanced by exp(-i B.sigma dt / 2) in closed form. Lanes are stored as
// structure-of-arrays so the vector variants can process four lanes per
// instruction. A scalar reference and an AVX2 variant exist; the variant is
// chosen once at runtime from CPU capabilities (override with the
// GEOPHASE_SIMD environment variable: "scalar" or "avx2").

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace geophase::simd {

enum class Isa { scalar, avx2 };

std::string_view to_string(Isa isa);

/// Amplitudes a0 = re0 + i im0, a1 = re1 + i im1 per lane.
struct SpinorBatch {
  std::vector<double> re0, im0, re1, im1;

  SpinorBatch() = default;
  explicit SpinorBatch(std::size_t n) : re0(n), im0(n), re1(n), im1(n) {}
  std::size_t size() const { return re0.size(); }
};

struct FieldBatch {
  std::vector<double> bx, by, bz;

  FieldBatch() = default;
  explicit FieldBatch(std::size_t n) : bx(n), by(n), bz(n) {}
  std::size_t size() const { return bx.size(); }
};

struct SpinorView {
  std::span<double> re0, im0, re1, im1;
};

struct FieldView {
  std::span<const double> bx, by, bz;
};

inline SpinorView view(SpinorBatch& s) { return {s.re0, s.im0, s.re1, s.im1}; }
inline FieldView view(const FieldBatch& f) { return {f.bx, f.by, f.bz}; }

/// Scalar reference: builds each 2x2 propagator with std::complex arithmetic.
void su2_step_scalar(FieldView field, double dt, SpinorView state);
/// sin and cos of every element, scalar reference.
void sincos_scalar(std::span<const double> x, std::span<double> s, std::span<double> c);

bool avx2_available();
#if defined(GEOPHASE_HAVE_AVX2)
void su2_step_avx2(FieldView field, double dt, SpinorView state);
void sincos_avx2(std::span<const double> x, std::span<double> s, std::span<double> c);
#endif

/// Variant selected for this process.
Isa active_isa();
/// Pin a variant (tests); std::nullopt restores automatic selection.
/// Requesting an unavailable variant throws std::invalid_argument.
void set_isa(std::optional<Isa> isa);

/// Dispatching entry points.
void su2_step(FieldView field, double dt, SpinorView state);
void sincos(std::span<const double> x, std::span<double> s, std::span<double> c);

}  // namespace geophase::simd
