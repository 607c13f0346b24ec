#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "geophase/simd/su2_batch.hpp"

namespace geophase::simd {

namespace {

Isa detect() {
  if (const char* env = std::getenv("GEOPHASE_SIMD")) {
    const std::string want(env);
    if (want == "scalar") return Isa::scalar;
    if (want == "avx2" && avx2_available()) return Isa::avx2;
  }
  return avx2_available() ? Isa::avx2 : Isa::scalar;
}

std::atomic<int>& override_slot() {
  static std::atomic<int> slot{-1};
  return slot;
}

}  // namespace

std::string_view to_string(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

bool avx2_available() {
#if defined(GEOPHASE_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  static const bool ok = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return ok;
#else
  return false;
#endif
}

Isa active_isa() {
  const int pinned = override_slot().load(std::memory_order_relaxed);
  if (pinned >= 0) return static_cast<Isa>(pinned);
  static const Isa detected = detect();
  return detected;
}

void set_isa(std::optional<Isa> isa) {
  if (isa && *isa == Isa::avx2 && !avx2_available()) {
    throw std::invalid_argument("AVX2 kernels are not available on this machine/build");
  }
  override_slot().store(isa ? static_cast<int>(*isa) : -1, std::memory_order_relaxed);
}

void su2_step(FieldView field, double dt, SpinorView state) {
#if defined(GEOPHASE_HAVE_AVX2)
  if (active_isa() == Isa::avx2) return su2_step_avx2(field, dt, state);
#endif
  su2_step_scalar(field, dt, state);
}

void sincos(std::span<const double> x, std::span<double> s, std::span<double> c) {
#if defined(GEOPHASE_HAVE_AVX2)
  if (active_isa() == Isa::avx2) return sincos_avx2(x, s, c);
#endif
  sincos_scalar(x, s, c);
}

}  // namespace geophase::simd
