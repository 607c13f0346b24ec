#include <immintrin.h>

#include <cmath>
#include <stdexcept>

#include "geophase/simd/su2_batch.hpp"

namespace geophase::simd {

namespace {

constexpr std::size_t kLanes = 4;

// Cody-Waite split of pi/4 and minimax coefficients on [-pi/4, pi/4]
// (the Cephes double-precision set).
constexpr double kFourOverPi = 1.27323954473516268615;
constexpr double kDp1 = 7.85398125648498535156e-1;
constexpr double kDp2 = 3.77489470793079817668e-8;
constexpr double kDp3 = 2.69515142907905952645e-15;
constexpr double kSinCoef[] = {1.58962301576546568060e-10, -2.50507477628578072866e-8,
                               2.75573136213857245213e-6,  -1.98412698295895385996e-4,
                               8.33333333332211858878e-3,  -1.66666666666666307295e-1};
constexpr double kCosCoef[] = {-1.13585365213876817300e-11, 2.08757008419747316778e-9,
                               -2.75573141792967388112e-7,  2.48015872888517045348e-5,
                               -1.38888888888730564116e-3,  4.16666666666665929218e-2};

// Beyond this the three-term reduction loses digits; such lanes go scalar.
constexpr double kMaxReduced = 1e7;

inline __m256d polevl(__m256d x, const double (&c)[6]) {
  __m256d r = _mm256_set1_pd(c[0]);
  for (int k = 1; k < 6; ++k) r = _mm256_fmadd_pd(r, x, _mm256_set1_pd(c[k]));
  return r;
}

inline __m256d eq(__m256d a, double v) { return _mm256_cmp_pd(a, _mm256_set1_pd(v), _CMP_EQ_OQ); }

inline void sincos4(__m256d x, __m256d& s_out, __m256d& c_out) {
  const __m256d sign_bit = _mm256_set1_pd(-0.0);
  const __m256d xa = _mm256_andnot_pd(sign_bit, x);
  const __m256d sign_x = _mm256_and_pd(sign_bit, x);

  // Octant index rounded up to even, kept in double (exact integers).
  __m256d y = _mm256_floor_pd(_mm256_mul_pd(xa, _mm256_set1_pd(kFourOverPi)));
  const __m256d odd = _mm256_sub_pd(
      y, _mm256_mul_pd(_mm256_floor_pd(_mm256_mul_pd(y, _mm256_set1_pd(0.5))), _mm256_set1_pd(2.0)));
  y = _mm256_add_pd(y, odd);
  const __m256d j = _mm256_sub_pd(
      y, _mm256_mul_pd(_mm256_floor_pd(_mm256_mul_pd(y, _mm256_set1_pd(0.125))), _mm256_set1_pd(8.0)));

  __m256d z = _mm256_fnmadd_pd(y, _mm256_set1_pd(kDp1), xa);
  z = _mm256_fnmadd_pd(y, _mm256_set1_pd(kDp2), z);
  z = _mm256_fnmadd_pd(y, _mm256_set1_pd(kDp3), z);
  const __m256d zz = _mm256_mul_pd(z, z);

  const __m256d ps = _mm256_fmadd_pd(_mm256_mul_pd(z, zz), polevl(zz, kSinCoef), z);
  const __m256d pc = _mm256_fmadd_pd(_mm256_mul_pd(zz, zz), polevl(zz, kCosCoef),
                                     _mm256_fnmadd_pd(_mm256_set1_pd(0.5), zz, _mm256_set1_pd(1.0)));

  const __m256d swap = _mm256_or_pd(eq(j, 2.0), eq(j, 6.0));
  const __m256d sin_neg = _mm256_or_pd(eq(j, 4.0), eq(j, 6.0));
  const __m256d cos_neg = _mm256_or_pd(eq(j, 2.0), eq(j, 4.0));

  __m256d sv = _mm256_blendv_pd(ps, pc, swap);
  __m256d cv = _mm256_blendv_pd(pc, ps, swap);
  sv = _mm256_xor_pd(sv, _mm256_xor_pd(_mm256_and_pd(sin_neg, sign_bit), sign_x));
  cv = _mm256_xor_pd(cv, _mm256_and_pd(cos_neg, sign_bit));
  s_out = sv;
  c_out = cv;
}

inline bool needs_scalar(__m256d x) {
  const __m256d xa = _mm256_andnot_pd(_mm256_set1_pd(-0.0), x);
  // NaN compares false under _CMP_LE_OQ, so non-finite input also falls back.
  const __m256d ok = _mm256_cmp_pd(xa, _mm256_set1_pd(kMaxReduced), _CMP_LE_OQ);
  return _mm256_movemask_pd(ok) != 0xF;
}

}  // namespace

void sincos_avx2(std::span<const double> x, std::span<double> s, std::span<double> c) {
  if (s.size() != x.size() || c.size() != x.size()) throw std::invalid_argument("sincos: size mismatch");
  const std::size_t n = x.size();
  std::size_t k = 0;
  for (; k + kLanes <= n; k += kLanes) {
    const __m256d v = _mm256_loadu_pd(x.data() + k);
    if (needs_scalar(v)) {
      sincos_scalar(x.subspan(k, kLanes), s.subspan(k, kLanes), c.subspan(k, kLanes));
      continue;
    }
    __m256d sv, cv;
    sincos4(v, sv, cv);
    _mm256_storeu_pd(s.data() + k, sv);
    _mm256_storeu_pd(c.data() + k, cv);
  }
  if (k < n) sincos_scalar(x.subspan(k), s.subspan(k), c.subspan(k));
}

void su2_step_avx2(FieldView f, double dt, SpinorView st) {
  const std::size_t n = f.bx.size();
  if (f.by.size() != n || f.bz.size() != n || st.re0.size() != n || st.im0.size() != n ||
      st.re1.size() != n || st.im1.size() != n) {
    throw std::invalid_argument("su2_step: lane count mismatch");
  }
  const __m256d half_dt = _mm256_set1_pd(0.5 * dt);
  const __m256d zero = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + kLanes <= n; k += kLanes) {
    const __m256d bx = _mm256_loadu_pd(f.bx.data() + k);
    const __m256d by = _mm256_loadu_pd(f.by.data() + k);
    const __m256d bz = _mm256_loadu_pd(f.bz.data() + k);
    const __m256d norm =
        _mm256_sqrt_pd(_mm256_fmadd_pd(bx, bx, _mm256_fmadd_pd(by, by, _mm256_mul_pd(bz, bz))));
    const __m256d angle = _mm256_mul_pd(norm, half_dt);
    if (needs_scalar(angle)) {
      su2_step_scalar({f.bx.subspan(k, kLanes), f.by.subspan(k, kLanes), f.bz.subspan(k, kLanes)}, dt,
                      {st.re0.subspan(k, kLanes), st.im0.subspan(k, kLanes), st.re1.subspan(k, kLanes),
                       st.im1.subspan(k, kLanes)});
      continue;
    }
    __m256d s, c;
    sincos4(angle, s, c);
    // sin(|B| dt/2)/|B|, zero where the field vanishes.
    const __m256d nonzero = _mm256_cmp_pd(norm, zero, _CMP_GT_OQ);
    const __m256d scale = _mm256_and_pd(nonzero, _mm256_div_pd(s, _mm256_blendv_pd(_mm256_set1_pd(1.0), norm, nonzero)));
    const __m256d cc = _mm256_blendv_pd(_mm256_set1_pd(1.0), c, nonzero);
    const __m256d px = _mm256_mul_pd(scale, bx);
    const __m256d py = _mm256_mul_pd(scale, by);
    const __m256d pz = _mm256_mul_pd(scale, bz);

    const __m256d r0 = _mm256_loadu_pd(st.re0.data() + k);
    const __m256d i0 = _mm256_loadu_pd(st.im0.data() + k);
    const __m256d r1 = _mm256_loadu_pd(st.re1.data() + k);
    const __m256d i1 = _mm256_loadu_pd(st.im1.data() + k);

    // a0' = (c - i pz) a0 + (-py - i px) a1 ; a1' = (py - i px) a0 + (c + i pz) a1
    __m256d nr0 = _mm256_mul_pd(cc, r0);
    nr0 = _mm256_fmadd_pd(pz, i0, nr0);
    nr0 = _mm256_fnmadd_pd(py, r1, nr0);
    nr0 = _mm256_fmadd_pd(px, i1, nr0);

    __m256d ni0 = _mm256_mul_pd(cc, i0);
    ni0 = _mm256_fnmadd_pd(pz, r0, ni0);
    ni0 = _mm256_fnmadd_pd(py, i1, ni0);
    ni0 = _mm256_fnmadd_pd(px, r1, ni0);

    __m256d nr1 = _mm256_mul_pd(cc, r1);
    nr1 = _mm256_fmadd_pd(py, r0, nr1);
    nr1 = _mm256_fmadd_pd(px, i0, nr1);
    nr1 = _mm256_fnmadd_pd(pz, i1, nr1);

    __m256d ni1 = _mm256_mul_pd(cc, i1);
    ni1 = _mm256_fmadd_pd(py, i0, ni1);
    ni1 = _mm256_fnmadd_pd(px, r0, ni1);
    ni1 = _mm256_fmadd_pd(pz, r1, ni1);

    _mm256_storeu_pd(st.re0.data() + k, nr0);
    _mm256_storeu_pd(st.im0.data() + k, ni0);
    _mm256_storeu_pd(st.re1.data() + k, nr1);
    _mm256_storeu_pd(st.im1.data() + k, ni1);
  }
  if (k < n) {
    su2_step_scalar({f.bx.subspan(k), f.by.subspan(k), f.bz.subspan(k)}, dt,
                    {st.re0.subspan(k), st.im0.subspan(k), st.re1.subspan(k), st.im1.subspan(k)});
  }
}

}  // namespace geophase::simd
