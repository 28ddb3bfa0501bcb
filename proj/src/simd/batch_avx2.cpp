#include <immintrin.h>

#include <cmath>

#include "holos/simd.hpp"

// AVX2+FMA variants. Compiled only into this translation unit (see CMake);
// callers reach it through the runtime dispatch table.

namespace holos::simd {
namespace {

// fdlibm-style kernel polynomials on |r| <= pi/4.
constexpr double S1 = -1.66666666666666324348e-01;
constexpr double S2 = 8.33333333332248946124e-03;
constexpr double S3 = -1.98412698298579493134e-04;
constexpr double S4 = 2.75573137070700676789e-06;
constexpr double S5 = -2.50507602534068634195e-08;
constexpr double S6 = 1.58969099521155010221e-10;

constexpr double C1 = 4.16666666666666019037e-02;
constexpr double C2 = -1.38888888888741095749e-03;
constexpr double C3 = 2.48015872894767294178e-05;
constexpr double C4 = -2.75573143513906633035e-07;
constexpr double C5 = 2.08757232129817482790e-09;
constexpr double C6 = -1.13596475577881948265e-11;

// Cody-Waite split of pi/2 for the argument reduction.
constexpr double PIO2_1 = 1.57079632673412561417e+00;
constexpr double PIO2_2 = 6.07710050630396597660e-11;
constexpr double PIO2_3 = 2.02226624879595063154e-21;
constexpr double INV_PIO2 = 6.36619772367581382433e-01;

inline void sincos4(__m256d x, __m256d* sout, __m256d* cout) {
  const __m256d nd = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(INV_PIO2)),
                                     _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(nd, _mm256_set1_pd(PIO2_1), x);
  r = _mm256_fnmadd_pd(nd, _mm256_set1_pd(PIO2_2), r);
  r = _mm256_fnmadd_pd(nd, _mm256_set1_pd(PIO2_3), r);

  const __m256d r2 = _mm256_mul_pd(r, r);

  __m256d sp = _mm256_set1_pd(S6);
  sp = _mm256_fmadd_pd(sp, r2, _mm256_set1_pd(S5));
  sp = _mm256_fmadd_pd(sp, r2, _mm256_set1_pd(S4));
  sp = _mm256_fmadd_pd(sp, r2, _mm256_set1_pd(S3));
  sp = _mm256_fmadd_pd(sp, r2, _mm256_set1_pd(S2));
  sp = _mm256_fmadd_pd(sp, r2, _mm256_set1_pd(S1));
  const __m256d ksin = _mm256_fmadd_pd(_mm256_mul_pd(sp, r2), r, r);

  __m256d cp = _mm256_set1_pd(C6);
  cp = _mm256_fmadd_pd(cp, r2, _mm256_set1_pd(C5));
  cp = _mm256_fmadd_pd(cp, r2, _mm256_set1_pd(C4));
  cp = _mm256_fmadd_pd(cp, r2, _mm256_set1_pd(C3));
  cp = _mm256_fmadd_pd(cp, r2, _mm256_set1_pd(C2));
  cp = _mm256_fmadd_pd(cp, r2, _mm256_set1_pd(C1));
  __m256d kcos = _mm256_fmadd_pd(cp, _mm256_mul_pd(r2, r2),
                                 _mm256_fnmadd_pd(r2, _mm256_set1_pd(0.5), _mm256_set1_pd(1.0)));

  // quadrant handling: q&1 swaps sin/cos, q&2 negates sin, (q+1)&2 negates cos
  const __m128i q = _mm256_cvtpd_epi32(nd);
  const __m128i one = _mm_set1_epi32(1);
  const __m128i two = _mm_set1_epi32(2);
  const __m128i swap32 = _mm_cmpeq_epi32(_mm_and_si128(q, one), one);
  const __m128i negs32 = _mm_cmpeq_epi32(_mm_and_si128(q, two), two);
  const __m128i negc32 = _mm_cmpeq_epi32(_mm_and_si128(_mm_add_epi32(q, one), two), two);
  const __m256d mswap = _mm256_castsi256_pd(_mm256_cvtepi32_epi64(swap32));
  const __m256d mnegs = _mm256_castsi256_pd(_mm256_cvtepi32_epi64(negs32));
  const __m256d mnegc = _mm256_castsi256_pd(_mm256_cvtepi32_epi64(negc32));
  const __m256d signbit = _mm256_set1_pd(-0.0);

  __m256d s = _mm256_blendv_pd(ksin, kcos, mswap);
  __m256d c = _mm256_blendv_pd(kcos, ksin, mswap);
  s = _mm256_xor_pd(s, _mm256_and_pd(mnegs, signbit));
  c = _mm256_xor_pd(c, _mm256_and_pd(mnegc, signbit));
  *sout = s;
  *cout = c;
}

inline void store_interleaved(cplx* out, __m256d re, __m256d im) {
  const __m256d t0 = _mm256_unpacklo_pd(re, im);
  const __m256d t1 = _mm256_unpackhi_pd(re, im);
  _mm256_storeu_pd(reinterpret_cast<double*>(out), _mm256_permute2f128_pd(t0, t1, 0x20));
  _mm256_storeu_pd(reinterpret_cast<double*>(out + 2), _mm256_permute2f128_pd(t0, t1, 0x31));
}

void kernel_exact_avx2(const double* dx, const double* dy, const double* dz, std::size_t n,
                       const ExactKernelParams& p, cplx* out) {
  const double* comp[3] = {dx, dy, dz};
  const double* ci = comp[p.ci];
  const double* co = comp[p.co];
  const __m256d kron = _mm256_set1_pd(p.kron);
  const __m256d amp0 = _mm256_set1_pd(p.amp0);
  const __m256d mk0 = _mm256_set1_pd(-p.kappa0);
  const __m256d halfpi = _mm256_set1_pd(0.5 * kPi);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d x = _mm256_loadu_pd(dx + i);
    const __m256d y = _mm256_loadu_pd(dy + i);
    const __m256d z = _mm256_loadu_pd(dz + i);
    __m256d r2 = _mm256_mul_pd(x, x);
    r2 = _mm256_fmadd_pd(y, y, r2);
    r2 = _mm256_fmadd_pd(z, z, r2);
    const __m256d r = _mm256_sqrt_pd(r2);
    const __m256d vi = _mm256_loadu_pd(ci + i);
    const __m256d vo = _mm256_loadu_pd(co + i);
    const __m256d e = _mm256_sub_pd(kron, _mm256_div_pd(_mm256_mul_pd(vi, vo), r2));
    const __m256d amp = _mm256_div_pd(_mm256_mul_pd(amp0, e), r);
    const __m256d ang = _mm256_fmadd_pd(mk0, r, halfpi);
    __m256d s, c;
    sincos4(ang, &s, &c);
    store_interleaved(out + i, _mm256_mul_pd(amp, c), _mm256_mul_pd(amp, s));
  }
  for (; i < n; ++i) {
    double r2 = dx[i] * dx[i] + dy[i] * dy[i] + dz[i] * dz[i];
    double r = std::sqrt(r2);
    double e = p.kron - ci[i] * co[i] / r2;
    double amp = p.amp0 * e / r;
    double ang = 0.5 * kPi - p.kappa0 * r;
    out[i] = cplx(amp * std::cos(ang), amp * std::sin(ang));
  }
}

inline __m256d sinc4(__m256d x) {
  const __m256d px = _mm256_mul_pd(x, _mm256_set1_pd(kPi));
  __m256d s, c;
  sincos4(px, &s, &c);
  const __m256d px2 = _mm256_mul_pd(px, px);
  const __m256d small = _mm256_fnmadd_pd(px2, _mm256_set1_pd(1.0 / 6.0), _mm256_set1_pd(1.0));
  const __m256d mask = _mm256_cmp_pd(
      _mm256_andnot_pd(_mm256_set1_pd(-0.0), px), _mm256_set1_pd(1e-8), _CMP_LT_OQ);
  return _mm256_blendv_pd(_mm256_div_pd(s, px), small, mask);
}

void gbar_sum_avx2(const double* du, const double* dv, std::size_t n, const SincTerm* terms,
                   std::size_t n_terms, cplx* out) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d u = _mm256_loadu_pd(du + i);
    const __m256d v = _mm256_loadu_pd(dv + i);
    __m256d accr = _mm256_setzero_pd();
    __m256d acci = _mm256_setzero_pd();
    for (std::size_t t = 0; t < n_terms; ++t) {
      const SincTerm& st = terms[t];
      const __m256d a1 = _mm256_fmadd_pd(_mm256_set1_pd(st.av), v,
                                         _mm256_mul_pd(_mm256_set1_pd(st.au), u));
      const __m256d a2 = _mm256_fmadd_pd(_mm256_set1_pd(st.bv), v,
                                         _mm256_mul_pd(_mm256_set1_pd(st.bu), u));
      const __m256d g = _mm256_mul_pd(_mm256_set1_pd(st.amp),
                                      _mm256_mul_pd(sinc4(a1), sinc4(a2)));
      const __m256d ph = _mm256_xor_pd(
          _mm256_fmadd_pd(_mm256_set1_pd(st.kv), v, _mm256_mul_pd(_mm256_set1_pd(st.ku), u)),
          _mm256_set1_pd(-0.0));
      __m256d s, c;
      sincos4(ph, &s, &c);
      accr = _mm256_fmadd_pd(g, c, accr);
      acci = _mm256_fmadd_pd(g, s, acci);
    }
    store_interleaved(out + i, accr, acci);
  }
  for (; i < n; ++i) {
    cplx acc = 0;
    for (std::size_t t = 0; t < n_terms; ++t) {
      const SincTerm& st = terms[t];
      auto sinc1 = [](double x) {
        double px = kPi * x;
        if (std::abs(px) < 1e-8) return 1.0 - px * px / 6.0;
        return std::sin(px) / px;
      };
      double g = st.amp * sinc1(st.au * du[i] + st.av * dv[i]) * sinc1(st.bu * du[i] + st.bv * dv[i]);
      double ph = -(st.ku * du[i] + st.kv * dv[i]);
      acc += cplx(g * std::cos(ph), g * std::sin(ph));
    }
    out[i] = acc;
  }
}

}  // namespace

namespace detail {
const Ops avx2_ops = {&kernel_exact_avx2, &gbar_sum_avx2};
}

}  // namespace holos::simd
