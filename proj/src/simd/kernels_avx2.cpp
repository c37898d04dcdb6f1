#include "ohlrelay/simd/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

namespace ohl::simd {

namespace {

// Same constants and operation order as the scalar reference in
// kernels_scalar.cpp; keep the two files in sync.
const __m256d kLog2E = _mm256_set1_pd(1.4426950408889634074);
const __m256d kC1 = _mm256_set1_pd(6.93145751953125e-1);
const __m256d kC2 = _mm256_set1_pd(1.42860682030941723212e-6);
const __m256d kP0 = _mm256_set1_pd(1.26177193074810590878e-4);
const __m256d kP1 = _mm256_set1_pd(3.02994407707441961300e-2);
const __m256d kP2 = _mm256_set1_pd(9.99999999999999999910e-1);
const __m256d kQ0 = _mm256_set1_pd(3.00198505138664455042e-6);
const __m256d kQ1 = _mm256_set1_pd(2.52448340349684104192e-3);
const __m256d kQ2 = _mm256_set1_pd(2.27265548208155028766e-1);
const __m256d kQ3 = _mm256_set1_pd(2.00000000000000000005e0);
const __m256d kTwo = _mm256_set1_pd(2.0);
const __m256d kOne = _mm256_set1_pd(1.0);
const __m256d kUnderflow = _mm256_set1_pd(-700.0);

inline __m256d exp_pd(__m256d x) {
    const __m256d under = _mm256_cmp_pd(x, kUnderflow, _CMP_LT_OQ);
    // Clamp so the exponent arithmetic below stays in range for lanes that
    // will be masked to zero anyway.
    x = _mm256_max_pd(x, kUnderflow);
    const __m256d n =
        _mm256_round_pd(_mm256_mul_pd(x, kLog2E),
                        _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_fnmadd_pd(n, kC1, x);
    r = _mm256_fnmadd_pd(n, kC2, r);
    const __m256d xx = _mm256_mul_pd(r, r);
    __m256d p = _mm256_fmadd_pd(kP0, xx, kP1);
    p = _mm256_fmadd_pd(p, xx, kP2);
    p = _mm256_mul_pd(p, r);
    __m256d q = _mm256_fmadd_pd(kQ0, xx, kQ1);
    q = _mm256_fmadd_pd(q, xx, kQ2);
    q = _mm256_fmadd_pd(q, xx, kQ3);
    const __m256d e =
        _mm256_fmadd_pd(kTwo, _mm256_div_pd(p, _mm256_sub_pd(q, p)), kOne);
    // 2^n via exponent bits: n fits in 32 bits here.
    const __m128i n32 = _mm256_cvtpd_epi32(n);
    const __m256i n64 = _mm256_cvtepi32_epi64(n32);
    const __m256i bits =
        _mm256_slli_epi64(_mm256_add_epi64(n64, _mm256_set1_epi64x(1023)), 52);
    const __m256d pow2 = _mm256_castsi256_pd(bits);
    return _mm256_andnot_pd(under, _mm256_mul_pd(e, pow2));
}

}  // namespace

void gain_batch_avx2(const double* x, const double* y, std::size_t n, double c,
                     double h_max, double* h) {
    const __m256d neg_c = _mm256_set1_pd(-c);
    const __m256d hmax = _mm256_set1_pd(h_max);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d vx = _mm256_loadu_pd(x + i);
        const __m256d vy = _mm256_loadu_pd(y + i);
        const __m256d t = _mm256_fmadd_pd(vx, vx, _mm256_mul_pd(vy, vy));
        const __m256d e = exp_pd(_mm256_mul_pd(neg_c, t));
        _mm256_storeu_pd(h + i, _mm256_mul_pd(hmax, e));
    }
    if (i < n) gain_batch_scalar(x + i, y + i, n - i, c, h_max, h + i);
}

}  // namespace ohl::simd

#endif  // x86_64
