// AVX2 kernel variants. Compiled with -mavx2 only; callers reach these
// through the dispatch table after a CPUID check. Elementwise kernels use
// plain mul/add/div (no FMA) so results match the scalar reference
// bit-for-bit.

#include "adarag/kernels.hpp"

#if defined(__x86_64__) || defined(__i386__)
#include <immintrin.h>
#endif

namespace adarag::kernels::detail {

#if defined(__x86_64__) || defined(__i386__)

void bm25_term_scores_avx2(const double* tf, const double* norm, std::size_t n,
                           double idf, double k1_plus_1, double* out) {
    const __m256d vidf = _mm256_set1_pd(idf);
    const __m256d vk1p1 = _mm256_set1_pd(k1_plus_1);
    std::size_t i = 0;
    const std::size_t simd_end = n - (n % 4);
    for (; i < simd_end; i += 4) {
        __m256d vtf = _mm256_loadu_pd(tf + i);
        __m256d vnorm = _mm256_loadu_pd(norm + i);
        __m256d num = _mm256_mul_pd(vtf, vk1p1);
        __m256d den = _mm256_add_pd(vtf, vnorm);
        __m256d ratio = _mm256_div_pd(num, den);
        _mm256_storeu_pd(out + i, _mm256_mul_pd(vidf, ratio));
    }
    for (; i < n; ++i) {
        const double num = tf[i] * k1_plus_1;
        const double den = tf[i] + norm[i];
        out[i] = idf * (num / den);
    }
}

void scale_avx2(double a, double* x, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    const std::size_t simd_end = n - (n % 4);
    for (; i < simd_end; i += 4) {
        _mm256_storeu_pd(x + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), va));
    }
    for (; i < n; ++i) x[i] *= a;
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    const std::size_t simd_end = n - (n % 4);
    for (; i < simd_end; i += 4) {
        __m256d va = _mm256_loadu_pd(a + i);
        __m256d vb = _mm256_loadu_pd(b + i);
        acc = _mm256_add_pd(acc, _mm256_mul_pd(va, vb));
    }
    double lanes[4];
    _mm256_storeu_pd(lanes, acc);
    double sum = lanes[0] + lanes[1] + lanes[2] + lanes[3];
    for (; i < n; ++i) sum += a[i] * b[i];
    return sum;
}

#else

// Non-x86 build: keep the symbols, delegate to scalar.
void bm25_term_scores_avx2(const double* tf, const double* norm, std::size_t n,
                           double idf, double k1_plus_1, double* out) {
    bm25_term_scores_scalar(tf, norm, n, idf, k1_plus_1, out);
}
void scale_avx2(double a, double* x, std::size_t n) { scale_scalar(a, x, n); }
double dot_avx2(const double* a, const double* b, std::size_t n) { return dot_scalar(a, b, n); }

#endif

}  // namespace adarag::kernels::detail
