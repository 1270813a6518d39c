#pragma once

// Data-parallel inner loops behind retrieval scoring and the linear
// classifier. Each kernel has a scalar reference implementation and an
// AVX2 variant; the active backend is chosen at load time from CPUID
// (override with ADARAG_SIMD=scalar|avx2 or force_backend()).
//
// bm25_term_scores and scale are elementwise and bit-identical across
// backends (no FMA contraction, same per-element operation order).
// dot is a reduction; backends may differ in the last ulp.

#include <cstddef>
#include <string>

namespace adarag::kernels {

enum class Backend { scalar, avx2 };

/// Backend selected by dispatch (or forced).
Backend active_backend();

/// Forces a backend; throws if the CPU lacks it. Test hook — not safe
/// while other threads are inside kernel calls.
void force_backend(Backend b);

bool cpu_supports_avx2();

std::string backend_name(Backend b);

/// out[i] = idf * (tf[i] * k1_plus_1) / (tf[i] + norm[i])
/// One BM25 term's contribution over a postings block; `norm` holds the
/// precomputed k1*(1 - b + b*dl/avgdl) per posting.
void bm25_term_scores(const double* tf, const double* norm, std::size_t n,
                      double idf, double k1_plus_1, double* out);

/// x[i] *= a
void scale(double a, double* x, std::size_t n);

/// sum_i a[i] * b[i]
double dot(const double* a, const double* b, std::size_t n);

inline double squared_norm(const double* x, std::size_t n) { return dot(x, x, n); }

namespace detail {
// Direct entry points, used by the equivalence tests.
void bm25_term_scores_scalar(const double* tf, const double* norm, std::size_t n,
                             double idf, double k1_plus_1, double* out);
void scale_scalar(double a, double* x, std::size_t n);
double dot_scalar(const double* a, const double* b, std::size_t n);
void bm25_term_scores_avx2(const double* tf, const double* norm, std::size_t n,
                           double idf, double k1_plus_1, double* out);
void scale_avx2(double a, double* x, std::size_t n);
double dot_avx2(const double* a, const double* b, std::size_t n);
}  // namespace detail

}  // namespace adarag::kernels
