#include "adarag/kernels.hpp"

#include <cstdlib>
#include <stdexcept>

namespace adarag::kernels {

namespace detail {

void bm25_term_scores_scalar(const double* tf, const double* norm, std::size_t n,
                             double idf, double k1_plus_1, double* out) {
    for (std::size_t i = 0; i < n; ++i) {
        const double num = tf[i] * k1_plus_1;
        const double den = tf[i] + norm[i];
        out[i] = idf * (num / den);
    }
}

void scale_scalar(double a, double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

}  // namespace detail

namespace {

struct Dispatch {
    void (*bm25_term_scores)(const double*, const double*, std::size_t, double, double, double*);
    void (*scale)(double, double*, std::size_t);
    double (*dot)(const double*, const double*, std::size_t);
    Backend backend;
};

Dispatch scalar_table() {
    return {detail::bm25_term_scores_scalar, detail::scale_scalar, detail::dot_scalar,
            Backend::scalar};
}

Dispatch avx2_table() {
    return {detail::bm25_term_scores_avx2, detail::scale_avx2, detail::dot_avx2, Backend::avx2};
}

Dispatch resolve() {
    const char* env = std::getenv("ADARAG_SIMD");
    if (env != nullptr) {
        std::string v(env);
        if (v == "scalar") return scalar_table();
        if (v == "avx2") {
            if (!cpu_supports_avx2()) throw std::runtime_error("ADARAG_SIMD=avx2 but CPU lacks AVX2");
            return avx2_table();
        }
        // anything else (e.g. "auto") falls through to detection
    }
    return cpu_supports_avx2() ? avx2_table() : scalar_table();
}

Dispatch& table() {
    static Dispatch t = resolve();
    return t;
}

}  // namespace

bool cpu_supports_avx2() {
#if defined(__x86_64__) || defined(__i386__)
    return __builtin_cpu_supports("avx2") != 0;
#else
    return false;
#endif
}

Backend active_backend() { return table().backend; }

void force_backend(Backend b) {
    if (b == Backend::avx2 && !cpu_supports_avx2()) {
        throw std::runtime_error("cannot force avx2 backend: CPU lacks AVX2");
    }
    table() = (b == Backend::avx2) ? avx2_table() : scalar_table();
}

std::string backend_name(Backend b) { return b == Backend::avx2 ? "avx2" : "scalar"; }

void bm25_term_scores(const double* tf, const double* norm, std::size_t n,
                      double idf, double k1_plus_1, double* out) {
    table().bm25_term_scores(tf, norm, n, idf, k1_plus_1, out);
}

void scale(double a, double* x, std::size_t n) { table().scale(a, x, n); }

double dot(const double* a, const double* b, std::size_t n) { return table().dot(a, b, n); }

}  // namespace adarag::kernels
