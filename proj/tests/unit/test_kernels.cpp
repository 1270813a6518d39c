#include <doctest.h>

#include <cmath>
#include <vector>

#include "adarag/kernels.hpp"
#include "adarag/rng.hpp"

using namespace adarag;

namespace {

std::vector<double> random_vec(size_t n, rng::SplitMix64& gen, double lo, double hi) {
    std::vector<double> v(n);
    for (auto& x : v) {
        x = lo + (hi - lo) * (static_cast<double>(gen.next() >> 11) / 9007199254740992.0);
    }
    return v;
}

}  // namespace

TEST_CASE("scalar and avx2 bm25_term_scores agree bit-for-bit") {
    if (!kernels::cpu_supports_avx2()) return;
    rng::SplitMix64 gen(42);
    for (size_t n : {0, 1, 3, 4, 5, 17, 64, 1000}) {
        auto tf = random_vec(n, gen, 1.0, 12.0);
        auto norm = random_vec(n, gen, 0.3, 2.5);
        std::vector<double> a(n, -1.0);
        std::vector<double> b(n, -2.0);
        kernels::detail::bm25_term_scores_scalar(tf.data(), norm.data(), n, 0.7, 2.2, a.data());
        kernels::detail::bm25_term_scores_avx2(tf.data(), norm.data(), n, 0.7, 2.2, b.data());
        for (size_t i = 0; i < n; ++i) {
            CHECK(a[i] == b[i]);  // elementwise kernels are exactly equal
        }
    }
}

TEST_CASE("scalar and avx2 scale agree bit-for-bit") {
    if (!kernels::cpu_supports_avx2()) return;
    rng::SplitMix64 gen(7);
    for (size_t n : {0, 1, 5, 8, 31, 500}) {
        auto base = random_vec(n, gen, -3.0, 3.0);
        auto a = base;
        auto b = base;
        kernels::detail::scale_scalar(0.987654321, a.data(), n);
        kernels::detail::scale_avx2(0.987654321, b.data(), n);
        for (size_t i = 0; i < n; ++i) CHECK(a[i] == b[i]);
    }
}

TEST_CASE("scalar and avx2 dot agree within reduction tolerance") {
    if (!kernels::cpu_supports_avx2()) return;
    rng::SplitMix64 gen(9);
    for (size_t n : {0, 1, 4, 7, 100, 4097}) {
        auto a = random_vec(n, gen, -1.0, 1.0);
        auto b = random_vec(n, gen, -1.0, 1.0);
        const double s = kernels::detail::dot_scalar(a.data(), b.data(), n);
        const double v = kernels::detail::dot_avx2(a.data(), b.data(), n);
        CHECK(std::abs(s - v) <= 1e-12 * (1.0 + std::abs(s)));
    }
}

TEST_CASE("dispatch selects an available backend and can be forced") {
    const auto original = kernels::active_backend();
    CHECK((original == kernels::Backend::scalar || original == kernels::Backend::avx2));

    kernels::force_backend(kernels::Backend::scalar);
    CHECK(kernels::active_backend() == kernels::Backend::scalar);
    double x[3] = {1.0, 2.0, 3.0};
    kernels::scale(2.0, x, 3);
    CHECK(x[2] == 6.0);

    if (kernels::cpu_supports_avx2()) {
        kernels::force_backend(kernels::Backend::avx2);
        CHECK(kernels::active_backend() == kernels::Backend::avx2);
        kernels::scale(0.5, x, 3);
        CHECK(x[0] == 1.0);
    }
    kernels::force_backend(original);
}

TEST_CASE("squared_norm matches a hand sum") {
    const double v[4] = {1.0, 2.0, 3.0, 4.0};
    CHECK(kernels::squared_norm(v, 4) == doctest::Approx(30.0));
}
