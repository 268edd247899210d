#include <doctest.h>
#include <omp.h>

#include <cmath>
#include <random>

#include "rrl/fft.hpp"

using namespace rrl;

namespace {

std::vector<double> random_vec(std::size_t n, unsigned seed, double lo = -1.0, double hi = 1.0) {
    std::mt19937_64 g(seed);
    std::uniform_real_distribution<double> d(lo, hi);
    std::vector<double> v(n);
    for (auto& x : v) x = d(g);
    return v;
}

double max_abs_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace

TEST_CASE("next_pow2") {
    CHECK(next_pow2(1) == 1);
    CHECK(next_pow2(2) == 2);
    CHECK(next_pow2(3) == 4);
    CHECK(next_pow2(1025) == 2048);
}

TEST_CASE("transform matches the O(N^2) reference within its bound") {
    for (std::size_t n : {1u, 2u, 8u, 64u, 1024u}) {
        const auto re = random_vec(n, 11 + n), im = random_vec(n, 97 + n);
        std::vector<cplx> x(n);
        double nrm = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = {re[i], im[i]};
            nrm += std::norm(x[i]);
        }
        for (int sign : {-1, 1}) {
            auto y = x;
            fft_inplace(y, sign);
            CAPTURE(n);
            CHECK(max_abs_diff(y, dft_reference(x, sign)) <= fft_error_bound(std::sqrt(nrm), n));
        }
    }
}

TEST_CASE("forward then inverse returns the input") {
    const std::size_t n = 4096;
    const auto re = random_vec(n, 5);
    std::vector<cplx> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = re[i];
    auto y = x;
    fft_inplace(y, -1);
    fft_inplace(y, 1);
    for (auto& v : y) v /= static_cast<double>(n);
    CHECK(max_abs_diff(x, y) < 1e-14);
}

TEST_CASE("transform rejects non powers of two") {
    std::vector<cplx> x(12);
    CHECK_THROWS(fft_inplace(x, 1));
}

TEST_CASE("convolution matches direct summation within the stated bounds") {
    const auto a = random_vec(700, 1), b = random_vec(333, 2);
    std::vector<long double> ref(a.size() + b.size() - 1, 0.0L);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) ref[i + j] += static_cast<long double>(a[i]) * b[j];
    const std::size_t N = next_pow2(ref.size());

    const auto c = fft_convolve(a, b);
    const double bound = fft_convolve_error_bound(norm2(a), norm2(b), N);
    const auto ce = fft_convolve_extended(a, b);
    const double bound_e = fft_convolve_extended_error_bound(norm2(a), norm2(b), N);
    const auto raw = direct_convolve_raw(a, b);
    double worst = 0.0, worst_e = 0.0, worst_raw = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i) {
        const double r = static_cast<double>(ref[i]);
        worst = std::max(worst, std::abs(c[i] - r));
        worst_e = std::max(worst_e, std::abs(ce[i] - r) - 1.2e-16 * std::abs(r));
        worst_raw = std::max(worst_raw, std::abs(raw[i] - r));
    }
    CHECK(worst_raw < 1e-12);
    CHECK(worst <= bound);
    CHECK(worst_e <= bound_e);
    CHECK(bound < 1e-10);
    CHECK(bound_e < bound);
}

TEST_CASE("convolution of empty input is empty") {
    CHECK(fft_convolve({}, {1.0, 2.0}).empty());
    CHECK(direct_convolve_raw({1.0}, {}).empty());
}

TEST_CASE("convolution is bitwise identical across thread counts") {
    const auto a = random_vec(1 << 16, 3, 0.0, 1.0), b = random_vec(1 << 15, 4, 0.0, 1.0);
    const int saved = omp_get_max_threads();
    omp_set_num_threads(1);
    const auto c1 = fft_convolve(a, b);
    const auto e1 = fft_convolve_extended(a, b);
    omp_set_num_threads(4);
    const auto c4 = fft_convolve(a, b);
    const auto e4 = fft_convolve_extended(a, b);
    omp_set_num_threads(saved);
    REQUIRE(c1.size() == c4.size());
    bool same = true;
    for (std::size_t i = 0; i < c1.size(); ++i) same = same && c1[i] == c4[i] && e1[i] == e4[i];
    CHECK(same);
}
