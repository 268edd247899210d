#include "rrl/fft.hpp"

#include <omp.h>

#include <bit>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace rrl {

namespace {

constexpr std::size_t kParallelMin = std::size_t{1} << 14;
constexpr double kEps = std::numeric_limits<double>::epsilon() / 2.0;

template <class R>
using cx = std::complex<R>;

// exp(-2 pi i k / N) for k < N/2, rounded from long double.
template <class R>
std::shared_ptr<const std::vector<cx<R>>> twiddles(std::size_t n) {
    static std::mutex mu;
    static std::shared_ptr<const std::vector<cx<R>>> table;
    std::lock_guard<std::mutex> lock(mu);
    if (table && table->size() * 2 >= n) return table;
    std::size_t half = n / 2;
    auto t = std::make_shared<std::vector<cx<R>>>(half);
    const long double two_pi = 2.0L * std::numbers::pi_v<long double>;
#pragma omp parallel for schedule(static) if (half >= kParallelMin)
    for (std::size_t k = 0; k < half; ++k) {
        long double ang = two_pi * static_cast<long double>(k) / static_cast<long double>(n);
        (*t)[k] = cx<R>(static_cast<R>(std::cos(ang)), static_cast<R>(-std::sin(ang)));
    }
    table = t;
    return table;
}

template <class R>
void fft_impl(std::vector<cx<R>>& x, int sign) {
    const std::size_t n = x.size();
    if (n <= 1) return;
    if (!std::has_single_bit(n)) throw std::invalid_argument("fft_inplace: size must be a power of two");
    auto tw = twiddles<R>(n);
    const std::size_t tw_n = tw->size() * 2;
    const int log_n = std::countr_zero(n);
    const bool par = n >= kParallelMin;
    const std::size_t half_n = n / 2;

#pragma omp parallel if (par)
    {
#pragma omp for schedule(static)
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t r = 0, v = i;
            for (int b = 0; b < log_n; ++b) {
                r = (r << 1) | (v & 1);
                v >>= 1;
            }
            if (r > i) std::swap(x[i], x[r]);
        }
        for (int stage = 0; stage < log_n; ++stage) {
            const std::size_t half = std::size_t{1} << stage;
            const std::size_t stride = tw_n / (2 * half);
#pragma omp for schedule(static)
            for (std::size_t b = 0; b < half_n; ++b) {
                const std::size_t pos = b & (half - 1);
                const std::size_t i = ((b >> stage) << (stage + 1)) | pos;
                const std::size_t j = i + half;
                cx<R> w = (*tw)[pos * stride];
                if (sign > 0) w = std::conj(w);
                const cx<R> t = w * x[j];
                x[j] = x[i] - t;
                x[i] = x[i] + t;
            }
        }
    }
}

template <class R>
std::vector<double> convolve_impl(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.empty() || b.empty()) return {};
    const std::size_t out_len = a.size() + b.size() - 1;
    const std::size_t n = next_pow2(out_len);
    // Balance the packed halves with an exact power-of-two scale.
    double na = norm2(a), nb = norm2(b);
    int e = 0;
    if (na > 0 && nb > 0) e = static_cast<int>(std::lround(0.5 * std::log2(nb / na)));
    const R sa = std::ldexp(R(1), e), sb = std::ldexp(R(1), -e);

    std::vector<cx<R>> z(n, cx<R>(0, 0));
    const bool par = n >= kParallelMin;
#pragma omp parallel for schedule(static) if (par)
    for (std::size_t i = 0; i < n; ++i) {
        R re = i < a.size() ? a[i] * sa : R(0);
        R im = i < b.size() ? b[i] * sb : R(0);
        z[i] = cx<R>(re, im);
    }
    fft_impl(z, -1);
    std::vector<cx<R>> c(n);
#pragma omp parallel for schedule(static) if (par)
    for (std::size_t k = 0; k < n; ++k) {
        const cx<R> zk = z[k];
        const cx<R> zm = std::conj(z[(n - k) & (n - 1)]);
        // A_k B_k = (Z_k^2 - conj(Z_{-k})^2) / (4i)
        const cx<R> d = (zk - zm) * (zk + zm);
        c[k] = cx<R>(d.imag(), -d.real()) * R(0.25);
    }
    fft_impl(c, +1);
    std::vector<double> out(out_len);
    const R inv_n = R(1) / static_cast<R>(n);
#pragma omp parallel for schedule(static) if (par)
    for (std::size_t i = 0; i < out_len; ++i) out[i] = static_cast<double>(c[i].real() * inv_n);
    return out;
}

double conv_bound(double norm2_a, double norm2_b, std::size_t n_transform, double eps) {
    const double lg = std::log2(static_cast<double>(std::max<std::size_t>(n_transform, 2)));
    const double per_level = eps * (1.0 + std::sqrt(5.0)) + 2.0 * eps;
    return 4.0 * norm2_a * norm2_b * (3.0 * lg + 1.0) * per_level + 1e-300;
}

}  // namespace

std::size_t next_pow2(std::size_t n) { return n <= 1 ? 1 : std::bit_ceil(n); }

void fft_inplace(std::vector<cplx>& x, int sign) { fft_impl(x, sign); }

std::vector<cplx> dft_reference(const std::vector<cplx>& x, int sign) {
    const std::size_t n = x.size();
    std::vector<cplx> out(n);
    const long double two_pi = 2.0L * std::numbers::pi_v<long double>;
    for (std::size_t j = 0; j < n; ++j) {
        long double re = 0.0L, im = 0.0L;
        for (std::size_t k = 0; k < n; ++k) {
            std::size_t jk = (j * k) % n;
            long double ang = sign * two_pi * static_cast<long double>(jk) / static_cast<long double>(n);
            long double c = std::cos(ang), s = std::sin(ang);
            re += x[k].real() * c - x[k].imag() * s;
            im += x[k].real() * s + x[k].imag() * c;
        }
        out[j] = cplx(static_cast<double>(re), static_cast<double>(im));
    }
    return out;
}

double norm2(const std::vector<double>& v) {
    long double s = 0.0L;
    for (double x : v) s += static_cast<long double>(x) * x;
    return static_cast<double>(std::sqrt(s));
}

double norm1(const std::vector<double>& v) {
    long double s = 0.0L;
    for (double x : v) s += std::abs(x);
    return static_cast<double>(s);
}

std::vector<double> fft_convolve(const std::vector<double>& a, const std::vector<double>& b) {
    return convolve_impl<double>(a, b);
}

std::vector<double> fft_convolve_extended(const std::vector<double>& a, const std::vector<double>& b) {
    return convolve_impl<long double>(a, b);
}

std::vector<double> direct_convolve_raw(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.empty() || b.empty()) return {};
    std::vector<double> out(a.size() + b.size() - 1);
    for (std::size_t n = 0; n < out.size(); ++n) {
        std::size_t lo = n >= b.size() - 1 ? n - (b.size() - 1) : 0;
        std::size_t hi = std::min(n, a.size() - 1);
        long double s = 0.0L;
        for (std::size_t m = lo; m <= hi; ++m) s += static_cast<long double>(a[m]) * b[n - m];
        out[n] = static_cast<double>(s);
    }
    return out;
}

double fft_convolve_error_bound(double norm2_a, double norm2_b, std::size_t n_transform) {
    return conv_bound(norm2_a, norm2_b, n_transform, kEps);
}

double fft_convolve_extended_error_bound(double norm2_a, double norm2_b, std::size_t n_transform) {
    return conv_bound(norm2_a, norm2_b, n_transform, static_cast<double>(std::numeric_limits<long double>::epsilon()) / 2.0);
}

double fft_convolve_extended_l2_error_bound(double norm1_a, double norm2_a, double norm1_b, double norm2_b,
                                            std::size_t n_transform) {
    // the spectral product is bounded by ||a||_1 ||b||_2 in l2 against ||a||_2 ||b||_1
    // for the transposed pairing; the power-of-two balancing costs at most sqrt 2 per side
    const double mixed = norm1_a * norm2_b + norm2_a * norm1_b;
    return 2.0 * conv_bound(1.0, mixed, n_transform, static_cast<double>(std::numeric_limits<long double>::epsilon()) / 2.0);
}

double fft_error_bound(double norm2_x, std::size_t n_transform) {
    const double lg = std::log2(static_cast<double>(std::max<std::size_t>(n_transform, 2)));
    return 1.2 * std::sqrt(static_cast<double>(n_transform)) * norm2_x * lg * (6.0 * kEps + 2.0 * kEps);
}

int configure_threads_from_env() {
    if (const char* env = std::getenv("RRL_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && v >= 1 && v <= 1024) omp_set_num_threads(static_cast<int>(v));
    }
    return omp_get_max_threads();
}

}  // namespace rrl
