#include "rrl/special.hpp"

#include <algorithm>
#include <numbers>
#include <stdexcept>
#include <string>

namespace rrl {

const std::vector<long double>& bernoulli_ratios() {
    // B_{2j}/(2j)! = (-1)^{j+1} 2 zeta(2j) / (2 pi)^{2j}
    static const std::vector<long double> table = [] {
        constexpr int count = 40;
        std::vector<long double> out(count);
        const long double two_pi = 2.0L * std::numbers::pi_v<long double>;
        for (int j = 1; j <= count; ++j) {
            long double z = 0.0L;
            int terms = j == 1 ? 0 : 2000;
            if (j == 1) {
                z = std::numbers::pi_v<long double> * std::numbers::pi_v<long double> / 6.0L;
            } else {
                for (int k = terms; k >= 1; --k) z += std::pow(static_cast<long double>(k), -2.0L * j);
                // integral tail, negligible beyond j = 2 at this depth
                z += std::pow(static_cast<long double>(terms) + 0.5L, 1.0L - 2.0L * j) / (2.0L * j - 1.0L);
            }
            long double r = 2.0L * z / std::pow(two_pi, 2.0L * j);
            out[j - 1] = (j % 2 == 1) ? r : -r;
        }
        return out;
    }();
    return table;
}

Certified hurwitz_zeta(double s, double a) {
    if (!(a > 0.0)) throw std::domain_error("hurwitz_zeta: a must be positive");
    if (std::abs(s - 1.0) < 1e-14) throw std::domain_error("hurwitz_zeta: pole at s = 1");

    const long double sl = s;
    const long double shift = 12.0L + std::abs(sl);
    long double direct = 0.0L;
    long double b = a;
    int n_direct = 0;
    if (b < shift) {
        n_direct = static_cast<int>(std::ceil(shift - b));
    }
    for (int k = n_direct - 1; k >= 0; --k) direct += std::pow(b + k, -sl);
    b += n_direct;

    const auto& br = bernoulli_ratios();
    long double tail = std::pow(b, 1.0L - sl) / (sl - 1.0L) + 0.5L * std::pow(b, -sl);
    // term_j = B_{2j}/(2j)! * (s)_{2j-1} * b^{-s-2j+1}
    long double rising = sl;            // (s)_1
    long double bpow = std::pow(b, -sl - 1.0L);
    long double last = 0.0L;
    long double remainder = 0.0L;
    const long double inv_b2 = 1.0L / (b * b);
    const int jmax = static_cast<int>(br.size()) - 1;
    for (int j = 1; j <= jmax; ++j) {
        long double term = br[j - 1] * rising * bpow;
        tail += term;
        last = std::abs(term);
        // advance to j+1
        rising *= (sl + 2.0L * j - 1.0L) * (sl + 2.0L * j);
        bpow *= inv_b2;
        long double next = std::abs(br[j] * rising * bpow);
        remainder = next;
        long double scale = std::abs(direct + tail);
        if (next <= 1e-21L * scale || (next >= last && j > 2)) break;
    }
    Certified out;
    out.value = static_cast<double>(direct + tail);
    long double rounding = 1e-18L * (std::abs(direct) + std::abs(tail)) * (n_direct + 4);
    out.bound = static_cast<double>(2.0L * remainder + rounding) + 1e-16 * std::abs(out.value);
    return out;
}

double sin_pi(double x) {
    double r = std::remainder(x, 2.0);  // r in [-1, 1]
    if (r > 0.5)
        return std::sin(std::numbers::pi * (1.0 - r));
    if (r < -0.5)
        return -std::sin(std::numbers::pi * (1.0 + r));
    return std::sin(std::numbers::pi * r);
}

namespace {
double lanczos_gamma(double x) {
    // x >= 0.5; g = 7, n = 9
    static constexpr double g = 7.0;
    static constexpr double coef[9] = {
        0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
        771.32342877765313,   -176.61502916214059,   12.507343278686905,
        -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
    double z = x - 1.0;
    double acc = coef[0];
    for (int i = 1; i < 9; ++i) acc += coef[i] / (z + i);
    double t = z + g + 0.5;
    // split the power to avoid overflow for large x
    double p = std::pow(t, 0.5 * (z + 0.5));
    return std::sqrt(2.0 * std::numbers::pi) * p * (p * std::exp(-t)) * acc;
}
}  // namespace

double gamma_fn(double x) {
    if (x <= 0.0) {
        double nearest = std::round(x);
        if (std::abs(x - nearest) < 1e-8)
            throw std::domain_error("gamma_fn: pole proximity at x = " + std::to_string(x));
    }
    if (x < 0.5) return std::numbers::pi / (sin_pi(x) * lanczos_gamma(1.0 - x));
    return lanczos_gamma(x);
}

double c_const(int k, double beta) {
    if (k < 1) throw std::domain_error("c_const: k must be >= 1");
    if (!(beta > 0.0 && beta <= 1.0)) throw std::domain_error("c_const: beta out of (0,1]");
    double kb = k * beta;
    if (!(kb < 1.0 + beta)) throw std::domain_error("c_const: requires k*beta < alpha");
    if (k == 1) return 1.0;
    if (std::abs(kb - 1.0) < 1e-12) return 0.0;
    return (1.0 - kb) * std::pow(gamma_fn(1.0 - beta), k) / gamma_fn(2.0 - kb);
}

double c_const_direct(int k, double beta) {
    return std::pow(gamma_fn(1.0 - beta), k) / gamma_fn(1.0 - k * beta);
}

int r_star(double alpha) {
    if (!(alpha > 1.0 && alpha <= 2.0)) throw std::domain_error("r_star: alpha out of (1,2]");
    double beta = alpha - 1.0;
    int k = 1;
    while ((k + 1) * beta < alpha - 1e-12) ++k;
    return k;
}

}  // namespace rrl
