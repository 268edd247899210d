#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "rrl/seqkit.hpp"

using namespace rrl;

namespace {

WindowSeq random_seq(long lo, long len, unsigned seed) {
    std::mt19937_64 g(seed);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    std::vector<double> v(static_cast<std::size_t>(len));
    for (auto& x : v) x = d(g);
    return WindowSeq::from_values(lo, std::move(v));
}

double sum(const WindowSeq& a) {
    long double s = 0.0L;
    for (double v : a.values) s += v;
    return static_cast<double>(s);
}

// sum_{r > n} r^{-s} by brute force up to N plus the integral-test bracket midpoint
double power_tail_oracle(double s, long n, long N) {
    long double acc = 0.0L;
    for (long r = N; r > n; --r) acc += std::pow(static_cast<long double>(r), -static_cast<long double>(s));
    const double lo = std::pow(static_cast<double>(N + 1), 1.0 - s) / (s - 1.0);
    const double hi = std::pow(static_cast<double>(N), 1.0 - s) / (s - 1.0);
    return static_cast<double>(acc) + 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("delta is the convolution identity") {
    const auto a = random_seq(-20, 100, 1);
    const auto c = convolve(a, WindowSeq::delta(0), a.lo, a.hi);
    for (long n = a.lo; n <= a.hi; ++n) CHECK(c.at(n) == a.at(n));
    const auto s = convolve(a, WindowSeq::delta(3), a.lo + 3, a.hi + 3);
    for (long n = a.lo; n <= a.hi; ++n) CHECK(s.at(n + 3) == a.at(n));
}

TEST_CASE("small exact convolution") {
    const auto a = WindowSeq::from_values(0, {1.0, 1.0});
    const auto c = convolve(a, a, 0, 2);
    CHECK(c.at(0) == 1.0);
    CHECK(c.at(1) == 2.0);
    CHECK(c.at(2) == 1.0);
    CHECK(c.at(3) == 0.0);
}

TEST_CASE("transform route matches direct summation") {
    const auto a = random_seq(-100, 512, 2), b = random_seq(7, 512, 3);
    const auto f = convolve(a, b, a.lo + b.lo, a.hi + b.hi);
    const auto d = direct_convolve(a, b, a.lo + b.lo, a.hi + b.hi);
    double worst = 0.0;
    for (long n = f.lo; n <= f.hi; ++n) worst = std::max(worst, std::abs(f.at(n) - d.at(n)));
    CHECK(worst < 1e-12);
    CHECK(worst <= f.err_budget + d.err_budget);
}

TEST_CASE("convolution properties") {
    const auto a = random_seq(-40, 300, 4), b = random_seq(0, 257, 5), c = random_seq(10, 90, 6);
    const long lo = a.lo + b.lo + c.lo, hi = a.hi + b.hi + c.hi;
    SUBCASE("symmetry") {
        const auto ab = convolve(a, b, a.lo + b.lo, a.hi + b.hi);
        const auto ba = convolve(b, a, a.lo + b.lo, a.hi + b.hi);
        for (long n = ab.lo; n <= ab.hi; ++n) CHECK(std::abs(ab.at(n) - ba.at(n)) <= ab.err_budget + ba.err_budget);
    }
    SUBCASE("associativity") {
        const auto l = convolve(convolve(a, b, a.lo + b.lo, a.hi + b.hi), c, lo, hi);
        const auto r = convolve(a, convolve(b, c, b.lo + c.lo, b.hi + c.hi), lo, hi);
        double worst = 0.0;
        for (long n = lo; n <= hi; ++n) worst = std::max(worst, std::abs(l.at(n) - r.at(n)));
        CHECK(worst < 1e-11);
    }
    SUBCASE("mass is multiplicative") {
        const auto ab = convolve(a, b, a.lo + b.lo, a.hi + b.hi);
        CHECK(sum(ab) == doctest::Approx(sum(a) * sum(b)).epsilon(1e-10));
    }
}

TEST_CASE("output window can crop") {
    const auto a = random_seq(0, 64, 7), b = random_seq(0, 64, 8);
    const auto full = convolve(a, b, 0, 126);
    const auto part = convolve(a, b, 30, 40);
    CHECK(part.lo == 30);
    CHECK(part.hi == 40);
    for (long n = 30; n <= 40; ++n) CHECK(std::abs(part.at(n) - full.at(n)) <= part.err_budget + full.err_budget);
}

TEST_CASE("tail_sum with an exact power tail model") {
    std::vector<double> v;
    for (long r = 1; r <= 1000; ++r) v.push_back(std::pow(static_cast<double>(r), -2.5));
    auto a = WindowSeq::from_values(1, v);
    a.right_tail_model = TailModel{2.5, 1.0, true};
    a.validate();
    for (long n : {1L, 500L, 1000L, 5000L}) {
        const auto t = tail_sum(a, n, Side::Right);
        const double oracle = power_tail_oracle(2.5, n, 10000000);
        CAPTURE(n);
        CHECK(std::abs(t.value - oracle) <= t.bound + 1e-17);
        CHECK(t.bound < 1e-15);
    }
    const auto left = tail_sum(a, 3, Side::Left);
    CHECK(left.value == doctest::Approx(1.0 + std::pow(2.0, -2.5) + std::pow(3.0, -2.5)).epsilon(1e-15));
}

TEST_CASE("tail_sum with a bounding model brackets the truth") {
    std::vector<double> v;
    for (long r = 1; r <= 100; ++r) v.push_back(0.5 * std::pow(static_cast<double>(r), -3.0));
    auto a = WindowSeq::from_values(1, v);
    a.right_tail_model = TailModel{3.0, 0.5, false};
    const auto t = tail_sum(a, 50, Side::Right);
    const double oracle = 0.5 * power_tail_oracle(3.0, 50, 1000000);
    CHECK(std::abs(t.value - oracle) <= t.bound);
}

TEST_CASE("tail_sum refuses what it cannot certify") {
    auto a = WindowSeq::from_values(1, {1.0, 0.5, 0.25});
    CHECK_THROWS_AS(tail_sum(a, 10, Side::Right), std::invalid_argument);
    CHECK_THROWS_AS(tail_sum(a, -4, Side::Left), std::invalid_argument);
    CHECK(tail_sum(a, 3, Side::Right).value == 0.0);
    a.right_tail_model = TailModel{0.5, 1.0, false};
    CHECK_THROWS_AS(tail_sum(a, 10, Side::Right), std::invalid_argument);
    CHECK(std::isinf(a.norm1_with_tails()));
    const auto d = WindowSeq::delta(0);
    CHECK(tail_sum(d, 0, Side::Right).value == 0.0);
    CHECK(tail_sum(d, 0, Side::Left).value == 1.0);
}

TEST_CASE("validate catches malformed windows") {
    auto a = WindowSeq::from_values(0, {1.0, 2.0});
    CHECK_NOTHROW(a.validate());
    auto bad = a;
    bad.hi = 5;
    CHECK_THROWS(bad.validate());
    bad = a;
    bad.values[1] = std::nan("");
    CHECK_THROWS(bad.validate());
    bad = a;
    bad.err_budget = -1.0;
    CHECK_THROWS(bad.validate());
    bad = WindowSeq::from_values(1, {1.0, 1.0});
    bad.right_tail_model = TailModel{2.0, 1e-3, false};
    CHECK_THROWS(bad.validate());
}

TEST_CASE("write_csv") {
    auto a = WindowSeq::from_values(-1, {0.25, 0.5, 0.25});
    std::ostringstream os;
    write_csv(os, a);
    CHECK(os.str().find("n,value\n-1,0.25\n0,0.5\n1,0.25\n") != std::string::npos);
}
