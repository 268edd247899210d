#include <doctest.h>
#include <omp.h>

#include <cmath>

#include "helpers.hpp"
#include "rrl/mcoracle.hpp"
#include "rrl/philox.hpp"

using namespace rrl;

TEST_CASE("Philox4x32-10 known answers") {
    using B = Philox4x32::Block;
    CHECK(Philox4x32::bijection({0, 0, 0, 0}, {0, 0}) == B{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
    CHECK(Philox4x32::bijection({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}) ==
          B{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
    CHECK(Philox4x32::bijection({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}) ==
          B{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("streams are reproducible and distinct") {
    Philox4x32 a(7, 3), b(7, 3), c(7, 4);
    for (int i = 0; i < 10; ++i) {
        const auto x = a.next_u64();
        CHECK(x == b.next_u64());
        CHECK(x != c.next_u64());
    }
    Philox4x32 u(1, 0);
    for (int i = 0; i < 1000; ++i) {
        const double v = u.uniform();
        CHECK(v > 0.0);
        CHECK(v <= 1.0);
    }
}

TEST_CASE("sampler on a single atom") {
    const auto law = StepLaw::atoms({{1, 1.0}});
    const StepSampler s(law);
    Philox4x32 rng(1, 0);
    for (int i = 0; i < 100; ++i) CHECK(s.sample(rng) == 1);
}

TEST_CASE("sampler frequencies against the law") {
    // one million draws; checks at 5 standard errors
    const auto law = testing::shipped("power15_geom.law");
    const StepSampler s(law, 256);
    Philox4x32 rng(2024, 0);
    const long N = 1000000;
    long double clipped = 0.0L;
    long over100 = 0, over10000 = 0, at_m3 = 0;
    for (long i = 0; i < N; ++i) {
        const long x = s.sample(rng);
        clipped += static_cast<long double>(std::min(x, 100L));
        over100 += x > 100;
        over10000 += x > 10000;
        at_m3 += x == -3;
    }
    // E min(X, 100) = 100 - sum_{n < 100} F(n); bounded, so the usual CLT applies
    long double e = 100.0L;
    for (long n = -200; n < 100; ++n) e -= law.fcdf(n);
    long double v2 = 0.0L;
    for (long n = -200; n <= 100; ++n) v2 += static_cast<long double>(n) * n * (n == 100 ? law.fbar(99) : law.pmf(n));
    const double sd = std::sqrt(static_cast<double>(v2 - e * e));
    CHECK(std::abs(static_cast<double>(clipped / N - e)) < 5.0 * sd / std::sqrt(static_cast<double>(N)));

    auto binom = [&](long hits, double p) {
        return std::abs(static_cast<double>(hits) / N - p) < 5.0 * std::sqrt(p * (1 - p) / N) + 1.0 / N;
    };
    CHECK(binom(over100, law.fbar(100)));
    CHECK(binom(over10000, law.fbar(10000)));
    CHECK(binom(at_m3, law.pmf(-3)));
}

TEST_CASE("two-atom renewal function by simulation") {
    const auto law = testing::shipped("twoatom.law");
    std::vector<long> targets;
    for (long n = 10; n <= 30; ++n) targets.push_back(n);
    const auto est = estimate_u(law, targets, 1000000, 99);
    int within = 0;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        const double exact = 2.0 / 3.0 + std::pow(-0.5, static_cast<double>(targets[i])) / 3.0;
        within += std::abs(est.estimate[i] - exact) <= 3.0 * est.se[i] + est.bias_bound;
    }
    CHECK(within >= 19);
    // only upward steps: returns below a target after crossing it are impossible, the bound is a formality
    CHECK(est.bias_bound < 1e-15);
}

TEST_CASE("estimates do not depend on the thread count") {
    const auto law = testing::power_law(1.5);
    const std::vector<long> targets{10, 50};
    const int saved = omp_get_max_threads();
    omp_set_num_threads(1);
    const auto a = estimate_u(law, targets, 20000, 5);
    omp_set_num_threads(3);
    const auto b = estimate_u(law, targets, 20000, 5);
    omp_set_num_threads(saved);
    CHECK(a.estimate == b.estimate);
    CHECK(a.se == b.se);
    CHECK(a.stop_level == b.stop_level);
}

TEST_CASE("estimate_u argument checks") {
    const auto law = testing::power_law(1.5);
    CHECK_THROWS(estimate_u(law, {}, 100, 1));
    CHECK_THROWS(estimate_u(law, {10}, 1, 1));
    CHECK_THROWS(estimate_u(law, {10}, 100, 1, 5));
}
