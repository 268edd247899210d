#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "rrl/charfn.hpp"
#include "rrl/density.hpp"
#include "rrl/expansion.hpp"
#include "rrl/special.hpp"

using namespace rrl;

namespace {

// direct sums of Fbar and F, independent of the anchored recursion
double phibar1_brute(const StepLaw& law, long n, long far) {
    long double s = 0.0L;
    if (n >= 0) {
        for (long r = far; r > n; --r) s += law.fbar(r);
        s += law.integrated_right(far);
    } else {
        for (long r = -far; r <= n; ++r) s += law.fcdf(r);
    }
    return static_cast<double>(s / law.mu());
}

}  // namespace

TEST_CASE("phi has unit mass and the two branches") {
    for (const char* name : {"power15.law", "power15_geom.law", "twoatom.law", "power20.law"}) {
        const auto law = testing::shipped(name);
        const long L = phi_left_edge(law);
        const auto ps = phi_seq(law, L, 5000);
        // sum_n phi_n = (mu_+ - |mu_-|) / mu = 1; the right tail beyond the window is only bounded
        const auto all = tail_sum(ps.seq, ps.seq.lo - 1, Side::Right);
        CAPTURE(name);
        CHECK(std::abs(all.value - 1.0) <= all.bound + 1e-12);
        CHECK(ps.mu == law.mu());
        CHECK(phi_exact(law, 0) == doctest::Approx(law.fbar(0) / law.mu()).epsilon(1e-15));
        CHECK(phi_exact(law, 3) == doctest::Approx(law.fbar(3) / law.mu()).epsilon(1e-15));
    }
    const auto law = testing::power_law(1.5);
    CHECK(phi_exact(law, -1) == doctest::Approx(-0.2 / law.mu()));
    CHECK(phi_plus(law, -1) == 0.0);
    CHECK(phi_plus(law, 2) == doctest::Approx(law.fbar(2) / law.moments().mu_plus));
}

TEST_CASE("anchored Phibar_1 matches direct summation") {
    SUBCASE("power law across anchors") {
        const auto law = testing::power_law(1.5);
        const auto t = phibar(law, 2, 20000);
        for (long n : {-2L, -1L, 0L, 1L, 4095L, 4096L, 4097L, 12345L, 20000L}) {
            CAPTURE(n);
            CHECK(t.at(1, n) == doctest::Approx(phibar1_exact(law, n)).epsilon(1e-12));
            CHECK(t.at(1, n) == doctest::Approx(phibar1_brute(law, n, 30000)).epsilon(1e-11));
        }
    }
    SUBCASE("finite support") {
        const auto law = testing::shipped("twoatom.law");
        const auto t = phibar(law, 2, 50);
        CHECK(t.at(1, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
        for (long n = 1; n <= 50; ++n) CHECK(t.at(1, n) == 0.0);
        // Phibar_2 = (delta_0 - delta_1) / 9
        CHECK(t.at(2, 0) == doctest::Approx(1.0 / 9.0).epsilon(1e-14));
        CHECK(t.at(2, 1) == doctest::Approx(-1.0 / 9.0).epsilon(1e-14));
        CHECK(std::abs(t.at(2, 2)) < 1e-15);
    }
    SUBCASE("density lattice with a wide core") {
        DensitySpec spec;
        const DensityFamily fam(spec);
        const auto law = fam.lattice(0.125);
        const auto t = phibar(law, 1, 3000);
        for (long n : {-20L, -1L, 0L, 1L, 3L, 7L, 8L, 9L, 100L, 3000L}) {
            CAPTURE(n);
            CHECK(t.at(1, n) == doctest::Approx(phibar1_brute(law, n, 200000)).epsilon(1e-9));
        }
    }
}

TEST_CASE("Phibar_k transforms match (1 - phi^)^k / (1 - e^{it})") {
    const auto law = StepLaw::atoms({{-1, 0.2}, {1, 0.3}, {3, 0.5}});
    const auto t = phibar(law, 3, 200);
    auto g = build_grid(law, 1024, 1e-12);
    derive(g, 3);
    for (int k = 1; k <= 3; ++k) {
        const auto& w = t.phibar[static_cast<std::size_t>(k - 1)];
        double worst = 0.0;
        for (std::size_t j : {1u, 5u, 100u, 511u, 900u}) {
            cplx s = 0.0;
            for (long n = w.lo; n <= 200; ++n) s += w.at(n) * std::exp(cplx(0.0, g.t(j) * static_cast<double>(n)));
            worst = std::max(worst, std::abs(s - g.psik[static_cast<std::size_t>(k - 1)][j]));
        }
        CAPTURE(k);
        CHECK(worst < 1e-10);
    }
}

TEST_CASE("ratios approach c(k, beta)") {
    const auto law = testing::power_law(1.4);
    const auto t = phibar(law, 3, 100000);
    const auto cst = constants(1.4);
    REQUIRE(cst.r_star == 3);
    const auto rows = diagnostics(law, t, nullptr, {1000, 10000, 100000});
    for (int k = 2; k <= 3; ++k) {
        double prev = INFINITY;
        for (const auto& r : rows) {
            const double gap = std::abs(r.ratio[static_cast<std::size_t>(k - 2)] - cst.c[static_cast<std::size_t>(k - 1)]);
            CHECK(gap < prev);
            prev = gap;
        }
        CHECK(prev < 0.01);
    }
    CHECK_THROWS(phibar(law, 4, 1000));
    CHECK_NOTHROW(phibar(law, 4, 1000, true));
}

TEST_CASE("mu_2 partial sums") {
    const auto two = testing::shipped("twoatom.law");
    const auto m = mu2(two, {1, 5, 100});
    for (double v : m) CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

    const auto law = testing::shipped("power20.law");
    const std::vector<long> grid{10, 1000, 50000};
    const auto fast = mu2(law, grid);
    long double s = 0.0L;
    std::size_t g = 0;
    for (long r = 1; r <= grid.back(); ++r) {
        s += static_cast<long double>(r) * law.fbar(r) / law.mu();
        if (r == grid[g]) {
            CHECK(fast[g] == doctest::Approx(static_cast<double>(s)).epsilon(1e-12));
            ++g;
        }
    }
    CHECK_THROWS(mu2(law, {5, 3}));
}
