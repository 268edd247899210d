#include <doctest.h>

#include <cmath>
#include <map>

#include "helpers.hpp"
#include "rrl/special.hpp"
#include "rrl/steplaw.hpp"

using namespace rrl;
using testing::power_law;

TEST_CASE("power law drift against zeta values") {
    // p_n = c n^{-2.5}, c = 0.8 / zeta(2.5); mu = c zeta(1.5) - 0.2
    const auto law = power_law(1.5);
    const double c = 0.8 / 1.3414872572509171798;
    const double mu = c * 2.6123753486854883433 - 0.2;
    CHECK(law.mu() == doctest::Approx(mu).epsilon(1e-13));
    CHECK(law.mu() == doctest::Approx(1.3579).epsilon(1e-4));
    CHECK(law.pmf_coef() == doctest::Approx(c).epsilon(1e-14));
    CHECK(law.moments().mu_plus == doctest::Approx(mu + 0.2).epsilon(1e-13));
    CHECK(law.moments().mu_minus == doctest::Approx(-0.2).epsilon(1e-15));
    CHECK(law.moments().mu_bound < 1e-12);
}

TEST_CASE("mass is normalized and tails telescope") {
    for (double alpha : {1.2, 1.4, 1.5, 1.7, 2.0}) {
        const auto law = power_law(alpha);
        CAPTURE(alpha);
        CHECK(law.norm_residual() < 1e-12);
        CHECK(law.fbar(-2) == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(law.fcdf(-2) == 0.0);
        for (long n : {-1L, 0L, 1L, 7L, 4095L, 4096L, 4097L, 100000L}) {
            CAPTURE(n);
            CHECK(std::abs(law.fbar(n - 1) - law.fbar(n) - law.pmf(n)) <= 1e-9 * law.pmf(n) + 2e-16);
            CHECK(law.fbar(n) + law.fcdf(n) == doctest::Approx(1.0).epsilon(1e-14));
        }
        // a stored point and its analytic neighbour agree with the pmf formula
        CHECK(law.pmf(5000) == doctest::Approx(law.pmf_coef() * std::pow(5000.0, -1.0 - alpha)).epsilon(1e-14));
    }
}

TEST_CASE("integrated tail matches summed Fbar") {
    const auto law = power_law(1.5);
    long double direct = 0.0L;
    const long N = 2000000;
    for (long r = N; r > 10; --r) direct += law.fbar(r);
    // remainder sum_{r > N} Fbar(r) ~ c N^{1-alpha} / (alpha (alpha - 1))
    const double rem = law.pmf_coef() * std::pow(static_cast<double>(N), -0.5) / (1.5 * 0.5);
    CHECK(law.integrated_right(10) == doctest::Approx(static_cast<double>(direct) + rem).epsilon(1e-7));
    CHECK(law.integrated_right(-1) == doctest::Approx(law.moments().mu_plus).epsilon(1e-13));
    CHECK(law.integrated_left(-1) == doctest::Approx(0.2).epsilon(1e-15));
}

TEST_CASE("one-sided and geometric variants") {
    const auto one = testing::one_sided(1.5);
    CHECK(one.one_sided());
    CHECK(one.moments().mu_minus == 0.0);
    CHECK(one.mu() == doctest::Approx(2.6123753486854883433 / 1.3414872572509171798).epsilon(1e-13));

    const auto geo = testing::shipped("power15_geom.law");
    CHECK(geo.has_geometric());
    CHECK_FALSE(geo.one_sided());
    // p_{-k} = 0.2 * 0.5^k for k >= 1, so E X^- = 0.2 * sum k 0.5^k = 0.4, stored signed
    CHECK(geo.moments().mu_minus == doctest::Approx(-0.4).epsilon(1e-13));
    CHECK(geo.pmf(-3) == doctest::Approx(0.2 * 0.125).epsilon(1e-14));
    CHECK(geo.fcdf(-3) == doctest::Approx(0.05).epsilon(1e-13));
}

TEST_CASE("alpha = 2 has a divergent windowed second moment") {
    const auto law = testing::shipped("power20.law");
    const auto m = windowed_second_moments(law, {10, 100, 1000, 10000});
    // grows like c log w
    const double c = law.pmf_coef();
    for (std::size_t i = 1; i < m.size(); ++i)
        CHECK(m[i] - m[i - 1] == doctest::Approx(c * std::log(10.0)).epsilon(3e-2));
}

TEST_CASE("left to right tail ratio") {
    const auto law = power_law(1.5);
    const auto r = left_right_ratios(law, {1, 2});
    CHECK(r[0] == doctest::Approx(0.2 / law.fbar(1)).epsilon(1e-14));
    CHECK(r[1] == 0.0);
}

TEST_CASE("construction rejects bad laws") {
    LeftSpec left;
    left.kind = LeftSpec::Kind::Atoms;
    left.atoms = {{-1, 0.3}};
    CHECK_THROWS(StepLaw::power(1.5, 0.8, left));
    CHECK_THROWS(StepLaw::power(0.9, 1.0, LeftSpec{}));
    CHECK_THROWS(StepLaw::atoms({{-1, 0.5}, {1, 0.5}}));  // zero drift
    CHECK_THROWS(StepLaw::atoms({{1, 0.5}, {2, 0.4}}));
}

TEST_CASE("Chernoff bounds dominate exact lower tails of small walks") {
    const std::vector<std::vector<std::pair<long, double>>> laws{
        {{-1, 0.3}, {2, 0.7}},
        {{-2, 0.1}, {-1, 0.2}, {1, 0.3}, {3, 0.4}},
        {{-1, 0.4}, {0, 0.1}, {1, 0.2}, {2, 0.2}, {5, 0.1}},
    };
    for (const auto& atoms : laws) {
        const auto law = StepLaw::atoms(atoms);
        std::map<long, double> dist{{0, 1.0}};
        for (long n = 1; n <= 12; ++n) {
            std::map<long, double> next;
            for (const auto& [s, p] : dist)
                for (const auto& [x, q] : atoms) next[s + x] += p * q;
            dist.swap(next);
            for (long m = -6; m <= 6; ++m) {
                double exact = 0.0;
                for (const auto& [s, p] : dist)
                    if (s <= m) exact += p;
                CAPTURE(n);
                CAPTURE(m);
                CHECK(exact <= law.chernoff(m, n).bound * (1.0 + 1e-12));
            }
        }
    }
}

TEST_CASE("return bound controls the renewal function") {
    const auto law = StepLaw::atoms({{-1, 0.3}, {2, 0.7}});
    CHECK(law.u_max_bound() >= 1.0);
    CHECK(law.return_bound(10.0) < law.return_bound(1.0));
}
