#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "rrl/renewal.hpp"

using namespace rrl;

namespace {

// steps 1 and 2 with probability 1/2 each: u_n = 2/3 + (1/3)(-1/2)^n, n >= 0
double twoatom_u(long n) { return n < 0 ? 0.0 : 2.0 / 3.0 + std::pow(-0.5, static_cast<double>(n)) / 3.0; }

const DifferenceTable& twoatom_inversion() {
    static const DifferenceTable dt =
        delta_by_inversion(testing::shipped("twoatom.law"), 2000, std::size_t{1} << 16, 1e-10);
    return dt;
}

}  // namespace

TEST_CASE("unit step visits every site once") {
    const auto law = StepLaw::atoms({{1, 1.0}});
    const auto t = u_by_doubling(law, -3, 200, 1e-10);
    for (long n = -3; n <= 200; ++n) CHECK(std::abs(t.u.at(n) - (n >= 0 ? 1.0 : 0.0)) <= t.u.err_budget);
    CHECK(t.method == Method::Doubling);
    CHECK(std::string(method_name(t.method)) == "doubling");
}

TEST_CASE("two-atom closed form, both methods") {
    const auto law = testing::shipped("twoatom.law");
    const auto dbl = u_by_doubling(law, -5, 60, 1e-11);
    double worst = 0.0;
    for (long n = -5; n <= 60; ++n) worst = std::max(worst, std::abs(dbl.u.at(n) - twoatom_u(n)));
    CHECK(worst <= dbl.u.err_budget);
    CHECK(dbl.u.err_budget <= 1e-11);

    const auto dt = delta_by_inversion(law, 60, 2048, 1e-12);
    const auto inv = u_from_delta(dt, 0, 60);
    CHECK(inv.method == Method::Inversion);
    worst = 0.0;
    for (long n = 0; n <= 60; ++n) worst = std::max(worst, std::abs(inv.u.at(n) - twoatom_u(n)));
    CHECK(worst <= inv.u.err_budget);
    CHECK(inv.u.err_budget <= 1e-10);
    // Delta_n = u_{n-1} - u_n
    for (long n = 1; n <= 60; ++n)
        CHECK(std::abs(dt.delta.at(n) - (twoatom_u(n - 1) - twoatom_u(n))) <= dt.delta.err_budget);
}

TEST_CASE("difference identity on the two-atom law") {
    const auto& dt = twoatom_inversion();
    const auto r = identity_06_residual(dt, testing::shipped("twoatom.law"), -50, 200);
    CHECK(r.residual <= 1e-10);
    CHECK(r.residual <= r.budget);
}

TEST_CASE("mass identities") {
    for (const char* name : {"twoatom.law", "power15.law"}) {
        const auto law = testing::shipped(name);
        const auto dt = delta_by_inversion(law, 2000, std::size_t{1} << 16, 1e-10);
        const auto m = mass_identities(dt, law);
        CAPTURE(name);
        CHECK(m.target_delta == doctest::Approx(-1.0 / law.mu()));
        CHECK(m.target_delta2 == doctest::Approx(1.0 / (law.mu() * law.mu())));
        CHECK(std::abs(m.sum_delta - m.target_delta) <= m.sum_delta_bound);
        CHECK(std::abs(m.sum_delta2 - m.target_delta2) <= m.sum_delta2_bound);
        if (law.tail_kind() == TailKind::None) CHECK(m.sum_delta_bound < 1e-9);
    }
}

TEST_CASE("differences telescope to u") {
    const auto law = testing::power_law(1.5);
    const auto dt = delta_by_inversion(law, 2000, std::size_t{1} << 16, 1e-10);
    const auto u = u_from_delta(dt, 0, 2000);
    for (long n : {1L, 10L, 999L, 2000L}) {
        CAPTURE(n);
        CHECK(std::abs(u.u.at(n - 1) - u.u.at(n) - dt.delta.at(n)) < 1e-13);
    }
    // and agree with doubling
    const auto dbl = u_by_doubling(law, 0, 2000, 1e-9);
    double worst = 0.0;
    for (long n = 0; n <= 2000; ++n) worst = std::max(worst, std::abs(dbl.u.at(n) - u.u.at(n)));
    CHECK(worst <= dbl.u.err_budget + u.u.err_budget);
    CHECK(u.u.at(2000) == doctest::Approx(1.0 / law.mu()).epsilon(5e-2));
}

TEST_CASE("Delta^(2) is the self convolution of Delta") {
    const auto& dt = twoatom_inversion();
    const auto d2 = delta2(dt, 0, 30);
    for (long n = 0; n <= 30; ++n) {
        long double s = 0.0L;
        for (long m = dt.delta.lo; m <= dt.delta.hi; ++m) s += static_cast<long double>(dt.delta.at(m)) * dt.delta.at(n - m);
        CAPTURE(n);
        CHECK(std::abs(d2.at(n) - static_cast<double>(s)) <= d2.err_budget + 1e-15);
    }
}

TEST_CASE("prop diagnostics skip points where phi vanishes") {
    const auto& dt = twoatom_inversion();
    const auto rows = prop_diagnostics(dt, testing::shipped("twoatom.law"), {0, 1, 5, 100000});
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].ratio_phi.has_value());
    CHECK(rows[1].ratio_phi.has_value());
    CHECK_FALSE(rows[2].ratio_phi.has_value());
    CHECK_FALSE(rows[2].ratio_phi_plus.has_value());
    CHECK(rows[2].n_delta == 5.0 * rows[2].delta);
}
