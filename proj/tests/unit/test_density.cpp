#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "rrl/density.hpp"

using namespace rrl;

TEST_CASE("density family moments in closed form") {
    const DensityFamily f(DensitySpec{});
    // mu_+ = (1 - w) alpha x0 / (alpha - 1), mu_- = w / eta
    CHECK(f.mu_plus() == doctest::Approx(2.8).epsilon(1e-14));
    CHECK(f.mu_minus() == doctest::Approx(0.2).epsilon(1e-14));
    CHECK(f.mu() == doctest::Approx(2.6).epsilon(1e-14));
    CHECK(f.fbar(0.5) == doctest::Approx(0.8));
    CHECK(f.fbar(2.0) == doctest::Approx(0.8 * std::pow(2.0, -1.4)).epsilon(1e-14));
    CHECK(f.fcdf(-1.0) == doctest::Approx(0.2 * std::exp(-1.0)).epsilon(1e-14));
    CHECK(f.fbar(3.0) + f.fcdf(3.0) == doctest::Approx(1.0));
    CHECK(f.split_terms() == 4);
}

TEST_CASE("lattice laws keep mass and drift") {
    for (double sw : {0.0, 0.25}) {
        DensitySpec spec;
        spec.smoothing_width = sw;
        const DensityFamily f(spec);
        CHECK(f.split_terms() == (sw > 0.0 ? 3 : 4));
        for (double h : {0.125, 0.0625}) {
            const auto law = f.lattice(h);
            CAPTURE(sw);
            CAPTURE(h);
            CHECK(law.norm_residual() < 1e-12);
            CHECK(law.mu() * h == doctest::Approx(f.mu()).epsilon(5e-3));
            // cell (k - 1/2, k + 1/2] h of the unsmoothed law
            if (sw == 0.0) CHECK(law.pmf(-3) == doctest::Approx(f.fcdf(-2.5 * h) - f.fcdf(-3.5 * h)).epsilon(1e-12));
        }
    }
}

TEST_CASE("lattice refinement drift converges") {
    const DensityFamily f(DensitySpec{});
    const double e1 = std::abs(f.lattice(0.125).mu() * 0.125 - f.mu());
    const double e2 = std::abs(f.lattice(0.0625).mu() * 0.0625 - f.mu());
    CHECK(e2 <= e1);
}

TEST_CASE("lattice preconditions") {
    const DensityFamily f(DensitySpec{});
    CHECK_THROWS(f.lattice(0.3));
    CHECK_THROWS(f.lattice(0.07));
}

TEST_CASE("two-grid diagnostics agree on a short range") {
    const DensityFamily f(DensitySpec{});
    DiscretizeOptions opt;
    opt.t_ratio_max = 1e3;
    opt.t_u_max = 1e2;
    const auto coarse = discretize(f, 0.125, opt);
    const auto fine = discretize(f, 0.0625, opt);
    const auto d = cont_diagnostics(f, coarse, fine, {10.0, 100.0}, 0.05);
    REQUIRE(d.rows.size() == 2);
    CHECK(d.mu == doctest::Approx(2.6));
    for (const auto& r : d.rows) {
        CHECK(r.max_rel_gap < 0.05);
        CHECK(r.phibar1[0] > 0.0);
        CHECK(std::isfinite(r.delta_ratio[1]));
    }
}
