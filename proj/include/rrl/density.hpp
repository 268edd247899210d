#pragma once

#include <array>
#include <vector>

#include "rrl/expansion.hpp"
#include "rrl/lawspec.hpp"
#include "rrl/renewal.hpp"
#include "rrl/steplaw.hpp"

namespace rrl {

// Density c x^{-(1+alpha)} on [x0, inf) with mass 1 - w, exponential part of
// rate eta and mass w on (-inf, 0), optionally convolved with a triangular
// kernel of half-width h0.
class DensityFamily {
public:
    explicit DensityFamily(const DensitySpec& spec);

    const DensitySpec& spec() const { return spec_; }
    double alpha() const { return spec_.alpha; }
    double mu_plus() const;
    double mu_minus() const;
    double mu() const { return mu_plus() - mu_minus(); }
    // unsmoothed P(X > x) and P(X <= x)
    double fbar(double x) const;
    double fcdf(double x) const;
    // f^ lies in L^p for this p: 2 with jumps, 1 once the kernel smooths them
    double lp_exponent() const { return spec_.smoothing_width > 0.0 ? 1.0 : 2.0; }
    int split_terms() const { return static_cast<int>(lp_exponent()) + 2; }

    // Lattice law of round(X/h) (smoothing applied on the lattice with exact
    // triangular cell masses). Requires h <= x0/8 and x0/h, h0/h integers.
    StepLaw lattice(double h) const;

private:
    DensitySpec spec_;
};

struct DiscretizeOptions {
    double t_ratio_max = 1e5;  // expansion tables reach this t
    double t_u_max = 1e4;      // u and Delta reach this t
    double tol = 1e-10;
};

struct GridRun {
    double h = 0.0;
    StepLaw law;
    ExpansionTable expansion;  // to t_ratio_max / h
    DifferenceTable inversion;   // to t_u_max / h
    RenewalTable u;
};

GridRun discretize(const DensityFamily& family, double h, const DiscretizeOptions& opt = {});

// Each field holds the value at (h, h/2); NaN where t lies beyond a table.
struct ContRow {
    double t = 0.0;
    std::vector<std::array<double, 2>> ratio;  // ratio[k-2] = Phibar_k / Phibar_1^k
    std::array<double, 2> phibar1{};
    std::array<double, 2> first_order{};  // mu (u(t) - 1/mu) / Phibar_1
    std::array<double, 2> e_star{};
    std::array<double, 2> e_star_norm{};
    std::array<double, 2> delta_ratio{};       // mu Delta(t) / phi(t)
    std::array<double, 2> delta_ratio_plus{};  // mu Delta(t) / phi^+(t)
    double max_rel_gap = 0.0;              // largest |v(h) - v(h/2)| / |v(h/2)| over the row
};

struct ContDiagnostics {
    double mu = 0.0;
    std::vector<double> c;  // c(k, beta), k <= r*
    std::vector<ContRow> rows;
};

// Throws when any diagnostic moves by more than max_gap between the two runs.
ContDiagnostics cont_diagnostics(const DensityFamily& family, const GridRun& coarse, const GridRun& fine,
                                 const std::vector<double>& t_grid, double max_gap = 0.05);

}  // namespace rrl
