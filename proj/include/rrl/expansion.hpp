#pragma once

#include <optional>
#include <vector>

#include "rrl/seqkit.hpp"
#include "rrl/steplaw.hpp"

namespace rrl {

// phi_n = Fbar(n)/mu for n >= 0, -F(n)/mu for n < 0.
double phi_exact(const StepLaw& law, long n);
// phi^+_n = Fbar(n)/mu_+ for n >= 0.
double phi_plus(const StepLaw& law, long n);
// Two-branch tail of phi: sum_{r > n} phi_r for n >= 0, -sum_{r <= n} phi_r for n < 0.
double phibar1_exact(const StepLaw& law, long n);

// Fbar(n) and Phibar_{1,n} on [lo, hi], accumulated downward from closed-form
// anchors placed every few thousand points.
void phi_block(const StepLaw& law, long lo, long hi, std::vector<double>& phi, std::vector<double>& phibar1);

// Depth below which the left part of phi is negligible (exact zero for
// finite support, below 1e-40 relative for a geometric tail).
long phi_left_edge(const StepLaw& law);

struct PhiSeq {
    WindowSeq seq;
    double mu = 0.0;
    double mu_plus = 0.0;
    double mu_minus = 0.0;
};
PhiSeq phi_seq(const StepLaw& law, long lo, long hi);

struct AsymptoticConstants {
    double beta = 0.0;
    int r_star = 1;
    std::vector<double> c;  // c[k-1] = c(k, beta), k <= r_star
};
AsymptoticConstants constants(double alpha);

struct ExpansionTable {
    int k_max = 0;
    double mu = 0.0;
    PhiSeq phi;
    // phibar[k-1] holds Phibar_k; every window starts at the same lo and reaches
    // at least n_max.
    std::vector<WindowSeq> phibar;
    long n_max = 0;
    double at(int k, long n) const { return phibar[static_cast<std::size_t>(k - 1)].at(n); }
    double err(int k) const { return phibar[static_cast<std::size_t>(k - 1)].err_budget; }
};

// Phibar_{k+1} = Phibar_k - Phibar_k * phi for k < k_max. Requires k_max <= r*
// unless allow_beyond_rstar is set.
ExpansionTable phibar(const StepLaw& law, int k_max, long n_max, bool allow_beyond_rstar = false);

// mu_2(n) = sum_{r=1}^n r phi_r at the requested n (ascending).
std::vector<double> mu2(const StepLaw& law, const std::vector<long>& grid);

struct DiagRow {
    long n = 0;
    std::vector<double> phibar;  // k = 1..K
    double partial_sum = 0.0;    // 1 + sum_k Phibar_{k,n}
    double u = 0.0;
    double u_err = 0.0;
    double d = 0.0;              // u - 1/mu
    double first_order = 0.0;    // mu d / Phibar_1
    std::vector<double> ratio;   // ratio[k-2] = Phibar_k / Phibar_1^k, k >= 2
    double e_star = 0.0;         // mu u - 1 - sum_{k <= r*} Phibar_k
    double e_star_err = 0.0;
    double e_star_norm = 0.0;    // e_star / Phibar_1^{r*}
    std::optional<double> mu2;
    std::optional<double> third;
};

// u may be null, in which case the u-dependent columns are left at 0.
std::vector<DiagRow> diagnostics(const StepLaw& law, const ExpansionTable& table, const WindowSeq* u,
                                 const std::vector<long>& grid);

}  // namespace rrl
