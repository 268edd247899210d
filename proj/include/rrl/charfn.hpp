#pragma once

#include <cstddef>
#include <vector>

#include "rrl/fft.hpp"
#include "rrl/steplaw.hpp"

namespace rrl {

// Characteristic-function samples on t_j = 2 pi j / M, stored in transform
// order (j >= M/2 stands for t_j - 2 pi).
struct CharFnGrid {
    std::size_t M = 0;
    double mu = 0.0;
    double beta = 0.0;
    std::vector<cplx> phat;
    // The pmf is folded modulo M in closed form, so nothing is cut off.
    long p_cut = -1;
    long n_cut = -1;
    double fold_bound = 0.0;   // remainder of the closed-form folding
    double trunc_bound = 0.0;  // uniform bound on |phat - p^(t_j)|

    std::vector<cplx> phihat;
    std::vector<cplx> deltahat;
    std::vector<std::vector<cplx>> psik;  // psik[k-1]
    std::vector<bool> psik_zero_finite;
    std::vector<double> phihat_err;    // per point
    std::vector<double> deltahat_err;  // per point

    double t(std::size_t j) const;
};

// Folded pmf q_r = sum_{n = r mod M} p_n, r in [0, M); bound receives the closed-form remainder.
std::vector<double> fold_pmf(const StepLaw& law, std::size_t M, double& bound);

CharFnGrid build_grid(const StepLaw& law, std::size_t M, double tol);
void derive(CharFnGrid& grid, int k_max);

// 1 - e^{it}, cancellation-free.
cplx one_minus_expi(double t);

// Pointwise route, independent of the grid: small-t expansions of the power
// tail plus exact atom sums. Valid for 0 < |t| <= 0.05 and alpha < 2.
struct PointwiseCF {
    cplx phat;
    cplx one_minus_phihat;
    cplx phihat;
};
PointwiseCF charfn_pointwise(const StepLaw& law, double t);

struct SmallTRow {
    double t = 0.0;
    cplx ratio1;
    cplx ratio2;
    double r_t = 0.0;
};
// R1 = (1 - phi^(t)) / (Gamma(1-beta) e^{-i pi beta/2} r(t)),
// R2 = -phi^'(t) / (beta Gamma(1-beta) e^{-i pi beta/2} t^{-1} r(t)), r(t) = Phibar_{1, ceil(1/t)}.
std::vector<SmallTRow> small_t_checks(const StepLaw& law, const std::vector<double>& t_list);

}  // namespace rrl
