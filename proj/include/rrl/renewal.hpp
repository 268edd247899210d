#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rrl/expansion.hpp"
#include "rrl/seqkit.hpp"
#include "rrl/steplaw.hpp"

namespace rrl {

enum class Method { Doubling, Inversion, MonteCarlo };
const char* method_name(Method m);

using BudgetLedger = std::vector<std::pair<std::string, double>>;

struct RenewalTable {
    WindowSeq u;  // err_budget is the uniform certified bound
    Method method = Method::Doubling;
    double mu = 0.0;
    BudgetLedger ledger;
    long steps = 0;  // doubling: number of summed convolution powers
};

// G_K = sum_{n < K} p^{*n} by G_2K = G_K + p^{*K} * G_K on a buffered window.
RenewalTable u_by_doubling(const StepLaw& law, long lo, long hi, double tol);

// Delta_n = u_{n-1} - u_n, split as
//   Delta = -(1/mu) (delta_0 + sum_{k <= K} D_k) + R,   D_{k,n} = Phibar_{k,n} - Phibar_{k,n-1},
// where the Phibar_k come from the expansion recursion and R, whose transform is
// -(1 - phi^)^{K+1} / (mu phi^), is the only part obtained by spectral inversion.
struct DifferenceTable {
    WindowSeq delta;
    WindowSeq remainder;
    ExpansionTable expansion;
    int split_order = 1;
    double mu = 0.0;
    std::size_t M = 0;
    double cum_err = 0.0;     // bound on |sum_{m=lo}^{n} (R computed - R exact)| over the window
    double left_trunc = 0.0;  // bound on sum_{m < lo} |R_m|
    double alias_bound = 0.0;
    double tail_exponent = 0.0;  // decay exponent assumed for R beyond the window
    double tail_constant = 0.0;  // fitted on the edge band
    BudgetLedger ledger;
};

DifferenceTable delta_by_inversion(const StepLaw& law, long n_max, std::size_t M, double tol);

// u_n = (1/mu)(1_{n >= 0} + sum_k Phibar_{k,n}) - sum_{m <= n} R_m.
RenewalTable u_from_delta(const DifferenceTable& dt, long lo, long hi);

// Delta^(2) = Delta * Delta on [lo, hi].
WindowSeq delta2(const DifferenceTable& dt, long lo, long hi);

struct IdentityResult {
    double residual = 0.0;  // max |n Delta_n - mu sum_m m phi_m Delta2_{n-m}|
    double budget = 0.0;
    long worst_n = 0;
};
IdentityResult identity_06_residual(const DifferenceTable& dt, const StepLaw& law, long lo, long hi);

struct MassIdentities {
    double sum_delta = 0.0;
    double sum_delta_bound = 0.0;
    double sum_delta2 = 0.0;
    double sum_delta2_bound = 0.0;
    double target_delta = 0.0;   // -1/mu
    double target_delta2 = 0.0;  // 1/mu^2
};
MassIdentities mass_identities(const DifferenceTable& dt, const StepLaw& law);

struct PropRow {
    long n = 0;
    double delta = 0.0;
    double n_delta = 0.0;
    std::optional<double> ratio_phi;       // mu Delta_n / phi_n
    std::optional<double> ratio_phi_plus;  // mu Delta_n / phi^+_n
};
std::vector<PropRow> prop_diagnostics(const DifferenceTable& dt, const StepLaw& law, const std::vector<long>& grid);

}  // namespace rrl
