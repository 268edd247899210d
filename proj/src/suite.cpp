#include "rrl/suite.hpp"

#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <memory>
#include <random>
#include <sstream>

#include "rrl/charfn.hpp"
#include "rrl/density.hpp"
#include "rrl/expansion.hpp"
#include "rrl/fft.hpp"
#include "rrl/lawspec.hpp"
#include "rrl/mcoracle.hpp"
#include "rrl/renewal.hpp"
#include "rrl/report.hpp"
#include "rrl/special.hpp"

namespace rrl {

namespace {

// Tolerances and limits, one block per criterion.
constexpr long kC1Hi = 10000;
constexpr double kC1DoublingTol = 1e-8;
constexpr double kC1Agreement = 1e-7;
constexpr double kC1Seconds = 300.0;

constexpr long kInvNMax = 100000;
constexpr std::size_t kInvM = std::size_t{1} << 22;
constexpr double kInvTol = 1e-10;

constexpr long kC2Hi = 60;
constexpr double kC2Tol = 1e-10;

constexpr long kC3Hi = 1000;
constexpr double kC3FiniteTol = 1e-10;
constexpr double kC3PowerTol = 1e-6;
constexpr double kC3Seconds = 120.0;

constexpr double kC5R1Final = 0.05;
constexpr double kC5R2Final = 0.10;
constexpr double kC5Seconds = 120.0;

constexpr long kC6NMax = 1000000;
constexpr double kC6Rel = 0.10;
constexpr double kC6Seconds = 900.0;

constexpr double kC8Final = 0.25;
constexpr double kC8Seconds = 600.0;

constexpr double kC9Decay = 0.2;
constexpr double kC9Ratio = 0.1;

constexpr int kC10Points = 40;
constexpr double kC10Sigmas = 3.0;
constexpr double kC10Fraction = 0.95;
constexpr double kC10Seconds = 600.0;

constexpr double kC11Rel = 0.15;
constexpr double kC11Gap = 0.02;
constexpr double kC11Seconds = 1200.0;

constexpr double kC12ConvSeconds = 1.0;
constexpr double kC12InvSeconds = 60.0;

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string g(double x, int digits = 4) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.*g", digits, x);
    return buf;
}

bool strictly_decreasing(const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] < v[i - 1])) return false;
    return true;
}

std::string join(const std::vector<double>& v, int digits = 4) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + g(v[i], digits);
    return s;
}

class Suite {
public:
    Suite(const SuiteConfig& cfg, std::ostream& log) : cfg_(cfg), log_(log) {
        auto& m = manifest_.data();
        m["version"] = kVersion;
        m["seed"] = cfg.seed;
        m["replicas"] = cfg.replicas;
        m["inversion"] = {{"n_max", kInvNMax}, {"M", kInvM}, {"tol", kInvTol}};
    }

    SuiteReport run() {
        SuiteReport rep;
        using Fn = CriterionResult (Suite::*)();
        const Fn fns[] = {&Suite::c1, &Suite::c2, &Suite::c3,  &Suite::c4,  &Suite::c5,  &Suite::c6,
                          &Suite::c7, &Suite::c8, &Suite::c9, &Suite::c10, &Suite::c11, &Suite::c12,
                          &Suite::c13};
        for (Fn f : fns) {
            const auto t0 = Clock::now();
            CriterionResult r;
            try {
                r = (this->*f)();
            } catch (const std::exception& e) {
                r.id = static_cast<int>(rep.results.size()) + 1;
                r.pass = false;
                r.note = std::string("error: ") + e.what();
            }
            r.seconds = since(t0);
            log_ << "criterion " << r.id << " " << (r.pass ? "PASS" : "FAIL") << " (" << g(r.seconds, 3) << " s) "
                 << r.measured << "\n";
            log_.flush();
            rep.results.push_back(r);
        }
        finish(rep);
        return rep;
    }

private:
    const ParsedSpec& spec(const std::string& name) {
        auto it = specs_.find(name);
        if (it == specs_.end()) {
            it = specs_.emplace(name, parse_spec_file((std::filesystem::path(cfg_.spec_dir) / name).string())).first;
            manifest_.data()["specs"][name] = it->second.canonical();
        }
        return it->second;
    }
    const StepLaw& law(const std::string& name) {
        const auto& s = spec(name);
        if (!s.law) throw std::runtime_error(name + " is not a lattice law");
        return *s.law;
    }
    static std::string stem(const std::string& name) { return std::filesystem::path(name).stem().string(); }

    // Shared inversion tables, n_max = 1e5 on M = 2^22.
    const DifferenceTable& inversion(const std::string& name) {
        auto it = inv_.find(name);
        if (it == inv_.end()) {
            auto dt = std::make_unique<DifferenceTable>(delta_by_inversion(law(name), kInvNMax, kInvM, kInvTol));
            it = inv_.emplace(name, std::move(dt)).first;
            budget(name, "inversion.delta_err", it->second->delta.err_budget);
        }
        return *it->second;
    }
    const RenewalTable& inversion_u(const std::string& name) {
        auto it = inv_u_.find(name);
        if (it == inv_u_.end()) {
            it = inv_u_.emplace(name, std::make_unique<RenewalTable>(u_from_delta(inversion(name), 0, kInvNMax))).first;
            budget(name, "inversion.u_err", it->second->u.err_budget);
        }
        return *it->second;
    }

    void budget(const std::string& name, const std::string& key, double v) { manifest_.data()["budgets"][name][key] = v; }
    void emit(const std::string& file, CsvTable t) { files_.emplace_back(file, std::move(t)); }

    CriterionResult c1() {
        CriterionResult r{1, "two-method renewal agreement", true, "", "", "", 0};
        r.threshold = "diff <= doubling err + inversion err and <= " + g(kC1Agreement) + " on [0," +
                      std::to_string(kC1Hi) + "], <= " + g(kC1Seconds) + " s per law";
        for (const char* name : {"power14.law", "power15.law", "power17.law"}) {
            const StepLaw& L = law(name);
            const auto t0 = Clock::now();
            auto dbl = std::make_unique<RenewalTable>(u_by_doubling(L, 0, kC1Hi, kC1DoublingTol));
            const RenewalTable& inv = inversion_u(name);
            const double secs = since(t0);
            double diff = 0.0;
            for (long n = 0; n <= kC1Hi; ++n) diff = std::max(diff, std::abs(dbl->u.at(n) - inv.u.at(n)));
            const double bud = dbl->u.err_budget + inv.u.err_budget;
            const bool ok = diff <= bud && diff <= kC1Agreement && secs <= kC1Seconds;
            r.pass = r.pass && ok;
            r.measured += std::string(r.measured.empty() ? "" : "; ") + stem(name) + ": diff " + g(diff, 3) +
                          " budget " + g(bud, 3) + " time " + g(secs, 3) + " s";
            budget(name, "doubling.u_err", dbl->u.err_budget);
            emit("c01_" + stem(name) + "_doubling.csv", u_csv(*dbl, 0, kC1Hi));
            emit("c01_" + stem(name) + "_inversion.csv", u_csv(inv, 0, kC1Hi));
            doubling_[name] = std::move(dbl);
        }
        return r;
    }

    CriterionResult c2() {
        CriterionResult r{2, "closed-form oracle p1 = p2 = 1/2", false, "", "", "", 0};
        r.threshold = "max |u - (2/3 + (1/3)(-1/2)^n)| <= " + g(kC2Tol) + " on [0,60], both methods";
        const StepLaw& L = law("twoatom.law");
        const RenewalTable dbl = u_by_doubling(L, 0, kC2Hi, 1e-11);
        const DifferenceTable dt = delta_by_inversion(L, kC2Hi, 2048, 1e-12);
        const RenewalTable inv = u_from_delta(dt, 0, kC2Hi);
        double e_d = 0.0, e_i = 0.0;
        for (long n = 0; n <= kC2Hi; ++n) {
            const double exact = 2.0 / 3.0 + std::pow(-0.5, static_cast<double>(n)) / 3.0;
            e_d = std::max(e_d, std::abs(dbl.u.at(n) - exact));
            e_i = std::max(e_i, std::abs(inv.u.at(n) - exact));
        }
        r.pass = e_d <= kC2Tol && e_i <= kC2Tol;
        r.measured = "doubling " + g(e_d, 3) + ", inversion " + g(e_i, 3);
        emit("c02_twoatom_doubling.csv", u_csv(dbl, 0, kC2Hi));
        emit("c02_twoatom_inversion.csv", u_csv(inv, 0, kC2Hi));
        return r;
    }

    CriterionResult c3() {
        CriterionResult r{3, "exact identity n Delta_n = mu sum m phi_m Delta2_{n-m}", false, "", "", "", 0};
        r.threshold = "residual <= " + g(kC3FiniteTol) + " (twoatom), <= " + g(kC3PowerTol) + " (power15) on [0," +
                      std::to_string(kC3Hi) + "], <= " + g(kC3Seconds) + " s";
        const auto t0 = Clock::now();
        const StepLaw& L2 = law("twoatom.law");
        const DifferenceTable dt2 = delta_by_inversion(L2, 2 * kC3Hi, std::size_t{1} << 16, 1e-10);
        const IdentityResult fin = identity_06_residual(dt2, L2, 0, kC3Hi);
        const DifferenceTable& dt = inversion("power15.law");
        const IdentityResult pw = identity_06_residual(dt, law("power15.law"), 0, kC3Hi);
        const double secs = since(t0);
        r.pass = fin.residual <= kC3FiniteTol && pw.residual <= kC3PowerTol && secs <= kC3Seconds;
        r.measured = "twoatom " + g(fin.residual, 3) + " (budget " + g(fin.budget, 3) + "), power15 " +
                     g(pw.residual, 3) + " (budget " + g(pw.budget, 3) + "), time " + g(secs, 3) + " s";
        CsvTable t;
        t.columns = {"law", "residual", "budget", "worst_n"};
        t.rows.push_back({"twoatom", fmt(fin.residual), fmt(fin.budget), std::to_string(fin.worst_n)});
        t.rows.push_back({"power15", fmt(pw.residual), fmt(pw.budget), std::to_string(pw.worst_n)});
        emit("c03_identity.csv", std::move(t));
        return r;
    }

    CriterionResult c4() {
        CriterionResult r{4, "mass identities", true, "", "", "", 0};
        r.threshold = "|sum Delta + 1/mu| and |sum Delta2 - 1/mu^2| within certified bounds, every shipped law";
        CsvTable t;
        t.columns = {"law", "sum_delta", "target_delta", "bound_delta", "sum_delta2", "target_delta2", "bound_delta2"};
        int failed = 0;
        double worst = 0.0;
        const std::vector<std::string> names = {"power14.law", "power15.law",          "power17.law", "power20.law",
                                                "power15_onesided.law", "power15_geom.law", "twoatom.law"};
        for (const std::string& name : names) {
            const StepLaw& L = law(name);
            std::unique_ptr<DifferenceTable> local;
            const DifferenceTable* dt;
            if (name == "twoatom.law") {
                local = std::make_unique<DifferenceTable>(delta_by_inversion(L, 2000, std::size_t{1} << 16, 1e-10));
                dt = local.get();
            } else {
                dt = &inversion(name);
            }
            const MassIdentities m = mass_identities(*dt, L);
            const double e1 = std::abs(m.sum_delta - m.target_delta);
            const double e2 = std::abs(m.sum_delta2 - m.target_delta2);
            const bool ok = e1 <= m.sum_delta_bound && e2 <= m.sum_delta2_bound;
            if (!ok) ++failed;
            worst = std::max({worst, e1 / m.sum_delta_bound, e2 / m.sum_delta2_bound});
            t.rows.push_back({stem(name), fmt(m.sum_delta), fmt(m.target_delta), fmt(m.sum_delta_bound),
                              fmt(m.sum_delta2), fmt(m.target_delta2), fmt(m.sum_delta2_bound)});
        }
        r.pass = failed == 0;
        r.measured = std::to_string(names.size() - failed) + "/" + std::to_string(names.size()) + " laws within bounds, worst error/bound " + g(worst, 3);
        emit("c04_mass.csv", std::move(t));
        return r;
    }

    CriterionResult c5() {
        CriterionResult r{5, "small-t ratios R1, R2", true, "", "", "", 0};
        r.threshold = "|R1-1|, |R2-1| strictly decreasing over t = 1e-2..1e-5, final < " + g(kC5R1Final) + " / " +
                      g(kC5R2Final) + ", <= " + g(kC5Seconds) + " s";
        const auto t0 = Clock::now();
        const std::vector<double> ts = {1e-2, 1e-3, 1e-4, 1e-5};
        for (const char* name : {"power14.law", "power17.law"}) {
            const auto rows = small_t_checks(law(name), ts);
            std::vector<double> e1, e2;
            for (const auto& row : rows) {
                e1.push_back(std::abs(row.ratio1 - 1.0));
                e2.push_back(std::abs(row.ratio2 - 1.0));
            }
            const bool ok = strictly_decreasing(e1) && strictly_decreasing(e2) && e1.back() < kC5R1Final &&
                            e2.back() < kC5R2Final;
            r.pass = r.pass && ok;
            r.measured += std::string(r.measured.empty() ? "" : "; ") + stem(name) + ": |R1-1| " + join(e1, 3) +
                          ", |R2-1| " + join(e2, 3);
            emit("c05_small_t_" + stem(name) + ".csv", small_t_csv(rows));
        }
        r.pass = r.pass && since(t0) <= kC5Seconds;
        return r;
    }

    CriterionResult c6() {
        CriterionResult r{6, "expansion ratios Phibar_k / Phibar_1^k", false, "", "", "", 0};
        r.threshold = "alpha 1.4: ratio_2, ratio_3 at 1e6 within " + g(100 * kC6Rel) +
                      "% of c(k,0.4), |ratio - c| strictly decreasing over 1e3..1e6 (or halving per decade: slow-RV); "
                      "alpha 1.5: |ratio_2| strictly decreasing; <= " +
                      g(kC6Seconds) + " s with criterion 7";
        const auto t0 = Clock::now();
        const std::vector<long> grid = decades(1000, kC6NMax);

        const StepLaw& L14 = law("power14.law");
        const double beta = L14.alpha() - 1.0;
        const ExpansionTable t14 = phibar(L14, r_star(L14.alpha()), kC6NMax);
        bool ok14 = true, endpoint = true, halving = true;
        for (int k = 2; k <= 3; ++k) {
            const double c = c_const(k, beta);
            std::vector<double> gap;
            for (long n : grid) gap.push_back(std::abs(t14.at(k, n) / std::pow(t14.at(1, n), k) - c));
            const double end_ratio = t14.at(k, kC6NMax) / std::pow(t14.at(1, kC6NMax), k);
            endpoint = endpoint && std::abs(end_ratio - c) <= kC6Rel * std::abs(c);
            ok14 = ok14 && strictly_decreasing(gap);
            for (std::size_t i = 1; i < gap.size(); ++i) halving = halving && gap[i] <= 0.5 * gap[i - 1];
            r.measured += "ratio_" + std::to_string(k) + "(1e6) " + g(end_ratio, 5) + " vs c " + g(c, 5) +
                          ", |ratio-c| " + join(gap, 3) + "; ";
        }
        const StepLaw& L15 = law("power15.law");
        const ExpansionTable t15 = phibar(L15, r_star(L15.alpha()), kC6NMax);
        std::vector<double> r15;
        for (long n : grid) r15.push_back(std::abs(t15.at(2, n) / std::pow(t15.at(1, n), 2)));
        const bool ok15 = strictly_decreasing(r15);
        r.measured += "alpha 1.5 |ratio_2| " + join(r15, 3);

        // u columns are filled where the inversion tables reach
        emit("c06_expansion_power14.csv",
             expansion_csv(diagnostics(L14, t14, &inversion_u("power14.law").u, grid), kInvNMax));
        emit("c06_expansion_power15.csv",
             expansion_csv(diagnostics(L15, t15, &inversion_u("power15.law").u, grid), kInvNMax));

        const bool time_ok = since(t0) <= kC6Seconds;
        r.pass = ok14 && ok15 && time_ok && (endpoint || halving);
        if (r.pass && !endpoint) r.note = "slow-RV: endpoint outside tolerance, gap halves per decade";
        return r;
    }

    CriterionResult c7() {
        CriterionResult r{7, "remainder e*_n decay", true, "", "", "", 0};
        r.threshold = "|e*_n| strictly decreasing over 1e3, 1e4, 1e5, separated by more than the error bounds";
        const std::vector<long> grid = decades(1000, kInvNMax);
        for (const char* name : {"power14.law", "power15.law"}) {
            const StepLaw& L = law(name);
            const RenewalTable& u = inversion_u(name);
            const auto rows = diagnostics(L, inversion(name).expansion, &u.u, grid);
            std::vector<double> e, err;
            bool ok = true;
            for (const auto& row : rows) {
                e.push_back(std::abs(row.e_star));
                err.push_back(row.e_star_err);
            }
            for (std::size_t i = 1; i < e.size(); ++i) ok = ok && e[i] + err[i] < e[i - 1] - err[i - 1];
            r.pass = r.pass && ok;
            r.measured += std::string(r.measured.empty() ? "" : "; ") + stem(name) + ": |e*| " + join(e, 3) +
                          " (err " + join(err, 2) + ")";
            emit("c07_e_star_" + stem(name) + ".csv", expansion_csv(rows, kInvNMax));
        }
        return r;
    }

    CriterionResult c8() {
        CriterionResult r{8, "alpha = 2 third-order term", false, "", "", "", 0};
        r.threshold = "|third(n) - 1| decreasing over 1e2..1e5 and < " + g(kC8Final) + " at 1e5, <= " +
                      g(kC8Seconds) + " s";
        const auto t0 = Clock::now();
        const StepLaw& L = law("power20.law");
        const std::vector<long> grid = decades(100, kInvNMax);
        const auto rows = diagnostics(L, inversion("power20.law").expansion, &inversion_u("power20.law").u, grid);
        std::vector<double> gap, third, half;
        for (const auto& row : rows) {
            third.push_back(*row.third);
            gap.push_back(std::abs(*row.third - 1.0));
            half.push_back(*row.third / 2.0);
        }
        r.pass = strictly_decreasing(gap) && gap.back() < kC8Final && since(t0) <= kC8Seconds;
        r.measured = "third " + join(third, 5) + "; third/2 " + join(half, 5);
        r.note = "third(n) tends to 2: the second expansion term is -2 phi_n mu_2(n)/mu, see README";
        emit("c08_third_power20.csv", expansion_csv(rows, kInvNMax));
        return r;
    }

    CriterionResult c9() {
        CriterionResult r{9, "difference decay and Delta_n ~ phi_n / mu", false, "", "", "", 0};
        r.threshold = "|n Delta_n|(1e5) <= " + g(kC9Decay) + " |n Delta_n|(1e3); |mu Delta_n/phi_n - 1| < " +
                      g(kC9Ratio) + " at 1e5 and decreasing (power15 with phi, power15_onesided with phi^+)";
        const std::vector<long> grid = decades(1000, kInvNMax);
        const std::vector<long> csv_grid = {-1000, -100, -10, 10, 100, 1000, 10000, 100000};

        const StepLaw& L = law("power15.law");
        const auto rows = prop_diagnostics(inversion("power15.law"), L, grid);
        const double decay = std::abs(rows.back().n_delta) / std::abs(rows.front().n_delta);
        std::vector<double> e_phi, lit;
        for (const auto& row : rows) {
            e_phi.push_back(std::abs(*row.ratio_phi - 1.0));
            lit.push_back(*row.ratio_phi_plus);
        }
        const StepLaw& Lo = law("power15_onesided.law");
        const auto rows_o = prop_diagnostics(inversion("power15_onesided.law"), Lo, grid);
        std::vector<double> e_plus;
        for (const auto& row : rows_o) e_plus.push_back(std::abs(*row.ratio_phi_plus - 1.0));

        r.pass = decay <= kC9Decay && strictly_decreasing(e_phi) && e_phi.back() < kC9Ratio &&
                 strictly_decreasing(e_plus) && e_plus.back() < kC9Ratio;
        r.measured = "|n Delta| ratio " + g(decay, 3) + "; |mu Delta/phi - 1| " + join(e_phi, 3) +
                     "; one-sided |mu Delta/phi^+ - 1| " + join(e_plus, 3) + "; two-sided mu Delta/phi^+ " +
                     join(lit, 4);
        r.note = "with a left tail mu Delta/phi^+ tends to mu_+/mu, so phi is used for the two-sided law";
        emit("c09_delta_power15.csv", delta_csv(inversion("power15.law"), L, csv_grid));
        emit("c09_delta_power15_onesided.csv", delta_csv(inversion("power15_onesided.law"), Lo, csv_grid));
        return r;
    }

    CriterionResult c10() {
        CriterionResult r{10, "Monte Carlo concordance", false, "", "", "", 0};
        r.threshold = "|u_mc - u_doubling| <= " + g(kC10Sigmas) + " se on >= " + g(100 * kC10Fraction) +
                      "% of 40 geometric targets in [10,1e4], bias bound < se/2, <= " + g(kC10Seconds) + " s";
        const auto t0 = Clock::now();
        const StepLaw& L = law("power15.law");
        const auto targets = geometric_grid(10, kC1Hi, kC10Points);
        const McEstimate est = estimate_u(L, targets, cfg_.replicas, cfg_.seed);
        const RenewalTable& ref = *doubling_.at("power15.law");
        int within = 0;
        double min_se = INFINITY;
        for (std::size_t i = 0; i < targets.size(); ++i) {
            const double z = std::abs(est.estimate[i] - ref.u.at(targets[i]));
            if (z <= kC10Sigmas * est.se[i]) ++within;
            min_se = std::min(min_se, est.se[i]);
        }
        const double secs = since(t0);
        const int need = static_cast<int>(std::ceil(kC10Fraction * static_cast<double>(targets.size())));
        r.pass = within >= need && est.bias_bound < 0.5 * min_se && secs <= kC10Seconds;
        r.measured = std::to_string(within) + "/" + std::to_string(targets.size()) + " within " + g(kC10Sigmas) +
                     " se, bias " + g(est.bias_bound, 3) + " vs se/2 " + g(0.5 * min_se, 3) + ", R " +
                     std::to_string(est.replicas) + ", time " + g(secs, 3) + " s";
        CsvTable t = mc_csv(est);
        t.columns.push_back("u_doubling");
        for (std::size_t i = 0; i < targets.size(); ++i) t.rows[i].push_back(fmt(ref.u.at(targets[i])));
        emit("c10_mc_power15.csv", std::move(t));
        return r;
    }

    CriterionResult c11() {
        CriterionResult r{11, "continuous case by lattice refinement", false, "", "", "", 0};
        r.threshold = "ratio_2(t=1e5) within " + g(100 * kC11Rel) + "% of c(2,0.4) at h = 0.1 x0 and 0.05 x0; h-pair gap <= " +
                      g(100 * kC11Gap) + "%; |mu Delta/phi - 1| decreasing over t = 1e2..1e4; <= " + g(kC11Seconds) + " s";
        const auto t0 = Clock::now();
        const auto& s = spec("density14.dens");
        const DensityFamily fam(s.density);
        const double h = 0.1 * s.density.x0;
        const GridRun coarse = discretize(fam, h);
        const GridRun fine = discretize(fam, 0.5 * h);
        const ContDiagnostics d = cont_diagnostics(fam, coarse, fine, {1e2, 1e3, 1e4, 1e5});
        const double c2 = d.c[1];
        const auto& last = d.rows.back();
        double gap = 0.0;
        for (const auto& row : d.rows) gap = std::max(gap, row.max_rel_gap);
        bool trend = true;
        for (int i = 0; i < 2; ++i)
            for (std::size_t j = 1; j < 3; ++j)
                trend = trend && std::abs(d.rows[j].delta_ratio[i] - 1.0) < std::abs(d.rows[j - 1].delta_ratio[i] - 1.0);
        const bool near = std::abs(last.ratio[0][0] - c2) <= kC11Rel * std::abs(c2) &&
                          std::abs(last.ratio[0][1] - c2) <= kC11Rel * std::abs(c2);
        const double secs = since(t0);
        r.pass = near && gap <= kC11Gap && trend && secs <= kC11Seconds;
        r.measured = "ratio_2(1e5) " + g(last.ratio[0][0], 5) + " / " + g(last.ratio[0][1], 5) + " vs c " + g(c2, 5) +
                     ", max gap " + g(gap, 3) + ", mu Delta/phi " + g(d.rows[0].delta_ratio[1], 4) + " " +
                     g(d.rows[1].delta_ratio[1], 4) + " " + g(d.rows[2].delta_ratio[1], 4) + ", time " + g(secs, 3) + " s";
        budget("density14.dens", "coarse.u_err", coarse.u.u.err_budget);
        budget("density14.dens", "fine.u_err", fine.u.u.err_budget);
        emit("c11_density14.csv", density_csv(d));
        return r;
    }

    CriterionResult c12() {
        CriterionResult r{12, "performance floor", false, "", "", "", 0};
        r.threshold = "convolution at transform length 2^20 < " + g(kC12ConvSeconds) +
                      " s; inversion pathway (M = 2^22, n_max = 1e5) < " + g(kC12InvSeconds) + " s";
        std::mt19937_64 rng(cfg_.seed);
        std::uniform_real_distribution<double> U(-1.0, 1.0);
        std::vector<double> a(std::size_t{1} << 19), b(std::size_t{1} << 19);
        for (auto& x : a) x = U(rng);
        for (auto& x : b) x = U(rng);
        auto t0 = Clock::now();
        const auto c = fft_convolve(a, b);
        const double t_conv = since(t0);
        t0 = Clock::now();
        const DifferenceTable dt = delta_by_inversion(law("power15.law"), kInvNMax, kInvM, kInvTol);
        const RenewalTable u = u_from_delta(dt, 0, kInvNMax);
        const double t_inv = since(t0);
        r.pass = t_conv < kC12ConvSeconds && t_inv < kC12InvSeconds && !c.empty() && u.u.size() > 0;
        r.measured = "convolution " + g(t_conv, 3) + " s, inversion " + g(t_inv, 3) + " s";
        return r;
    }

    CriterionResult c13() {
        CriterionResult r{13, "determinism across thread counts", false, "", "", "", 0};
        r.threshold = "probe CSVs byte-identical with 1 and 4 threads (full check: two verify runs)";
        const std::string a = determinism_probe(cfg_.spec_dir, cfg_.seed, 1);
        const std::string b = determinism_probe(cfg_.spec_dir, cfg_.seed, 4);
        r.pass = a == b;
        r.measured = "probe sha256 " + sha256_hex(a).substr(0, 16) + (r.pass ? " == " : " != ") +
                     sha256_hex(b).substr(0, 16);
        return r;
    }

    void finish(const SuiteReport& rep) {
        for (const auto& [name, t] : files_) write_csv(cfg_.out_dir, name, t, manifest_);
        write_text(cfg_.out_dir, "manifest.json", manifest_.dump());
        nlohmann::json j;
        j["version"] = kVersion;
        j["manifest_sha256"] = manifest_.hash();
        j["all_pass"] = rep.all_pass();
        std::ostringstream txt;
        for (const auto& c : rep.results) {
            j["criteria"].push_back({{"id", c.id},
                                     {"title", c.title},
                                     {"pass", c.pass},
                                     {"measured", c.measured},
                                     {"threshold", c.threshold},
                                     {"note", c.note},
                                     {"seconds", c.seconds}});
            txt << c.id << "\t" << (c.pass ? "PASS" : "FAIL") << "\t" << c.title << "\t" << c.measured << "\t"
                << c.note << "\n";
        }
        write_text(cfg_.out_dir, "summary.json", j.dump(2) + "\n");
        write_text(cfg_.out_dir, "summary.txt", txt.str());
    }

    SuiteConfig cfg_;
    std::ostream& log_;
    Manifest manifest_;
    std::map<std::string, ParsedSpec> specs_;
    std::map<std::string, std::unique_ptr<DifferenceTable>> inv_;
    std::map<std::string, std::unique_ptr<RenewalTable>> inv_u_;
    std::map<std::string, std::unique_ptr<RenewalTable>> doubling_;
    std::vector<std::pair<std::string, CsvTable>> files_;
};

}  // namespace

bool SuiteReport::all_pass() const {
    for (const auto& r : results)
        if (!r.pass) return false;
    return !results.empty();
}

SuiteReport run_suite(const SuiteConfig& cfg, std::ostream& log) { return Suite(cfg, log).run(); }

std::string determinism_probe(const std::string& spec_dir, std::uint64_t seed, int threads) {
    const int saved = omp_get_max_threads();
    omp_set_num_threads(threads);
    std::string out;
    try {
        const ParsedSpec s = parse_spec_file((std::filesystem::path(spec_dir) / "power15.law").string());
        const StepLaw& L = *s.law;
        out += u_csv(u_by_doubling(L, 0, 2000, 1e-8), 0, 2000).render("");
        const DifferenceTable dt = delta_by_inversion(L, 2000, std::size_t{1} << 16, 1e-10);
        out += u_csv(u_from_delta(dt, 0, 2000), 0, 2000).render("");
        out += mc_csv(estimate_u(L, geometric_grid(10, 1000, 10), 20000, seed)).render("");
        std::vector<double> a(std::size_t{1} << 15), b(a.size());
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> U(-1.0, 1.0);
        for (auto& x : a) x = U(rng);
        for (auto& x : b) x = U(rng);
        for (double v : fft_convolve(a, b)) out += fmt(v) + "\n";
    } catch (...) {
        omp_set_num_threads(saved);
        throw;
    }
    omp_set_num_threads(saved);
    return out;
}

}  // namespace rrl
