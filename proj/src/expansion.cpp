#include "rrl/expansion.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rrl/special.hpp"

namespace rrl {

namespace {

constexpr long kAnchorBlock = 4096;

// max_{n < lo} |value(n)| |n|^4 for a geometric left part value(n) = amp q^{ls - n}
double geometric_envelope(double amp, double q, long ls, long lo) {
    const double lam = -std::log(q);
    const long peak = -static_cast<long>(std::ceil(4.0 / lam)) - 1;
    double best = 0.0;
    for (long n = std::min(lo - 1, peak); n <= lo - 1; ++n) {
        const double v = n <= ls ? amp * std::pow(q, static_cast<double>(ls - n)) : amp;
        best = std::max(best, v * std::pow(static_cast<double>(-n), 4.0));
    }
    return best * (1.0 + 1e-12);
}

// |Fbar(n)| <= C n^{-alpha} and sum_{r > n} Fbar(r) <= C' n^{-beta} for n > hi
std::pair<double, double> right_envelopes(const StepLaw& law, long hi) {
    const double a = law.alpha();
    const double b = a - 1.0;
    if (law.tail_kind() == TailKind::PowerPmf) return {law.pmf_coef() / a, law.pmf_coef() / (a * b)};
    double cf = 0.0, ci = 0.0;
    for (const auto& cell : law.cells()) {
        const double x = 1.0 + cell.theta / static_cast<double>(hi + 1);
        cf += cell.coef * std::max(1.0, std::pow(x, -a));
        ci += cell.coef * std::max(1.0, std::pow(x, -b)) / b;
    }
    return {cf * (1.0 + 1e-12), ci * (1.0 + 1e-12)};
}

}  // namespace

double phi_exact(const StepLaw& law, long n) {
    return n >= 0 ? law.fbar(n) / law.mu() : -law.fcdf(n) / law.mu();
}

double phi_plus(const StepLaw& law, long n) {
    if (n < 0) return 0.0;
    return law.fbar(n) / law.moments().mu_plus;
}

double phibar1_exact(const StepLaw& law, long n) {
    return n >= 0 ? law.integrated_right(n) / law.mu() : law.integrated_left(n) / law.mu();
}

long phi_left_edge(const StepLaw& law) {
    if (!law.has_geometric()) return std::min(0L, law.left_extent());
    const double q = law.geom_q();
    const double amp = law.geom_amp();
    const double g = std::log(1e-40 * (1.0 - q) * (1.0 - q) / amp) / std::log(q);
    return law.core_lo() - 1 - static_cast<long>(std::ceil(std::max(g, 0.0)));
}

void phi_block(const StepLaw& law, long lo, long hi, std::vector<double>& phi, std::vector<double>& phibar1) {
    if (hi < lo) throw std::invalid_argument("phi_block: empty window");
    const double mu = law.mu();
    phi.assign(static_cast<std::size_t>(hi - lo + 1), 0.0);
    phibar1.assign(phi.size(), 0.0);
    auto at = [&](std::vector<double>& v, long n) -> double& { return v[static_cast<std::size_t>(n - lo)]; };

    // negative side: running sums of F(r) from the far left
    if (lo < 0) {
        const long top = std::min(hi, -1L);
        CompensatedSum acc;
        acc.add(law.integrated_left(lo - 1));
        for (long n = lo; n <= top; ++n) {
            const double F = law.fcdf(n);
            acc.add(F);
            at(phi, n) = -F / mu;
            at(phibar1, n) = acc.value() / mu;
        }
    }
    if (hi < 0) return;
    const long start = std::max(lo, 0L);
    const long t0 = law.tail_start();
    const long nblocks = (hi - start) / kAnchorBlock + 1;
#pragma omp parallel for schedule(dynamic, 1)
    for (long b = 0; b < nblocks; ++b) {
        const long top = hi - b * kAnchorBlock;
        const long bottom = std::max(start, top - kAnchorBlock + 1);
        // anchors
        double fb = law.fbar(top);
        CompensatedSum fbar_acc, ib_acc;
        fbar_acc.add(fb);
        ib_acc.add(law.integrated_right(top));
        at(phi, top) = fb / mu;
        at(phibar1, top) = ib_acc.value() / mu;
        for (long n = top; n > bottom; --n) {
            // step from n to n - 1
            ib_acc.add(fbar_acc.value());
            if (n - 1 >= t0 - 1) {
                fbar_acc.add(law.pmf(n));
                fb = fbar_acc.value();
            } else {
                fb = law.fbar(n - 1);
                fbar_acc = CompensatedSum();
                fbar_acc.add(fb);
            }
            at(phi, n - 1) = fb / mu;
            at(phibar1, n - 1) = ib_acc.value() / mu;
        }
    }
}

PhiSeq phi_seq(const StepLaw& law, long lo, long hi) {
    if (law.tail_kind() == TailKind::None && hi < law.core_hi())
        throw std::invalid_argument("phi_seq: window must cover the support of a finite law");
    if (!law.has_geometric() && lo > phi_left_edge(law))
        throw std::invalid_argument("phi_seq: window must cover the left support");
    PhiSeq out;
    out.mu = law.mu();
    out.mu_plus = law.moments().mu_plus;
    out.mu_minus = law.moments().mu_minus;
    std::vector<double> phi, pb;
    phi_block(law, lo, hi, phi, pb);
    double sup = 0.0;
    for (double v : phi) sup = std::max(sup, std::abs(v));
    out.seq = WindowSeq::from_values(lo, std::move(phi), 1e-15 * sup);
    if (law.tail_kind() != TailKind::None)
        out.seq.right_tail_model = TailModel{law.alpha(), right_envelopes(law, hi).first / out.mu, false};
    if (law.has_geometric())
        out.seq.left_tail_model = TailModel{
            4.0, geometric_envelope(law.geom_amp() / ((1.0 - law.geom_q()) * out.mu), law.geom_q(), law.core_lo() - 1, lo),
            false};
    return out;
}

AsymptoticConstants constants(double alpha) {
    AsymptoticConstants c;
    c.beta = alpha - 1.0;
    c.r_star = r_star(alpha);
    for (int k = 1; k <= c.r_star; ++k) c.c.push_back(c_const(k, c.beta));
    return c;
}

ExpansionTable phibar(const StepLaw& law, int k_max, long n_max, bool allow_beyond_rstar) {
    if (k_max < 1) throw std::invalid_argument("phibar: k_max must be >= 1");
    if (n_max < 1) throw std::invalid_argument("phibar: n_max must be >= 1");
    if (!allow_beyond_rstar && law.alpha() < 2.0 && k_max > r_star(law.alpha()))
        throw std::invalid_argument("phibar: k_max exceeds r* (set the override to compute anyway)");
    ExpansionTable t;
    t.k_max = k_max;
    t.mu = law.mu();
    t.n_max = n_max;
    const long L = phi_left_edge(law);
    const long w = -L;
    const long lo = law.has_geometric() ? (k_max + 1) * L : k_max * L;
    const long H1 = n_max + (k_max - 1) * w;
    t.phi = phi_seq(law, L, H1 - lo);
    const auto& phi = t.phi.seq;

    std::vector<double> phi_v, pb;
    phi_block(law, lo, H1, phi_v, pb);
    double sup = 0.0;
    for (double v : pb) sup = std::max(sup, std::abs(v));
    WindowSeq p1 = WindowSeq::from_values(lo, std::move(pb), 2e-15 * sup);
    if (law.tail_kind() != TailKind::None)
        p1.right_tail_model = TailModel{law.alpha() - 1.0, right_envelopes(law, H1).second / t.mu, false};
    if (law.has_geometric()) {
        const double q = law.geom_q();
        p1.left_tail_model =
            TailModel{4.0, geometric_envelope(law.geom_amp() / ((1.0 - q) * (1.0 - q) * t.mu), q, law.core_lo() - 1, lo), false};
    }
    t.phibar.push_back(std::move(p1));

    // sup |Phibar_{k+1}| <= sup |Phibar_k| (1 + ||phi||_1)
    double phi_l1 = phi.norm1_with_tails();
    double sup_k = sup;
    for (int k = 1; k < k_max; ++k) {
        const WindowSeq& prev = t.phibar.back();
        const long out_hi = n_max + (k_max - k - 1) * w;
        WindowSeq conv = convolve(prev, phi, lo, out_hi);
        WindowSeq next = conv;
        for (long n = lo; n <= out_hi; ++n) next.ref(n) = prev.at(n) - conv.at(n);
        next.err_budget = prev.err_budget + conv.err_budget;
        sup_k *= 1.0 + phi_l1;
        next.right_tail_model = TailModel{0.0, sup_k, false};
        next.left_tail_model.reset();
        t.phibar.push_back(std::move(next));
    }
    return t;
}

std::vector<double> mu2(const StepLaw& law, const std::vector<long>& grid) {
    if (grid.empty()) return {};
    if (!std::is_sorted(grid.begin(), grid.end()) || grid.front() < 1)
        throw std::invalid_argument("mu2: grid must be ascending and start at n >= 1");
    std::vector<double> phi, pb;
    phi_block(law, 1, grid.back(), phi, pb);
    std::vector<double> out;
    CompensatedSum acc;
    std::size_t g = 0;
    for (long r = 1; r <= grid.back(); ++r) {
        acc.add(static_cast<double>(r) * phi[static_cast<std::size_t>(r - 1)]);
        while (g < grid.size() && grid[g] == r) {
            out.push_back(acc.value());
            ++g;
        }
    }
    return out;
}

std::vector<DiagRow> diagnostics(const StepLaw& law, const ExpansionTable& table, const WindowSeq* u,
                                 const std::vector<long>& grid) {
    const auto cst = constants(law.alpha());
    const double mu = table.mu;
    const int K = table.k_max;
    const int rs = std::min(cst.r_star, K);
    const bool boundary = law.alpha() >= 2.0 && law.tail_kind() != TailKind::None;
    std::vector<long> pos_grid;
    for (long n : grid)
        if (n >= 1) pos_grid.push_back(n);
    std::vector<double> m2;
    if (boundary) m2 = mu2(law, pos_grid);

    std::vector<DiagRow> rows;
    std::size_t gi = 0;
    for (long n : grid) {
        if (n > table.n_max) throw std::invalid_argument("diagnostics: grid point beyond the expansion window");
        DiagRow r;
        r.n = n;
        const double ind = n >= 0 ? 1.0 : 0.0;
        r.partial_sum = ind;
        for (int k = 1; k <= K; ++k) {
            r.phibar.push_back(table.at(k, n));
            r.partial_sum += table.at(k, n);
        }
        const double p1 = r.phibar[0];
        for (int k = 2; k <= K; ++k) r.ratio.push_back(r.phibar[static_cast<std::size_t>(k - 1)] / std::pow(p1, k));
        if (u) {
            r.u = u->at(n);
            r.u_err = u->err_budget;
            r.d = r.u - 1.0 / mu;
            r.first_order = mu * r.d / p1;
            double e = mu * r.u - ind;
            double e_err = mu * u->err_budget;
            for (int k = 1; k <= rs; ++k) {
                e -= table.at(k, n);
                e_err += table.err(k);
            }
            r.e_star = e;
            r.e_star_err = e_err;
            r.e_star_norm = e / std::pow(p1, rs);
        }
        if (boundary && n >= 1) {
            r.mu2 = m2[gi];
            if (u) {
                const double num = r.u - 1.0 / mu - p1 / mu;
                r.third = num / (-phi_exact(law, n) * m2[gi] / mu);
            }
        }
        if (n >= 1) ++gi;
        rows.push_back(std::move(r));
    }
    return rows;
}

}  // namespace rrl
