#include "rrl/renewal.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "rrl/charfn.hpp"
#include "rrl/fft.hpp"
#include "rrl/special.hpp"

namespace rrl {

namespace {

constexpr double kEps = 1.1102230246251565e-16;

double total(const BudgetLedger& l) {
    double s = 0.0;
    for (const auto& e : l) s += e.second;
    return s;
}

// max_{m in [from, a.hi]} |a_m| m^e
double stored_right_constant(const WindowSeq& a, long from, double e) {
    double c = 0.0;
    for (long m = std::max(from, std::max(a.lo, 1L)); m <= a.hi; ++m)
        c = std::max(c, std::abs(a.at(m)) * std::pow(static_cast<double>(m), e));
    return c;
}

double stored_left_constant(const WindowSeq& a, long to, double e) {
    double c = 0.0;
    for (long m = a.lo; m <= std::min(to, std::min(a.hi, -1L)); ++m)
        c = std::max(c, std::abs(a.at(m)) * std::pow(static_cast<double>(-m), e));
    return c;
}

// |u_{m}| summed over m <= -d is at most return_bound(d); |Delta_n| <= u_{n-1} + u_n.
// Power envelope C |n|^{-4} valid for n <= -(from):
double chernoff_left_constant(const StepLaw& law, long from) {
    double best = 0.0;
    for (int i = 0; i <= 160; ++i) {
        const double x = static_cast<double>(from) * std::pow(2.0, i / 8.0);
        best = std::max(best, 2.0 * law.return_bound(x - 1.0) * std::pow(x, 4.0));
    }
    return 1.5 * best;
}

// (a * a) tail envelopes from the envelopes of a, valid beyond [lo, hi]
void convolution_envelopes(const WindowSeq& a, WindowSeq& c) {
    const double l1 = a.norm1_with_tails();
    if (a.right_tail_model) {
        const double e = a.right_tail_model->exponent;
        const double ca = std::max(a.right_tail_model->constant, stored_right_constant(a, (c.hi + 1) / 2, e));
        c.right_tail_model = TailModel{e, 2.0 * l1 * ca * std::pow(2.0, e) + c.err_budget, false};
    }
    if (a.left_tail_model) {
        const double e = a.left_tail_model->exponent;
        const double ca = std::max(a.left_tail_model->constant, stored_left_constant(a, (c.lo - 1) / 2, e));
        c.left_tail_model = TailModel{e, 2.0 * l1 * ca * std::pow(2.0, e) + c.err_budget, false};
    }
}

}  // namespace

const char* method_name(Method m) {
    switch (m) {
        case Method::Doubling:
            return "doubling";
        case Method::Inversion:
            return "inversion";
        case Method::MonteCarlo:
            return "mc";
    }
    return "?";
}

RenewalTable u_by_doubling(const StepLaw& law, long lo, long hi, double tol) {
    if (hi < lo) throw std::invalid_argument("u_by_doubling: empty window");
    if (!(tol > 0.0 && tol < 1.0)) throw std::invalid_argument("u_by_doubling: tol must lie in (0,1)");
    const double mu = law.mu();
    const double u_max = law.u_max_bound();
    if (!std::isfinite(u_max)) throw std::runtime_error("u_by_doubling: no Chernoff certificate for this law");

    long K = 1;
    while (law.chernoff(hi, K).tail_sum >= tol / 4.0) {
        K *= 2;
        if (K > (1L << 40)) throw std::runtime_error("u_by_doubling: Chernoff tail does not reach the tolerance");
    }
    long buf = std::max({2 * std::abs(lo), static_cast<long>(10.0 * std::ceil(1.0 / mu) * std::log(1.0 / tol)), 1000L});
    auto window_err = [&](long b) {
        return u_max * (static_cast<double>(K) * law.return_bound(static_cast<double>(b)) + law.return_bound(static_cast<double>(b)));
    };
    while (window_err(buf) >= tol / 4.0) {
        buf *= 2;
        if (buf > (1L << 26)) throw std::runtime_error("u_by_doubling: window buffer exceeds the memory cap");
    }
    const long wlo = std::min(lo, 0L) - buf;
    const long whi = std::max(hi, 0L) + buf;

    // P = p^{*K} and G = G_K on the window, convolved with long double
    // transforms. Budgets: l1 error for P, sup error for G.
    const std::size_t width = static_cast<std::size_t>(whi - wlo + 1);
    std::vector<double> P(width), G(width, 0.0);
    for (long n = wlo; n <= whi; ++n) P[static_cast<std::size_t>(n - wlo)] = law.pmf(n);
    G[static_cast<std::size_t>(-wlo)] = 1.0;
    double p_l1_err = 2.0 * kEps * norm1(P);
    double g_err = 0.0;
    const std::size_t nfft = next_pow2(2 * width - 1);
    // full product index i + j maps to n = 2 wlo + i + j; keep n in [wlo, whi]
    auto clip = [&](const std::vector<double>& full) {
        return std::vector<double>(full.begin() + static_cast<std::ptrdiff_t>(-wlo),
                                   full.begin() + static_cast<std::ptrdiff_t>(-wlo + static_cast<long>(width)));
    };

    long steps = 1;
    while (steps < K) {
        const double p_l1 = norm1(P);
        double g_sup = 0.0;
        for (double v : G) g_sup = std::max(g_sup, std::abs(v));
        const double fe = fft_convolve_extended_error_bound(norm2(P), norm2(G), nfft);
        std::vector<double> PG = clip(fft_convolve_extended(P, G));
        double out_sup = 0.0;
        for (std::size_t i = 0; i < width; ++i) {
            out_sup = std::max(out_sup, std::abs(PG[i]));
            PG[i] += G[i];
        }
        g_err = g_err + (p_l1 + p_l1_err) * g_err + p_l1_err * g_sup + fe + kEps * out_sup + kEps * (g_sup + out_sup);
        G = std::move(PG);
        steps *= 2;
        if (steps < K) {
            const double p2 = norm2(P);
            // l1 over the window from the l2 bound: at most sqrt(width) times larger
            const double fp = std::sqrt(static_cast<double>(width)) *
                              fft_convolve_extended_l2_error_bound(p_l1, p2, p_l1, p2, nfft);
            std::vector<double> PP = clip(fft_convolve_extended(P, P));
            p_l1_err = 2.0 * p_l1 * p_l1_err + p_l1_err * p_l1_err + fp + kEps * norm1(PP);
            P = std::move(PP);
        }
    }

    RenewalTable out;
    out.method = Method::Doubling;
    out.mu = mu;
    out.steps = steps;
    std::vector<double> u(static_cast<std::size_t>(hi - lo + 1));
    for (long n = lo; n <= hi; ++n) u[static_cast<std::size_t>(n - lo)] = G[static_cast<std::size_t>(n - wlo)];
    out.ledger.emplace_back("convolution", g_err);
    out.ledger.emplace_back("chernoff_tail", law.chernoff(hi, steps).tail_sum);
    out.ledger.emplace_back("window_exit", window_err(buf));
    out.u = WindowSeq::from_values(lo, std::move(u), total(out.ledger));
    if (out.u.err_budget > tol) {
        std::string msg = "u_by_doubling: error budget exceeds tol:";
        char buf[96];
        for (const auto& e : out.ledger) {
            std::snprintf(buf, sizeof buf, " %s=%.3g", e.first.c_str(), e.second);
            msg += buf;
        }
        throw std::runtime_error(msg);
    }
    return out;
}

DifferenceTable delta_by_inversion(const StepLaw& law, long n_max, std::size_t M, double tol) {
    if (n_max < 1) throw std::invalid_argument("delta_by_inversion: n_max must be >= 1");
    if (M < 32 * static_cast<std::size_t>(n_max)) throw std::invalid_argument("delta_by_inversion: need M >= 32 n_max");
    const double mu = law.mu();
    const bool power = law.tail_kind() != TailKind::None;
    const int K = power && law.alpha() < 2.0 ? r_star(law.alpha()) : 1;
    const double beta = law.alpha() - 1.0;
    const double gamma = power && law.alpha() < 2.0 ? (K + 1) * beta + 1.0 : 3.0;

    long B = 1000;
    while (2.0 * law.return_bound(static_cast<double>(B)) >= 1e-3 * tol) {
        B *= 2;
        if (static_cast<std::size_t>(B) > M / 8) throw std::runtime_error("delta_by_inversion: left depth exceeds M/8");
    }
    B = std::max(B, -phi_left_edge(law) * (K + 1));

    DifferenceTable dt;
    dt.mu = mu;
    dt.M = M;
    dt.split_order = K;
    dt.tail_exponent = gamma;
    dt.expansion = phibar(law, K, n_max + 1, false);

    CharFnGrid grid = build_grid(law, M, tol);
    const double ep = grid.trunc_bound;
    auto& h = grid.phat;  // overwritten with R^
    const double len = static_cast<double>(n_max + B + 1);
    // per-block partial sums in a fixed order keep the budgets thread-count independent
    constexpr std::size_t kBlock = 4096;
    const std::size_t nb = (M + kBlock - 1) / kBlock;
    std::vector<double> b1(nb, 0.0), b2(nb, 0.0);
    bool floor_hit = false;
#pragma omp parallel for schedule(static) reduction(|| : floor_hit) if (M >= (1u << 14))
    for (std::size_t b = 0; b < nb; ++b) {
        for (std::size_t j = std::max<std::size_t>(b * kBlock, 1); j < std::min(M, (b + 1) * kBlock); ++j) {
            const double t = grid.t(j);
            const cplx ome = one_minus_expi(t);
            const cplx ph = (1.0 - h[j]) / (mu * ome);
            const cplx x = 1.0 - ph;
            cplx xk = 1.0;
            for (int k = 0; k < K; ++k) xk *= x;  // x^K
            const cplx rh = -(xk * x) / (mu * ph);
            const double aph = std::abs(ph), ax = std::abs(x), axk = std::abs(xk);
            const double dph = ep / (mu * std::abs(ome));
            if (dph > 0.5 * aph) floor_hit = true;
            const double dr = 2.0 * ((K + 1) * axk / aph + axk * ax / (aph * aph)) * dph / mu + (K + 4) * kEps * std::abs(rh);
            b1[b] += dr;
            b2[b] += dr * std::min(len, 1.0 / std::abs(std::sin(0.5 * t)));
            h[j] = rh;
        }
    }
    double s1 = 0.0, s2 = 0.0;
    for (std::size_t b = 0; b < nb; ++b) {
        s1 += b1[b];
        s2 += b2[b];
    }
    if (floor_hit) throw std::runtime_error("delta_by_inversion: |1 - p^| below the cancellation floor");
    h[0] = 0.0;
    double n2 = 0.0;
    for (const auto& v : h) n2 += std::norm(v);
    n2 = std::sqrt(n2);
    fft_inplace(h, -1);
    const double inv_m = 1.0 / static_cast<double>(M);
    auto rr = [&](long n) {
        long m = static_cast<long>(M);
        long r = ((n % m) + m) % m;
        return h[static_cast<std::size_t>(r)].real() * inv_m;
    };

    // empirical envelope on the edge band [M/4, M/2)
    double E = 0.0;
    for (long m = static_cast<long>(M / 4); m < static_cast<long>(M / 2); ++m)
        E = std::max(E, std::abs(rr(m)) * std::pow(static_cast<double>(m), gamma));
    E *= 2.0;
    dt.tail_constant = E;
    const double alias = E * std::pow(static_cast<double>(M) - static_cast<double>(n_max), -gamma) * (1.0 + 1.0 / (gamma - 1.0));
    dt.alias_bound = alias;
    const double rounding = fft_error_bound(n2, M) * inv_m;
    dt.left_trunc = 2.0 * law.return_bound(static_cast<double>(B)) + chernoff_left_constant(law, B + 1) / (3.0 * std::pow(B + 1.0, 3.0));

    const long lo = -B;
    std::vector<double> rv(static_cast<std::size_t>(n_max + B + 1));
    for (long n = lo; n <= n_max; ++n) rv[static_cast<std::size_t>(n - lo)] = rr(n);
    const double per_entry = s1 * inv_m + alias + rounding + dt.left_trunc;
    dt.remainder = WindowSeq::from_values(lo, std::move(rv), per_entry);
    dt.cum_err = s2 * inv_m + len * (alias + rounding) + dt.left_trunc;
    dt.remainder.right_tail_model = TailModel{gamma, std::max(E, stored_right_constant(dt.remainder, n_max / 2, gamma)), false};

    const auto& ex = dt.expansion;
    double pb_err = 0.0;
    for (int k = 1; k <= K; ++k) pb_err += 2.0 * ex.err(k);
    std::vector<double> dv(static_cast<std::size_t>(n_max + B + 1));
    for (long n = lo; n <= n_max; ++n) {
        double s = n == 0 ? 1.0 : 0.0;
        for (int k = 1; k <= K; ++k) s += ex.at(k, n) - ex.at(k, n - 1);
        dv[static_cast<std::size_t>(n - lo)] = -s / mu + dt.remainder.at(n);
    }
    dt.delta = WindowSeq::from_values(lo, std::move(dv), per_entry + pb_err / mu);

    // envelopes beyond the window
    const long band = std::max(n_max / 2, 1L);
    if (power) {
        const double a = law.alpha();
        const double gp = K >= 2 ? std::min(2.0 * beta + 1.0, gamma) : gamma;
        double c = 0.0;
        for (long n = band; n <= n_max; ++n)
            c = std::max(c, std::abs(dt.delta.at(n) - phi_exact(law, n) / mu) * std::pow(static_cast<double>(n), gp));
        const double cf = law.tail_kind() == TailKind::PowerPmf ? law.pmf_coef() / a : law.tail_fbar_real(static_cast<double>(n_max)) * std::pow(static_cast<double>(n_max), a) * 1.01;
        dt.delta.right_tail_model = TailModel{a, cf / (mu * mu) + 2.0 * c * std::pow(static_cast<double>(n_max), a - gp), false};
    } else {
        dt.delta.right_tail_model = TailModel{2.0, 2.0 * stored_right_constant(dt.delta, band, 2.0) + 1e-300, false};
    }
    dt.delta.left_tail_model = TailModel{4.0, chernoff_left_constant(law, B + 1), false};

    dt.ledger.emplace_back("input_propagation", s1 * inv_m);
    dt.ledger.emplace_back("alias", alias);
    dt.ledger.emplace_back("transform_rounding", rounding);
    dt.ledger.emplace_back("left_truncation", dt.left_trunc);
    dt.ledger.emplace_back("expansion_windows", pb_err / mu);
    if (dt.delta.err_budget > tol)
        throw std::runtime_error("delta_by_inversion: error budget " + std::to_string(dt.delta.err_budget) + " exceeds tol");
    return dt;
}

RenewalTable u_from_delta(const DifferenceTable& dt, long lo, long hi) {
    const auto& R = dt.remainder;
    if (lo < R.lo || hi > R.hi || hi < lo) throw std::invalid_argument("u_from_delta: window outside the difference table");
    const double mu = dt.mu;
    const auto& ex = dt.expansion;
    RenewalTable out;
    out.method = Method::Inversion;
    out.mu = mu;
    std::vector<double> u(static_cast<std::size_t>(hi - lo + 1));
    CompensatedSum cum;
    for (long m = R.lo; m <= hi; ++m) {
        cum.add(R.at(m));
        if (m < lo) continue;
        double s = m >= 0 ? 1.0 : 0.0;
        for (int k = 1; k <= dt.split_order; ++k) s += ex.at(k, m);
        u[static_cast<std::size_t>(m - lo)] = s / mu - cum.value();
    }
    double pb_err = 0.0;
    for (int k = 1; k <= dt.split_order; ++k) pb_err += ex.err(k);
    out.ledger.emplace_back("remainder_cumulative", dt.cum_err);
    out.ledger.emplace_back("expansion_windows", pb_err / mu);
    out.ledger.emplace_back("summation_rounding", 4.0 * kEps * static_cast<double>(hi - R.lo + 1) * R.stored_norm1() /
                                                      static_cast<double>(R.size()));
    out.u = WindowSeq::from_values(lo, std::move(u), total(out.ledger));
    return out;
}

WindowSeq delta2(const DifferenceTable& dt, long lo, long hi) {
    WindowSeq c = convolve(dt.delta, dt.delta, lo, hi);
    convolution_envelopes(dt.delta, c);
    return c;
}

IdentityResult identity_06_residual(const DifferenceTable& dt, const StepLaw& law, long lo, long hi) {
    if (hi < lo) throw std::invalid_argument("identity_06_residual: empty window");
    const auto& D = dt.delta;
    const double mu = dt.mu;
    // Delta2 on a window whose left part covers every pairing with the stored m phi_m
    const long d2_lo = 2 * D.lo;
    const long d2_hi = std::min(D.hi, hi - phi_left_edge(law) + 1);
    WindowSeq d2 = delta2(dt, d2_lo, d2_hi);

    const long L = phi_left_edge(law);
    const long H = hi - d2_lo + 1;
    std::vector<double> phi, pb;
    phi_block(law, L, H, phi, pb);
    double sup = 0.0;
    for (long m = L; m <= H; ++m) {
        phi[static_cast<std::size_t>(m - L)] *= static_cast<double>(m);
        sup = std::max(sup, std::abs(phi[static_cast<std::size_t>(m - L)]));
    }
    WindowSeq mphi = WindowSeq::from_values(L, std::move(phi), 2e-15 * sup);
    if (law.tail_kind() != TailKind::None) {
        const double a = law.alpha();
        const double cf = law.tail_kind() == TailKind::PowerPmf
                              ? law.pmf_coef() / a
                              : law.tail_fbar_real(static_cast<double>(H)) * std::pow(static_cast<double>(H), a) * 1.01;
        mphi.right_tail_model = TailModel{a - 1.0, cf / mu, false};
    }
    if (law.has_geometric()) {
        double c = 0.0;
        for (long m = L - 64; m < L; ++m) c = std::max(c, std::abs(static_cast<double>(m) * phi_exact(law, m)) * std::pow(-static_cast<double>(m), 3.0));
        mphi.left_tail_model = TailModel{3.0, 2.0 * c, false};
    }
    WindowSeq rhs = convolve(mphi, d2, lo, hi);

    IdentityResult res;
    double worst = -1.0;
    for (long n = lo; n <= hi; ++n) {
        const double left = static_cast<double>(n) * D.at(n);
        const double r = std::abs(left - mu * rhs.at(n));
        if (r > worst) {
            worst = r;
            res.worst_n = n;
        }
    }
    res.residual = worst;
    res.budget = static_cast<double>(std::max(std::abs(lo), std::abs(hi))) * D.err_budget + mu * rhs.err_budget;
    return res;
}

MassIdentities mass_identities(const DifferenceTable& dt, const StepLaw& law) {
    MassIdentities m;
    const double mu = dt.mu;
    m.target_delta = -1.0 / mu;
    m.target_delta2 = 1.0 / (mu * mu);
    const auto& D = dt.delta;
    const auto& ex = dt.expansion;
    const long N = D.hi;

    // sum_{m > N} Delta_m = (1/mu) sum_k Phibar_{k,N} + sum_{m > N} R_m
    CompensatedSum s;
    for (long n = D.lo; n <= N; ++n) s.add(D.at(n));
    double pb_err = 0.0;
    for (int k = 1; k <= dt.split_order; ++k) {
        s.add(ex.at(k, N) / mu);
        pb_err += ex.err(k) / mu;
    }
    const auto& rt = *dt.remainder.right_tail_model;
    const double r_tail = rt.constant * hurwitz_zeta(rt.exponent, static_cast<double>(N + 1)).value;
    m.sum_delta = s.value();
    m.sum_delta_bound = dt.cum_err + pb_err + r_tail + dt.left_trunc + 1e-15 * static_cast<double>(D.size());

    // sum_n Delta2_n = sum_{n <= N2} Delta2_n + sum_m Delta_m T_{N2 - m}, T_k = sum_{j > k} Delta_j = u_k - 1/mu.
    // For m >= N the argument N2 - m lies below the window, where T = -1/mu + u and u is Chernoff-small.
    const long B = -D.lo;
    const long N2 = N - B - 1;
    if (N2 <= 0) throw std::invalid_argument("mass_identities: window too short for the Delta2 tail");
    WindowSeq d2 = delta2(dt, 2 * D.lo, N2);
    RenewalTable u = u_from_delta(dt, D.lo, N);
    CompensatedSum s2;
    for (long n = d2.lo; n <= N2; ++n) s2.add(d2.at(n));
    for (long mm = D.lo; mm < N; ++mm) s2.add(D.at(mm) * (u.u.at(N2 - mm) - 1.0 / mu));
    // -(1/mu) sum_{m >= N} Delta_m
    s2.add(-D.at(N) / mu);
    for (int k = 1; k <= dt.split_order; ++k) s2.add(-ex.at(k, N) / (mu * mu));
    m.sum_delta2 = s2.value();

    auto left_sum = [](const WindowSeq& w) {
        return w.left_tail_model ? w.left_tail_model->constant * hurwitz_zeta(w.left_tail_model->exponent, static_cast<double>(1 - w.lo)).value
                                 : 0.0;
    };
    const double t_sup = law.u_max_bound() + 1.0 / mu;
    const auto& dm = *D.right_tail_model;
    const double d_sup_tail = std::max(std::abs(D.at(N)), dm.constant * std::pow(static_cast<double>(N), -dm.exponent));
    m.sum_delta2_bound = d2.err_budget * static_cast<double>(d2.size()) + left_sum(d2) +
                         D.stored_norm1() * u.u.err_budget + D.err_budget * static_cast<double>(D.size()) * t_sup +
                         left_sum(D) * t_sup + (r_tail + pb_err) / mu +
                         d_sup_tail * law.return_bound(static_cast<double>(B + 1)) + 1e-15 * static_cast<double>(D.size());
    return m;
}

std::vector<PropRow> prop_diagnostics(const DifferenceTable& dt, const StepLaw& law, const std::vector<long>& grid) {
    std::vector<PropRow> rows;
    const double mu = dt.mu;
    for (long n : grid) {
        if (n < dt.delta.lo || n > dt.delta.hi) continue;
        PropRow r;
        r.n = n;
        r.delta = dt.delta.at(n);
        r.n_delta = static_cast<double>(n) * r.delta;
        const double ph = phi_exact(law, n);
        if (ph != 0.0) r.ratio_phi = mu * r.delta / ph;
        const double pp = phi_plus(law, n);
        if (pp > 0.0) r.ratio_phi_plus = mu * r.delta / pp;
        rows.push_back(r);
    }
    return rows;
}

}  // namespace rrl
