#include "rrl/charfn.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "rrl/expansion.hpp"
#include "rrl/special.hpp"

namespace rrl {

namespace {

constexpr double kPi = std::numbers::pi;

// zeta(sigma, 1 + y) for y in [0, 2] by Taylor expansion around a node grid.
class ShiftedZeta {
public:
    explicit ShiftedZeta(double sigma) : sigma_(sigma), coef_((kNodes + 1) * kTerms) {
        for (int g = 0; g <= kNodes; ++g) {
            const double a = 1.0 + 2.0 * g / kNodes;
            double rising_over_fact = 1.0;  // (sigma)_k / k!
            for (int k = 0; k < kTerms; ++k) {
                const auto z = hurwitz_zeta(sigma_ + k, a);
                coef_[static_cast<std::size_t>(g * kTerms + k)] = ((k % 2) ? -1.0 : 1.0) * rising_over_fact * z.value;
                rising_over_fact *= (sigma_ + k) / (k + 1.0);
            }
            bound_ = std::max(bound_, 1e-15 * std::abs(coef_[static_cast<std::size_t>(g * kTerms)]));
        }
        // Taylor remainder with |d| <= 1/kNodes
        double rof = 1.0;
        for (int k = 0; k < kTerms; ++k) rof *= (sigma_ + k) / (k + 1.0);
        bound_ += rof * hurwitz_zeta(sigma_ + kTerms, 1.0).value * std::pow(1.0 / kNodes, kTerms);
    }
    double operator()(double y) const {
        const double pos = y * kNodes / 2.0;
        int g = static_cast<int>(std::lround(pos));
        g = std::clamp(g, 0, kNodes);
        const double d = y - 2.0 * g / kNodes;
        const double* c = &coef_[static_cast<std::size_t>(g * kTerms)];
        double acc = c[kTerms - 1];
        for (int k = kTerms - 2; k >= 0; --k) acc = acc * d + c[k];
        return acc;
    }
    double bound() const { return bound_; }

private:
    static constexpr int kNodes = 1024;
    static constexpr int kTerms = 9;
    double sigma_;
    std::vector<double> coef_;
    double bound_ = 0.0;
};

std::size_t mod_index(long n, std::size_t M) {
    long m = static_cast<long>(M);
    long r = n % m;
    if (r < 0) r += m;
    return static_cast<std::size_t>(r);
}

// e^{int} - 1 - n (e^{it} - 1)
cplx g_atom(long n, double t) {
    const double nt = static_cast<double>(n) * t;
    const double nd = static_cast<double>(n);
    if (std::abs(nt) <= 0.5 && std::abs(t) <= 0.5) {
        double re = 0.0, im = 0.0;
        double pn = 1.0, pt = 1.0, fact = 1.0;  // (nt)^k, t^k, k!
        for (int k = 1; k <= 40; ++k) {
            pn *= nt;
            pt *= t;
            fact *= k;
            if (k == 1) continue;
            const double term = (pn - nd * pt) / fact;
            const int phase = k % 4;  // i^k
            if (phase == 0) re += term;
            else if (phase == 1) im += term;
            else if (phase == 2) re -= term;
            else im -= term;
            // odd orders vanish exactly for n = -1, so test the size of the pieces
            if ((std::abs(pn) + std::abs(nd * pt)) / fact < 1e-34) break;
        }
        return {re, im};
    }
    const double sh = std::sin(0.5 * nt), s1 = std::sin(0.5 * t);
    return {-2.0 * sh * sh + 2.0 * nd * s1 * s1, std::sin(nt) - nd * std::sin(t)};
}

// (-i t)^{p}, principal branch
cplx minus_it_pow(double t, double p) {
    const double mag = std::pow(std::abs(t), p);
    const double ang = (t > 0 ? -0.5 : 0.5) * kPi * p;
    return std::polar(mag, ang);
}

// sum_{m >= 0} (m + a)^{-s} e^{i(m+a)t} minus its k = 0 term zeta(s, a)
cplx lerch_minus_zeta(double s, double a, double t) {
    cplx acc = gamma_fn(1.0 - s) * minus_it_pow(t, s - 1.0);
    cplx itk(1.0, 0.0);
    double fact = 1.0;
    for (int k = 1; k <= 14; ++k) {
        itk *= cplx(0.0, t);
        fact *= k;
        const cplx term = hurwitz_zeta(s - k, a).value * itk / fact;
        acc += term;
        if (std::abs(term) < 1e-32 * std::abs(acc)) break;
    }
    return acc;
}

}  // namespace

double CharFnGrid::t(std::size_t j) const {
    const double jj = j < M / 2 ? static_cast<double>(j) : static_cast<double>(j) - static_cast<double>(M);
    return 2.0 * kPi * jj / static_cast<double>(M);
}

cplx one_minus_expi(double t) {
    const double s = std::sin(0.5 * t);
    return {2.0 * s * s, -std::sin(t)};
}

std::vector<double> fold_pmf(const StepLaw& law, std::size_t M, double& bound) {
    std::vector<double> q(M, 0.0);
    bound = 0.0;
    const long lo = law.core_lo();
    const auto& core = law.core();
    for (std::size_t i = 0; i < core.size(); ++i) q[mod_index(lo + static_cast<long>(i), M)] += core[i];

    if (law.has_geometric()) {
        const double qq = law.geom_q();
        const double wrap = 1.0 / (1.0 - std::pow(qq, static_cast<double>(M)));
        double w = law.geom_amp() * wrap;
        const long ls = lo - 1;
        for (std::size_t k = 0; k < M && w > 1e-300; ++k) {
            q[mod_index(ls - static_cast<long>(k), M)] += w;
            w *= qq;
        }
    }

    const long T = law.tail_start();
    const double Md = static_cast<double>(M);
    const double alpha = law.alpha();
    if (law.tail_kind() == TailKind::PowerPmf) {
        const double s = 1.0 + alpha;
        const double c = law.pmf_coef();
        ShiftedZeta z(s);
        const double scale = c * std::pow(Md, -s);
#pragma omp parallel for schedule(static) if (M >= (1u << 14))
        for (long i = 0; i < static_cast<long>(M); ++i) {
            const long n0 = T + i;
            const double direct = c * std::pow(static_cast<double>(n0), -s);
            const double wrapped = scale * z(static_cast<double>(n0) / Md);
            q[mod_index(n0, M)] += direct + wrapped;
        }
        bound += scale * z.bound() * Md;
    } else if (law.tail_kind() == TailKind::PowerCells) {
        for (const auto& cell : law.cells()) {
            ShiftedZeta z(alpha);
            const double scale = cell.coef * std::pow(Md, -alpha);
#pragma omp parallel for schedule(static) if (M >= (1u << 14))
            for (long i = 0; i < static_cast<long>(M); ++i) {
                const long n0 = T + i;
                const double x = static_cast<double>(n0) - 1.0 + cell.theta;
                const double direct = -cell.coef * std::pow(x, -alpha) * std::expm1(-alpha * std::log1p(1.0 / x));
                const double wrapped = scale * (z(x / Md) - z((x + 1.0) / Md));
                q[mod_index(n0, M)] += direct + wrapped;
            }
            bound += 2.0 * scale * z.bound() * Md;
        }
    }
    return q;
}

CharFnGrid build_grid(const StepLaw& law, std::size_t M, double tol) {
    if (M < 1024 || (M & (M - 1)) != 0) throw std::invalid_argument("build_grid: M must be a power of two >= 1024");
    CharFnGrid g;
    g.M = M;
    g.mu = law.mu();
    g.beta = law.alpha() - 1.0;
    double fold_bound = 0.0;
    auto q = fold_pmf(law, M, fold_bound);
    g.fold_bound = fold_bound;
    g.phat.resize(M);
    for (std::size_t i = 0; i < M; ++i) g.phat[i] = cplx(q[i], 0.0);
    fft_inplace(g.phat, +1);
    g.trunc_bound = fold_bound + fft_error_bound(norm2(q), M) + law.norm_residual();
    if (g.trunc_bound > tol / 2.0)
        throw std::runtime_error("build_grid: requested tolerance not reachable at this grid size");
    return g;
}

void derive(CharFnGrid& g, int k_max) {
    const std::size_t M = g.M;
    const double mu = g.mu;
    g.phihat.assign(M, cplx());
    g.deltahat.assign(M, cplx());
    g.phihat_err.assign(M, 0.0);
    g.deltahat_err.assign(M, 0.0);
    g.psik.assign(static_cast<std::size_t>(std::max(k_max, 0)), std::vector<cplx>(M));
    const double ep = g.trunc_bound;
#pragma omp parallel for schedule(static) if (M >= (1u << 14))
    for (std::size_t j = 1; j < M; ++j) {
        const double t = g.t(j);
        const cplx ome = one_minus_expi(t);
        const cplx omp = 1.0 - g.phat[j];
        const double a_omp = std::abs(omp);
        if (a_omp < 64.0 * ep) {
            // flagged by the caller through the error arrays
            g.phihat_err[j] = INFINITY;
            g.deltahat_err[j] = INFINITY;
            continue;
        }
        const cplx ph = omp / (mu * ome);
        g.phihat[j] = ph;
        g.deltahat[j] = -ome / omp;
        g.phihat_err[j] = ep / (mu * std::abs(ome));
        g.deltahat_err[j] = std::abs(ome) * ep / (a_omp * (a_omp - ep));
        cplx acc = 1.0;
        const cplx one_minus = 1.0 - ph;
        for (int k = 1; k <= k_max; ++k) {
            acc *= one_minus;
            g.psik[static_cast<std::size_t>(k - 1)][j] = acc / ome;
        }
    }
    for (std::size_t j = 1; j < M; ++j)
        if (!std::isfinite(g.phihat_err[j])) throw std::runtime_error("derive: |1 - p^(t)| below the cancellation floor");
    g.phihat[0] = 1.0;
    g.deltahat[0] = -1.0 / mu;
    g.psik_zero_finite.assign(static_cast<std::size_t>(std::max(k_max, 0)), false);
    // psi_k(0) is the limit 0 when k beta > 1; otherwise psi_k blows up at 0
    for (int k = 1; k <= k_max; ++k) {
        const bool vanishing = k * g.beta > 1.0 + 1e-12;
        g.psik_zero_finite[static_cast<std::size_t>(k - 1)] = vanishing;
        g.psik[static_cast<std::size_t>(k - 1)][0] = vanishing ? cplx(0.0, 0.0) : cplx(NAN, NAN);
    }
}

PointwiseCF charfn_pointwise(const StepLaw& law, double t) {
    if (!(std::abs(t) > 0.0 && std::abs(t) <= 0.05)) throw std::invalid_argument("charfn_pointwise: need 0 < |t| <= 0.05");
    if (!(law.alpha() < 2.0) && law.tail_kind() != TailKind::None)
        throw std::invalid_argument("charfn_pointwise: alpha = 2 has a logarithmic term, not supported");
    const double mu = law.mu();
    cplx n_sum(0.0, 0.0);  // sum p_n g_n(t)
    const long lo = law.core_lo();
    const auto& core = law.core();
    for (std::size_t i = 0; i < core.size(); ++i)
        if (core[i] != 0.0) n_sum += core[i] * g_atom(lo + static_cast<long>(i), t);
    if (law.has_geometric()) {
        double w = law.geom_amp();
        for (long k = 0; k < 200000 && w > 1e-40; ++k) {
            n_sum += w * g_atom(lo - 1 - k, t);
            w *= law.geom_q();
        }
    }
    const long T = law.tail_start();
    const double alpha = law.alpha();
    if (law.tail_kind() == TailKind::PowerPmf) {
        const double s = 1.0 + alpha;
        const double Td = static_cast<double>(T);
        cplx acc = gamma_fn(1.0 - s) * minus_it_pow(t, s - 1.0);
        const double z1 = hurwitz_zeta(s - 1.0, Td).value;
        cplx itk(1.0, 0.0);
        double fact = 1.0;
        for (int k = 1; k <= 14; ++k) {
            itk *= cplx(0.0, t);
            fact *= k;
            if (k == 1) continue;
            const cplx term = (hurwitz_zeta(s - k, Td).value - z1) * itk / fact;
            acc += term;
            if (std::abs(term) < 1e-32 * std::abs(acc)) break;
        }
        n_sum += law.pmf_coef() * acc;
    } else if (law.tail_kind() == TailKind::PowerCells) {
        const cplx e1 = -one_minus_expi(t);  // e^{it} - 1
        double fbar_before = 0.0;
        cplx abel(0.0, 0.0);
        for (const auto& cell : law.cells()) {
            fbar_before += cell.coef * std::pow(static_cast<double>(T) - 1.0 + cell.theta, -alpha);
            const double a = static_cast<double>(T) + cell.theta;
            const cplx shift = std::polar(1.0, -cell.theta * t);
            const cplx shift_m1 = -one_minus_expi(-cell.theta * t);
            const cplx s_i = shift * lerch_minus_zeta(alpha, a, t) + shift_m1 * hurwitz_zeta(alpha, a).value;
            abel += cell.coef * s_i;
        }
        n_sum += fbar_before * g_atom(T, t) + e1 * abel;
    }
    PointwiseCF out;
    const cplx ome = one_minus_expi(t);
    out.one_minus_phihat = n_sum / (mu * ome);
    out.phihat = 1.0 - out.one_minus_phihat;
    out.phat = 1.0 - mu * ome + n_sum;
    return out;
}

std::vector<SmallTRow> small_t_checks(const StepLaw& law, const std::vector<double>& t_list) {
    const double beta = law.alpha() - 1.0;
    if (!(law.alpha() < 2.0)) throw std::invalid_argument("small_t_checks: requires alpha < 2");
    const double g1b = gamma_fn(1.0 - beta);
    const cplx phase = std::polar(1.0, -0.5 * kPi * beta);
    std::vector<SmallTRow> rows;
    for (double t : t_list) {
        if (!(t >= 1e-6)) throw std::invalid_argument("small_t_checks: t below the cancellation floor");
        SmallTRow row;
        row.t = t;
        const long n = static_cast<long>(std::ceil(1.0 / t - 1e-9));
        row.r_t = phibar1_exact(law, n);
        const auto c0 = charfn_pointwise(law, t);
        const double h = t / 100.0;
        const auto cp = charfn_pointwise(law, t + h);
        const auto cm = charfn_pointwise(law, t - h);
        // (1 - phi^)(t+h) - (1 - phi^)(t-h) keeps the small quantities
        const cplx d_one_minus = (cp.one_minus_phihat - cm.one_minus_phihat) / (2.0 * h);
        row.ratio1 = c0.one_minus_phihat / (g1b * phase * row.r_t);
        row.ratio2 = d_one_minus / (beta * g1b * phase * row.r_t / t);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace rrl
