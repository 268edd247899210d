#include "rrl/steplaw.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include "rrl/special.hpp"

namespace rrl {

namespace {

// x^{-a} - (x+1)^{-a} without cancellation
double power_step(double x, double a) { return -std::pow(x, -a) * std::expm1(-a * std::log1p(1.0 / x)); }

constexpr int kLambdaPoints = 64;

}  // namespace

StepLaw StepLaw::power(double alpha, double right_mass, const LeftSpec& left, long n_store) {
    if (!(alpha > 1.0 && alpha <= 2.0)) throw std::invalid_argument("power law: alpha must lie in (1,2]");
    if (!(right_mass > 0.0 && right_mass <= 1.0)) throw std::invalid_argument("power law: right_mass must lie in (0,1]");
    const double s = 1.0 + alpha;
    const double c = right_mass / zeta(s);

    long lo = 0;
    std::map<long, double> atoms;
    bool geom = false;
    double amp = 0.0, q = 0.0;
    double left_mass = 0.0;
    switch (left.kind) {
        case LeftSpec::Kind::Empty:
            break;
        case LeftSpec::Kind::Atoms:
            for (const auto& [n, m] : left.atoms) {
                if (n >= 0) throw std::invalid_argument("power law: left atoms must sit at n < 0");
                if (!(m > 0.0)) throw std::invalid_argument("power law: left atom masses must be positive");
                atoms[n] += m;
                left_mass += m;
                lo = std::min(lo, n);
            }
            break;
        case LeftSpec::Kind::Geometric:
            if (!(left.q > 0.0 && left.q < 1.0)) throw std::invalid_argument("power law: geometric q must lie in (0,1)");
            if (!(left.mass > 0.0)) throw std::invalid_argument("power law: geometric mass must be positive");
            geom = true;
            q = left.q;
            amp = left.mass * (1.0 - q);
            left_mass = left.mass;
            break;
    }
    if (std::abs(right_mass + left_mass - 1.0) > 1e-12) {
        std::ostringstream os;
        os << "power law: right_mass + left mass = " << right_mass + left_mass << " != 1";
        throw std::invalid_argument(os.str());
    }
    std::vector<double> core(static_cast<std::size_t>(1 - lo), 0.0);  // [lo, 0]
    for (const auto& [n, m] : atoms) core[static_cast<std::size_t>(n - lo)] = m;
    return general(alpha, lo, std::move(core), TailKind::PowerPmf, c, {}, geom, amp, q, n_store);
}

StepLaw StepLaw::atoms(const std::vector<std::pair<long, double>>& atoms) {
    if (atoms.empty()) throw std::invalid_argument("atoms law: no atoms");
    long lo = atoms.front().first, hi = lo;
    for (const auto& a : atoms) {
        lo = std::min(lo, a.first);
        hi = std::max(hi, a.first);
    }
    std::vector<double> core(static_cast<std::size_t>(hi - lo + 1), 0.0);
    for (const auto& [n, m] : atoms) {
        if (!(m >= 0.0)) throw std::invalid_argument("atoms law: negative mass");
        core[static_cast<std::size_t>(n - lo)] += m;
    }
    return general(2.0, lo, std::move(core), TailKind::None, 0.0, {}, false, 0.0, 0.0, 4096);
}

StepLaw StepLaw::general(double alpha, long core_lo, std::vector<double> core, TailKind kind, double pmf_coef,
                         std::vector<PowerCell> cells, bool geom, double geom_amp, double geom_q, long n_store) {
    if (core.empty()) throw std::invalid_argument("step law: empty core");
    StepLaw law;
    law.alpha_ = alpha;
    law.core_lo_ = core_lo;
    law.core_ = std::move(core);
    law.kind_ = kind;
    law.c_ = pmf_coef;
    law.cells_ = std::move(cells);
    law.geom_ = geom;
    law.geom_amp_ = geom_amp;
    law.geom_q_ = geom_q;
    law.n_store_ = n_store;
    if (kind == TailKind::PowerPmf && law.tail_start() < 1)
        throw std::invalid_argument("step law: power pmf tail must start at n >= 1");
    if (kind == TailKind::PowerCells) {
        for (const auto& cell : law.cells_)
            if (!(cell.coef > 0.0) || !(law.tail_start() - 1 + cell.theta > 0.0))
                throw std::invalid_argument("step law: invalid power cell");
    }
    law.finalize();
    return law;
}

double StepLaw::right_tail_fbar(long r) const {
    switch (kind_) {
        case TailKind::None:
            return 0.0;
        case TailKind::PowerPmf:
            return c_ * hurwitz_zeta(1.0 + alpha_, static_cast<double>(r) + 1.0).value;
        case TailKind::PowerCells: {
            double s = 0.0;
            for (const auto& cell : cells_) s += cell.coef * std::pow(static_cast<double>(r) + cell.theta, -alpha_);
            return s;
        }
    }
    return 0.0;
}

double StepLaw::tail_fbar_real(double r) const {
    switch (kind_) {
        case TailKind::None:
            return 0.0;
        case TailKind::PowerPmf:
            return c_ * hurwitz_zeta(1.0 + alpha_, r + 1.0).value;
        case TailKind::PowerCells: {
            double s = 0.0;
            for (const auto& cell : cells_) s += cell.coef * std::pow(r + cell.theta, -alpha_);
            return s;
        }
    }
    return 0.0;
}

double StepLaw::right_tail_ir(long m) const {
    switch (kind_) {
        case TailKind::None:
            return 0.0;
        case TailKind::PowerPmf: {
            const double s = 1.0 + alpha_;
            const double a = static_cast<double>(m) + 2.0;
            return c_ * (hurwitz_zeta(s - 1.0, a).value - (static_cast<double>(m) + 1.0) * hurwitz_zeta(s, a).value);
        }
        case TailKind::PowerCells: {
            double s = 0.0;
            for (const auto& cell : cells_)
                s += cell.coef * hurwitz_zeta(alpha_, static_cast<double>(m) + 1.0 + cell.theta).value;
            return s;
        }
    }
    return 0.0;
}

void StepLaw::finalize() {
    const long hi = core_hi();
    const std::size_t sz = core_.size();
    for (double v : core_)
        if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("step law: core masses must be finite and >= 0");
    if (geom_ && !(geom_q_ > 0.0 && geom_q_ < 1.0 && geom_amp_ > 0.0))
        throw std::invalid_argument("step law: invalid geometric left tail");

    geom_total_ = geom_ ? geom_amp_ / (1.0 - geom_q_) : 0.0;
    const double rt_hi = kind_ == TailKind::None ? 0.0 : right_tail_fbar(hi);

    core_fbar_.assign(sz, 0.0);
    core_fcdf_.assign(sz, 0.0);
    long double acc = rt_hi;
    for (std::size_t i = sz; i-- > 0;) {
        core_fbar_[i] = static_cast<double>(acc);
        acc += core_[i];
    }
    long double total = acc + geom_total_;
    acc = geom_total_;
    for (std::size_t i = 0; i < sz; ++i) {
        acc += core_[i];
        core_fcdf_[i] = static_cast<double>(acc);
    }
    norm_residual_ = static_cast<double>(std::abs(1.0L - total)) + 4e-16;
    if (norm_residual_ > 1e-12) {
        std::ostringstream os;
        os << "step law: total mass " << static_cast<double>(total) << " is not 1 (residual " << norm_residual_ << ")";
        throw std::invalid_argument(os.str());
    }
    double delta = alpha_ < 2.0 ? 0.5 * (alpha_ - 1.0) : 0.5;
    moments_ = moments(delta);
    if (!(moments_.mu > 0.0)) {
        std::ostringstream os;
        os << "step law: drift mu = " << moments_.mu << " is not positive";
        throw std::invalid_argument(os.str());
    }
    lambda_grid_ = lambda_grid();
    mgf_grid_.clear();
    for (double lam : lambda_grid_) mgf_grid_.push_back(mgf_neg(lam));
}

bool StepLaw::one_sided() const { return !geom_ && fcdf(-1) == 0.0; }

long StepLaw::left_extent() const {
    if (geom_) return std::numeric_limits<long>::min();
    for (std::size_t i = 0; i < core_.size(); ++i)
        if (core_[i] > 0.0) return core_lo_ + static_cast<long>(i);
    return core_lo_;
}

double StepLaw::pmf(long n) const {
    if (n < core_lo_) return geom_ ? geom_amp_ * std::pow(geom_q_, static_cast<double>(core_lo_ - 1 - n)) : 0.0;
    if (n <= core_hi()) return core_[static_cast<std::size_t>(n - core_lo_)];
    switch (kind_) {
        case TailKind::None:
            return 0.0;
        case TailKind::PowerPmf:
            return c_ * std::pow(static_cast<double>(n), -(1.0 + alpha_));
        case TailKind::PowerCells: {
            double s = 0.0;
            for (const auto& cell : cells_) s += cell.coef * power_step(static_cast<double>(n) - 1.0 + cell.theta, alpha_);
            return s;
        }
    }
    return 0.0;
}

double StepLaw::fcdf(long n) const {
    if (n < core_lo_) return geom_ ? geom_amp_ * std::pow(geom_q_, static_cast<double>(core_lo_ - 1 - n)) / (1.0 - geom_q_) : 0.0;
    if (n <= core_hi()) return core_fcdf_[static_cast<std::size_t>(n - core_lo_)];
    return 1.0 - right_tail_fbar(n);
}

double StepLaw::fbar(long n) const {
    if (n >= core_hi()) return right_tail_fbar(n);
    if (n >= core_lo_) return core_fbar_[static_cast<std::size_t>(n - core_lo_)];
    double above_core = core_fbar_[0] + core_[0];
    if (!geom_) return above_core;
    return above_core + (geom_total_ - fcdf(n));
}

LawPoint StepLaw::eval(long n) const {
    LawPoint p;
    p.pmf = pmf(n);
    p.right_tail = fbar(n);
    p.left_tail = fcdf(-std::abs(n));
    return p;
}

double StepLaw::integrated_right(long m) const {
    if (m < -1) throw std::invalid_argument("integrated_right: m must be >= -1");
    const long t2 = tail_start() - 2;
    if (m >= t2) return right_tail_ir(m);
    long double s = right_tail_ir(t2);
    for (long r = t2; r > m; --r) s += fbar(r);
    return static_cast<double>(s);
}

double StepLaw::integrated_left(long n) const {
    if (n > -1) throw std::invalid_argument("integrated_left: n must be <= -1");
    const long ls = core_lo_ - 1;
    if (geom_) {
        if (n <= ls) return geom_amp_ * std::pow(geom_q_, static_cast<double>(ls - n)) / ((1.0 - geom_q_) * (1.0 - geom_q_));
        long double s = geom_amp_ / ((1.0 - geom_q_) * (1.0 - geom_q_));
        for (long r = ls + 1; r <= n; ++r) s += fcdf(r);
        return static_cast<double>(s);
    }
    long double s = 0.0L;
    for (long r = core_lo_; r <= n; ++r) s += fcdf(r);
    return static_cast<double>(s);
}

MomentSummary StepLaw::moments(double delta) const {
    if (!(delta > 0.0) || (alpha_ < 2.0 && !(delta < alpha_ - 1.0)) || (alpha_ >= 2.0 && !(delta < 1.0)))
        throw std::invalid_argument("moments: delta out of range");
    MomentSummary ms;
    ms.delta = delta;
    ms.mu_plus = integrated_right(-1);
    ms.mu_minus = core_lo_ <= -1 || geom_ ? -integrated_left(-1) : 0.0;
    ms.mu = ms.mu_plus + ms.mu_minus;
    // zeta remainders are at the 1e-16 relative level; budget generously for the finite sums
    ms.mu_plus_bound = 1e-15 * ms.mu_plus + 1e-15;
    ms.mu_minus_bound = 1e-15 * std::abs(ms.mu_minus);
    ms.mu_bound = ms.mu_plus_bound + ms.mu_minus_bound;

    long double fm = 0.0L;
    for (std::size_t i = 0; i < core_.size(); ++i) {
        double n = static_cast<double>(core_lo_ + static_cast<long>(i));
        fm += core_[i] * std::pow(std::abs(n), 1.0 + delta);
    }
    if (geom_) {
        const long ls = core_lo_ - 1;
        for (long k = 0; k < 100000; ++k) {
            double term = geom_amp_ * std::pow(geom_q_, static_cast<double>(k)) * std::pow(static_cast<double>(k - ls), 1.0 + delta);
            fm += term;
            if (term < 1e-22 && k > 10) break;
        }
    }
    double fm_bound = 1e-14 * static_cast<double>(fm);
    const long t = tail_start();
    if (kind_ == TailKind::PowerPmf) {
        auto z = hurwitz_zeta(alpha_ - delta, static_cast<double>(t));
        fm += c_ * z.value;
        fm_bound += c_ * z.bound;
    } else if (kind_ == TailKind::PowerCells) {
        const long n_cut = t + 200000;
        long double s = 0.0L;
        for (long n = t; n <= n_cut; ++n) s += pmf(n) * std::pow(static_cast<double>(n), 1.0 + delta);
        fm += s;
        // p_n <= alpha sum C (n-1+theta)^{-alpha-1}
        double rem = 0.0;
        for (const auto& cell : cells_) {
            double x0 = static_cast<double>(n_cut) - 1.0 + cell.theta;
            rem += alpha_ * cell.coef * std::pow(1.0 + 2.0 / x0, 1.0 + alpha_) * std::pow(x0, 1.0 + delta - alpha_) /
                   (alpha_ - 1.0 - delta);
        }
        fm += 0.5 * rem;
        fm_bound += 0.5 * rem + 1e-14 * static_cast<double>(s);
    }
    ms.frac_moment = static_cast<double>(fm);
    ms.frac_moment_bound = fm_bound;
    return ms;
}

double StepLaw::lambda_max() const { return geom_ ? -std::log(geom_q_) / 2.0 : 1.0; }

std::vector<double> StepLaw::lambda_grid() const {
    std::vector<double> g(kLambdaPoints);
    const double lmax = lambda_max();
    const double lmin = lmax * 1e-3;
    for (int i = 0; i < kLambdaPoints; ++i)
        g[static_cast<std::size_t>(i)] = lmin * std::pow(lmax / lmin, static_cast<double>(i) / (kLambdaPoints - 1));
    return g;
}

double StepLaw::mgf_neg(double lambda) const {
    if (!(lambda > 0.0)) return 1.0;
    long double s = 0.0L;
    if (geom_) {
        const double qe = geom_q_ * std::exp(lambda);
        if (qe >= 1.0) return std::numeric_limits<double>::infinity();
        const long ls = core_lo_ - 1;
        s += geom_amp_ * std::exp(-lambda * static_cast<double>(ls)) / (1.0 - qe);
    }
    for (std::size_t i = 0; i < core_.size(); ++i)
        s += core_[i] * std::exp(-lambda * static_cast<double>(core_lo_ + static_cast<long>(i)));
    if (kind_ != TailKind::None) {
        const long t = tail_start();
        const long n_end = t + static_cast<long>(std::ceil(45.0 / lambda));
        long double tail = 0.0L;
        const long n_direct = std::min(n_end, t + 200000);
        for (long n = t; n <= n_direct; ++n) tail += pmf(n) * std::exp(-lambda * static_cast<double>(n));
        // whatever remains is at most Fbar(n_direct) e^{-lambda (n_direct+1)}
        tail += right_tail_fbar(n_direct) * std::exp(-lambda * static_cast<double>(n_direct + 1));
        s += tail;
    }
    return static_cast<double>(s) * (1.0 + 1e-14);
}

ChernoffResult StepLaw::chernoff(long m, long n_steps) const {
    ChernoffResult best;
    bool any = false;
    for (std::size_t i = 0; i < lambda_grid_.size(); ++i) {
        const double lam = lambda_grid_[i];
        const double mg = mgf_grid_[i];
        if (!(mg < 1.0)) continue;
        any = true;
        const double log_b = lam * static_cast<double>(m) + static_cast<double>(n_steps) * std::log(mg);
        const double b = std::exp(log_b);
        const double ts = b / (1.0 - mg);
        if (b < best.bound) best.bound = b;
        if (ts < best.tail_sum) {
            best.tail_sum = ts;
            best.lambda = lam;
        }
    }
    if (!any) throw std::runtime_error("chernoff: no lambda with M(lambda) < 1 on the grid");
    return best;
}

double StepLaw::return_bound(double d) const {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < lambda_grid_.size(); ++i) {
        const double lam = lambda_grid_[i];
        const double mg = mgf_grid_[i];
        if (!(mg < 1.0)) continue;
        best = std::min(best, std::exp(-lam * d) / (1.0 - mg));
    }
    if (!std::isfinite(best)) throw std::runtime_error("return_bound: no lambda with M(lambda) < 1");
    return best;
}

double StepLaw::u_max_bound() const { return return_bound(0.0); }

std::string StepLaw::describe() const {
    std::ostringstream os;
    os.precision(12);
    os << "alpha = " << alpha_ << "\n";
    os << "tail = " << (kind_ == TailKind::None ? "none" : kind_ == TailKind::PowerPmf ? "power_pmf" : "power_cells")
       << "\n";
    os << "core = [" << core_lo_ << ", " << core_hi() << "]\n";
    os << "left = " << (geom_ ? "geometric" : "finite") << "\n";
    os << "norm_residual = " << norm_residual_ << "\n";
    os << "mu = " << moments_.mu << "\nmu_plus = " << moments_.mu_plus << "\nmu_minus = " << moments_.mu_minus << "\n";
    os << "frac_moment(delta=" << moments_.delta << ") = " << moments_.frac_moment << "\n";
    return os.str();
}

std::vector<double> windowed_second_moments(const StepLaw& law, const std::vector<long>& windows) {
    std::vector<double> out;
    for (long w : windows) {
        long double s = 0.0L;
        for (long n = -w; n <= w; ++n) s += static_cast<long double>(n) * n * law.pmf(n);
        out.push_back(static_cast<double>(s));
    }
    return out;
}

std::vector<double> left_right_ratios(const StepLaw& law, const std::vector<long>& ns) {
    std::vector<double> out;
    for (long n : ns) out.push_back(law.fcdf(-n) / law.fbar(n));
    return out;
}

}  // namespace rrl
