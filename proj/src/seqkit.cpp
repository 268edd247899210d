#include "rrl/seqkit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "rrl/fft.hpp"

namespace rrl {

namespace {

// sum_{m >= from} C m^{-e}, from >= 1
double model_sum(const TailModel& t, long from) {
    if (!(t.exponent > 1.0)) return std::numeric_limits<double>::infinity();
    from = std::max(from, 1L);
    const auto z = hurwitz_zeta(t.exponent, static_cast<double>(from));
    return t.constant * (z.value + z.bound);
}

double model_value(const TailModel& t, long n) {
    return t.constant * std::pow(static_cast<double>(std::max(std::abs(n), 1L)), -t.exponent);
}

// Bound on sum_m |a_m| |b_{n-m}| over m outside a's window, for n in [out_lo, out_hi].
// When the paired b indices fall entirely below (above) b's stored window, only
// b's tail model is involved and a's tail needs a sup, not a sum.
double off_window(const WindowSeq& a, const WindowSeq& b, long out_lo, long out_hi) {
    double s = 0.0;
    if (a.right_tail_model) {
        const long jmax = out_hi - a.hi - 1;
        if (jmax < b.lo && jmax < 0) {
            if (b.left_tail_model)
                s += model_value(*a.right_tail_model, a.hi + 1) * model_sum(*b.left_tail_model, -jmax);
        } else {
            s += b.sup_with_tails() * model_sum(*a.right_tail_model, a.hi + 1);
        }
    }
    if (a.left_tail_model) {
        const long jmin = out_lo - a.lo + 1;
        if (jmin > b.hi && jmin > 0) {
            if (b.right_tail_model)
                s += model_value(*a.left_tail_model, a.lo - 1) * model_sum(*b.right_tail_model, jmin);
        } else {
            s += b.sup_with_tails() * model_sum(*a.left_tail_model, -a.lo + 1);
        }
    }
    return s;
}

WindowSeq finish(const WindowSeq& a, const WindowSeq& b, long out_lo, long out_hi, const std::vector<double>& full,
                 double rounding) {
    WindowSeq c;
    c.lo = out_lo;
    c.hi = out_hi;
    c.values.assign(static_cast<std::size_t>(out_hi - out_lo + 1), 0.0);
    const long full_lo = a.lo + b.lo;
    for (long n = out_lo; n <= out_hi; ++n) {
        const long idx = n - full_lo;
        if (idx >= 0 && idx < static_cast<long>(full.size())) c.values[static_cast<std::size_t>(n - out_lo)] = full[static_cast<std::size_t>(idx)];
    }
    const double off = off_window(a, b, out_lo, out_hi) + off_window(b, a, out_lo, out_hi);
    // stored-part propagation; off-window parts are covered by the envelopes
    double prop = 0.0;
    if (b.err_budget > 0.0) prop += a.stored_norm1() * b.err_budget;
    if (a.err_budget > 0.0) prop += b.stored_norm1() * a.err_budget;
    c.err_budget = off + prop + rounding;
    if (!std::isfinite(c.err_budget)) throw std::runtime_error("convolve: off-window contribution is not summable");
    return c;
}

}  // namespace

WindowSeq WindowSeq::from_values(long lo, std::vector<double> values, double err) {
    WindowSeq w;
    w.lo = lo;
    w.hi = lo + static_cast<long>(values.size()) - 1;
    w.values = std::move(values);
    w.err_budget = err;
    return w;
}

WindowSeq WindowSeq::delta(long at, double mass) { return from_values(at, {mass}); }

void WindowSeq::validate() const {
    if (hi < lo) throw std::invalid_argument("WindowSeq: hi < lo");
    if (static_cast<long>(values.size()) != hi - lo + 1) throw std::invalid_argument("WindowSeq: size mismatch");
    for (double v : values)
        if (!std::isfinite(v)) throw std::invalid_argument("WindowSeq: non-finite value");
    if (!(err_budget >= 0.0)) throw std::invalid_argument("WindowSeq: negative err_budget");
    if (right_tail_model && hi > 0) {
        const double edge = std::abs(values.back());
        if (edge > 1.1 * model_value(*right_tail_model, hi) + err_budget)
            throw std::invalid_argument("WindowSeq: right tail model below the edge value");
    }
    if (left_tail_model && lo < 0) {
        const double edge = std::abs(values.front());
        if (edge > 1.1 * model_value(*left_tail_model, lo) + err_budget)
            throw std::invalid_argument("WindowSeq: left tail model below the edge value");
    }
}

double WindowSeq::stored_norm1() const { return norm1(values); }

double WindowSeq::norm1_with_tails() const {
    double s = stored_norm1();
    if (right_tail_model) s += model_sum(*right_tail_model, hi + 1);
    if (left_tail_model) s += model_sum(*left_tail_model, -lo + 1);
    return s;
}

double WindowSeq::sup_with_tails() const {
    double s = 0.0;
    for (double v : values) s = std::max(s, std::abs(v));
    if (right_tail_model) s = std::max(s, model_value(*right_tail_model, std::max(hi + 1, 1L)));
    if (left_tail_model) s = std::max(s, model_value(*left_tail_model, std::min(lo - 1, -1L)));
    return s + err_budget;
}

WindowSeq convolve(const WindowSeq& a, const WindowSeq& b, long out_lo, long out_hi) {
    if (out_hi < out_lo) throw std::invalid_argument("convolve: empty output window");
    if (std::min(a.size(), b.size()) <= 32) return direct_convolve(a, b, out_lo, out_hi);
    auto full = fft_convolve(a.values, b.values);
    const double rounding = fft_convolve_error_bound(norm2(a.values), norm2(b.values), next_pow2(full.size()));
    return finish(a, b, out_lo, out_hi, full, rounding);
}

WindowSeq direct_convolve(const WindowSeq& a, const WindowSeq& b, long out_lo, long out_hi) {
    if (out_hi < out_lo) throw std::invalid_argument("direct_convolve: empty output window");
    auto full = direct_convolve_raw(a.values, b.values);
    double rounding = 0.0;
    const WindowSeq& small = a.size() <= b.size() ? a : b;
    int expo = 0;
    const bool exact_scale = small.size() == 1 && std::frexp(small.values[0], &expo) == 0.5;
    if (!exact_scale) {
        double sup = 0.0;
        for (double x : full) sup = std::max(sup, std::abs(x));
        // long double accumulation, one rounding to double
        rounding = sup * (1.2e-16 + 1.1e-19 * static_cast<double>(small.size()));
    }
    return finish(a, b, out_lo, out_hi, full, rounding);
}

Certified tail_sum(const WindowSeq& a, long n, Side side) {
    CompensatedSum s;
    Certified out;
    if (side == Side::Right) {
        if (!a.right_tail_model && n > a.hi) throw std::invalid_argument("tail_sum: n lies beyond the window and there is no right tail model");
        for (long r = std::max(n + 1, a.lo); r <= a.hi; ++r) s.add(a.at(r));
        const long from = std::max(n + 1, a.hi + 1);
        if (a.right_tail_model) {
            const auto& m = *a.right_tail_model;
            if (!(m.exponent > 1.0)) throw std::invalid_argument("tail_sum: right tail model is not summable");
            if (from < 1) throw std::invalid_argument("tail_sum: right tail model needs a positive window edge");
            const auto z = hurwitz_zeta(m.exponent, static_cast<double>(from));
            if (m.exact) {
                s.add(m.constant * z.value);
                out.bound += m.constant * z.bound;
            } else {
                out.bound += m.constant * (z.value + z.bound);
            }
        }
        out.bound += a.err_budget * static_cast<double>(std::max(0L, a.hi - std::max(n + 1, a.lo) + 1));
    } else {
        if (!a.left_tail_model && n < a.lo) throw std::invalid_argument("tail_sum: n lies beyond the window and there is no left tail model");
        for (long r = a.lo; r <= std::min(n, a.hi); ++r) s.add(a.at(r));
        const long to = std::min(n, a.lo - 1);
        if (a.left_tail_model) {
            const auto& m = *a.left_tail_model;
            if (!(m.exponent > 1.0)) throw std::invalid_argument("tail_sum: left tail model is not summable");
            if (to > -1) throw std::invalid_argument("tail_sum: left tail model needs a negative window edge");
            const auto z = hurwitz_zeta(m.exponent, static_cast<double>(-to));
            if (m.exact) {
                s.add(m.constant * z.value);
                out.bound += m.constant * z.bound;
            } else {
                out.bound += m.constant * (z.value + z.bound);
            }
        }
        out.bound += a.err_budget * static_cast<double>(std::max(0L, std::min(n, a.hi) - a.lo + 1));
    }
    out.value = s.value();
    out.bound += 4e-16 * std::abs(out.value);
    return out;
}

void write_csv(std::ostream& os, const WindowSeq& a, const std::string& comment) {
    if (!comment.empty()) os << comment << "\n";
    std::ostringstream meta;
    meta.precision(6);
    meta << "#meta err_budget=" << a.err_budget;
    if (a.right_tail_model)
        meta << " right_model=(" << a.right_tail_model->exponent << "," << a.right_tail_model->constant << ")";
    if (a.left_tail_model)
        meta << " left_model=(" << a.left_tail_model->exponent << "," << a.left_tail_model->constant << ")";
    os << meta.str() << "\n";
    os << "n,value\n";
    char buf[64];
    for (long n = a.lo; n <= a.hi; ++n) {
        std::snprintf(buf, sizeof buf, "%ld,%.17g\n", n, a.at(n));
        os << buf;
    }
}

}  // namespace rrl
