#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "rrl/special.hpp"

namespace rrl {

// |a_n| <= constant * |n|^{-exponent} beyond the window edge. With exact set,
// a_n equals constant * |n|^{-exponent} there (signed value, not just a bound).
struct TailModel {
    double exponent = 2.0;
    double constant = 0.0;
    bool exact = false;
};

// Signed sequence stored on [lo, hi]. A missing tail model asserts the
// sequence vanishes beyond that edge.
struct WindowSeq {
    long lo = 0;
    long hi = -1;
    std::vector<double> values;
    std::optional<TailModel> right_tail_model;
    std::optional<TailModel> left_tail_model;
    double err_budget = 0.0;

    static WindowSeq from_values(long lo, std::vector<double> values, double err = 0.0);
    static WindowSeq delta(long at, double mass = 1.0);

    long size() const { return hi - lo + 1; }
    double at(long n) const { return n < lo || n > hi ? 0.0 : values[static_cast<std::size_t>(n - lo)]; }
    double& ref(long n) { return values[static_cast<std::size_t>(n - lo)]; }

    // Throws on a malformed window or a tail model inconsistent with the edge value.
    void validate() const;
    double stored_norm1() const;
    // l1 norm including modeled tails (infinite if a model is not summable).
    double norm1_with_tails() const;
    double sup_with_tails() const;
};

WindowSeq convolve(const WindowSeq& a, const WindowSeq& b, long out_lo, long out_hi);
WindowSeq direct_convolve(const WindowSeq& a, const WindowSeq& b, long out_lo, long out_hi);

enum class Side { Right, Left };
// Right: sum_{r > n} a_r.  Left: sum_{r <= n} a_r.
Certified tail_sum(const WindowSeq& a, long n, Side side);

void write_csv(std::ostream& os, const WindowSeq& a, const std::string& comment = "");

}  // namespace rrl
