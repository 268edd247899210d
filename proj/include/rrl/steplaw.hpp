#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace rrl {

enum class TailKind { None, PowerPmf, PowerCells };

// One component of a cell-integrated power tail: Fbar(r) += coef * (r + theta)^{-alpha}.
struct PowerCell {
    double coef = 0.0;
    double theta = 0.0;
};

struct LeftSpec {
    enum class Kind { Empty, Atoms, Geometric } kind = Kind::Empty;
    std::vector<std::pair<long, double>> atoms;  // (n < 0, mass)
    double q = 0.0;                              // p_{-k} = mass (1-q) q^{k-1}, k >= 1
    double mass = 0.0;
};

struct MomentSummary {
    double mu = 0.0;
    double mu_plus = 0.0;
    double mu_minus = 0.0;
    double delta = 0.0;
    double frac_moment = 0.0;  // E|X|^{1+delta}
    double mu_bound = 0.0;
    double mu_plus_bound = 0.0;
    double mu_minus_bound = 0.0;
    double frac_moment_bound = 0.0;
};

struct LawPoint {
    double pmf = 0.0;
    double right_tail = 0.0;  // Fbar(n) = P(X > n)
    double left_tail = 0.0;   // F(-|n|) = P(X <= -|n|)
};

struct ChernoffResult {
    double bound = 1.0;       // min_lambda e^{lambda m} M(lambda)^{n}
    double tail_sum = 1e300;  // min_lambda e^{lambda m} M(lambda)^{n} / (1 - M(lambda))
    double lambda = 0.0;
};

// Lattice step law: explicit core atoms on [core_lo, core_hi], an optional
// analytic right tail starting at core_hi + 1 and an optional geometric left
// tail ending at core_lo - 1. Immutable after construction.
class StepLaw {
public:
    static StepLaw power(double alpha, double right_mass, const LeftSpec& left, long n_store = 4096);
    static StepLaw atoms(const std::vector<std::pair<long, double>>& atoms);
    // Generic constructor; validates normalization and drift.
    static StepLaw general(double alpha, long core_lo, std::vector<double> core, TailKind kind,
                           double pmf_coef, std::vector<PowerCell> cells, bool geom, double geom_amp,
                           double geom_q, long n_store = 4096);

    double alpha() const { return alpha_; }
    TailKind tail_kind() const { return kind_; }
    long core_lo() const { return core_lo_; }
    long core_hi() const { return core_lo_ + static_cast<long>(core_.size()) - 1; }
    long tail_start() const { return core_hi() + 1; }
    const std::vector<double>& core() const { return core_; }
    double pmf_coef() const { return c_; }  // p_n = c n^{-(1+alpha)} (PowerPmf)
    const std::vector<PowerCell>& cells() const { return cells_; }
    bool has_geometric() const { return geom_; }
    double geom_amp() const { return geom_amp_; }  // p_{core_lo - 1 - k} = amp q^k
    double geom_q() const { return geom_q_; }
    long n_store() const { return n_store_; }
    double norm_residual() const { return norm_residual_; }
    bool one_sided() const;
    long left_extent() const;  // most negative atom for finite left support

    double pmf(long n) const;
    double fbar(long n) const;  // P(X > n)
    double fcdf(long n) const;  // P(X <= n)
    LawPoint eval(long n) const;

    // sum_{r > m} Fbar(r), m >= -1
    double integrated_right(long m) const;
    // sum_{r <= n} F(r), n <= -1
    double integrated_left(long n) const;

    const MomentSummary& moments() const { return moments_; }
    MomentSummary moments(double delta) const;
    double mu() const { return moments_.mu; }

    // E exp(-lambda X), an upper bound when the right tail is summed numerically.
    double mgf_neg(double lambda) const;
    double lambda_max() const;
    std::vector<double> lambda_grid() const;
    ChernoffResult chernoff(long m, long n_steps) const;
    // Bound on expected visits to (-inf, x - d] by a walk started at x: min e^{-lambda d}/(1 - M).
    double return_bound(double d) const;
    // Bound on max_n u_n: 1/(1 - M(lambda)) at the best grid lambda.
    double u_max_bound() const;

    // Right-tail power value at a real argument (envelope): Fbar-tail(r) for real r >= tail_start-1.
    double tail_fbar_real(double r) const;

    std::string describe() const;

private:
    void finalize();
    double right_tail_fbar(long r) const;  // r >= tail_start - 1
    double right_tail_ir(long m) const;    // sum_{r > m} Fbar(r), m >= tail_start - 2

    double alpha_ = 2.0;
    long core_lo_ = 0;
    std::vector<double> core_;
    TailKind kind_ = TailKind::None;
    double c_ = 0.0;
    std::vector<PowerCell> cells_;
    bool geom_ = false;
    double geom_amp_ = 0.0;
    double geom_q_ = 0.0;
    long n_store_ = 4096;

    std::vector<double> core_fbar_;  // Fbar(n) for n in core
    std::vector<double> core_fcdf_;  // F(n) for n in core
    double geom_total_ = 0.0;
    double norm_residual_ = 0.0;
    MomentSummary moments_;
    std::vector<double> lambda_grid_;
    std::vector<double> mgf_grid_;
};

// Windowed second moments sum_{|n| <= w} n^2 p_n for the given windows.
std::vector<double> windowed_second_moments(const StepLaw& law, const std::vector<long>& windows);
// F(-n)/Fbar(n) at the given n.
std::vector<double> left_right_ratios(const StepLaw& law, const std::vector<long>& ns);

}  // namespace rrl
