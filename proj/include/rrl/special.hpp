#pragma once

#include <cmath>
#include <vector>

namespace rrl {

// Neumaier variant of Kahan summation.
class CompensatedSum {
public:
    void add(double x) {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

struct Certified {
    double value = 0.0;
    double bound = 0.0;  // absolute
};

// Hurwitz zeta(s, a) = sum_{k>=0} (k+a)^{-s}, a > 0, s != 1.
// Euler-Maclaurin; for s < 1 this is the analytic continuation.
Certified hurwitz_zeta(double s, double a);
inline double zeta(double s) { return hurwitz_zeta(s, 1.0).value; }

// B_{2j}/(2j)! for j = 1..40 (index j-1).
const std::vector<long double>& bernoulli_ratios();

double gamma_fn(double x);
double sin_pi(double x);

// (1-k beta) Gamma(1-beta)^k / Gamma(2-k beta); exactly 0 at k beta = 1.
double c_const(int k, double beta);
// Gamma(1-beta)^k / Gamma(1-k beta), undefined at k beta = 1.
double c_const_direct(int k, double beta);
int r_star(double alpha);

}  // namespace rrl
