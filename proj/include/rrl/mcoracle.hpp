#pragma once

#include <cstdint>
#include <vector>

#include "rrl/philox.hpp"
#include "rrl/steplaw.hpp"

namespace rrl {

// Exact sampler for a StepLaw: alias table over [core_lo, body_hi], geometric
// left tail by inversion, power right tail beyond body_hi by rejection.
class StepSampler {
public:
    explicit StepSampler(const StepLaw& law, long body_hi = 4096);
    long sample(Philox4x32& rng) const;

    long body_lo() const { return lo_; }
    long body_hi() const { return hi_; }
    double body_mass() const { return body_mass_; }

private:
    long sample_right(Philox4x32& rng) const;

    const StepLaw* law_;
    long lo_ = 0;
    long hi_ = 0;
    double body_mass_ = 0.0;
    double left_mass_ = 0.0;
    double right_mass_ = 0.0;
    std::vector<double> prob_;
    std::vector<std::uint32_t> alias_;
    // PowerPmf rejection: n >= start, accept n with probability ratio(n)/ratio(start)
    double s_ = 0.0;
    double accept_scale_ = 0.0;
    // PowerCells: cell pick weights coef (start - 1 + theta)^{-alpha}
    std::vector<double> cell_cdf_;
};

struct McEstimate {
    std::vector<long> targets;
    std::vector<double> estimate;
    std::vector<double> se;
    long replicas = 0;
    std::uint64_t master_seed = 0;
    long stop_level = 0;
    double bias_bound = 0.0;  // per target, from post-crossing returns
    double mean_steps = 0.0;
};

// Visits to each target before the walk first exceeds stop_level. stop_level
// <= 0 picks the smallest level meeting the margin and bias rules.
McEstimate estimate_u(const StepLaw& law, const std::vector<long>& targets, long replicas, std::uint64_t master_seed,
                      long stop_level = 0);

}  // namespace rrl
