#include "rrl/mcoracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rrl {

namespace {

constexpr long kHuge = std::numeric_limits<long>::max() / 4;

// n^{-s} / int_n^{n+1} x^{-s} dx
double cell_ratio(double n, double s) {
    return (s - 1.0) / (n * -std::expm1((1.0 - s) * std::log1p(1.0 / n)));
}

}  // namespace

StepSampler::StepSampler(const StepLaw& law, long body_hi) : law_(&law) {
    lo_ = law.core_lo();
    hi_ = law.tail_kind() == TailKind::None ? law.core_hi() : std::max(law.core_hi(), body_hi);
    left_mass_ = law.has_geometric() ? law.geom_amp() / (1.0 - law.geom_q()) : 0.0;
    right_mass_ = law.tail_kind() == TailKind::None ? 0.0 : law.fbar(hi_);

    // bins: body atoms, then the left and right components
    const std::size_t nb = static_cast<std::size_t>(hi_ - lo_ + 1);
    std::vector<double> w(nb + 2, 0.0);
    for (long n = lo_; n <= hi_; ++n) w[static_cast<std::size_t>(n - lo_)] = law.pmf(n);
    w[nb] = left_mass_;
    w[nb + 1] = right_mass_;
    long double total = 0.0L;
    for (double x : w) total += x;
    body_mass_ = static_cast<double>(total) - left_mass_ - right_mass_;

    // Vose alias construction
    const std::size_t N = w.size();
    prob_.assign(N, 1.0);
    alias_.resize(N);
    std::vector<double> scaled(N);
    std::vector<std::size_t> small, large;
    for (std::size_t i = 0; i < N; ++i) {
        scaled[i] = w[i] * static_cast<double>(N) / static_cast<double>(total);
        alias_[i] = static_cast<std::uint32_t>(i);
        (scaled[i] < 1.0 ? small : large).push_back(i);
    }
    while (!small.empty() && !large.empty()) {
        const std::size_t s = small.back(), l = large.back();
        small.pop_back();
        prob_[s] = scaled[s];
        alias_[s] = static_cast<std::uint32_t>(l);
        scaled[l] = (scaled[l] + scaled[s]) - 1.0;
        if (scaled[l] < 1.0) {
            large.pop_back();
            small.push_back(l);
        }
    }
    // leftovers are 1 up to rounding
    for (std::size_t i : small) prob_[i] = 1.0;
    for (std::size_t i : large) prob_[i] = 1.0;

    if (law.tail_kind() == TailKind::PowerPmf) {
        s_ = 1.0 + law.alpha();
        accept_scale_ = 1.0 / cell_ratio(static_cast<double>(hi_ + 1), s_);
    } else if (law.tail_kind() == TailKind::PowerCells) {
        double acc = 0.0;
        for (const auto& c : law.cells()) {
            acc += c.coef * std::pow(static_cast<double>(hi_) + c.theta, -law.alpha());
            cell_cdf_.push_back(acc);
        }
        for (auto& v : cell_cdf_) v /= acc;
    }
}

long StepSampler::sample_right(Philox4x32& rng) const {
    const double a = law_->alpha();
    if (law_->tail_kind() == TailKind::PowerPmf) {
        const double start = static_cast<double>(hi_ + 1);
        for (;;) {
            const double x = start * std::pow(rng.uniform(), -1.0 / (s_ - 1.0));
            if (!(x < 1e18)) return kHuge;
            const double n = std::floor(x);
            if (rng.uniform() <= cell_ratio(n, s_) * accept_scale_) return static_cast<long>(n);
        }
    }
    const double u = rng.uniform();
    std::size_t i = static_cast<std::size_t>(std::lower_bound(cell_cdf_.begin(), cell_cdf_.end(), u) - cell_cdf_.begin());
    i = std::min(i, cell_cdf_.size() - 1);
    const double theta = law_->cells()[i].theta;
    // P(X > x) = ((x + theta)/(hi + theta))^{-alpha}; ceil keeps P(N > r) = P(X > r)
    const double x = (static_cast<double>(hi_) + theta) * std::pow(rng.uniform(), -1.0 / a) - theta;
    if (!(x < 1e18)) return kHuge;
    return std::max(hi_ + 1, static_cast<long>(std::ceil(x)));
}

long StepSampler::sample(Philox4x32& rng) const {
    const std::size_t N = prob_.size();
    const double x = (rng.uniform() - 0x1.0p-53) * static_cast<double>(N);
    std::size_t i = std::min(static_cast<std::size_t>(x), N - 1);
    std::size_t bin = i;
    if (x - static_cast<double>(i) >= prob_[i]) bin = alias_[i];
    const std::size_t nb = N - 2;
    if (bin == nb) {
        const double k = std::floor(std::log(rng.uniform()) / std::log(law_->geom_q()));
        return law_->core_lo() - 1 - static_cast<long>(std::min(k, 1e15));
    }
    if (bin == nb + 1) return sample_right(rng);
    return lo_ + static_cast<long>(bin);
}

McEstimate estimate_u(const StepLaw& law, const std::vector<long>& targets, long replicas, std::uint64_t master_seed,
                      long stop_level) {
    if (targets.empty()) throw std::invalid_argument("estimate_u: no targets");
    if (replicas < 2) throw std::invalid_argument("estimate_u: need at least 2 replicas");
    const double mu = law.mu();
    if (!(mu > 0.0)) throw std::invalid_argument("estimate_u: drift must be positive");
    const long tmin = *std::min_element(targets.begin(), targets.end());
    const long tmax = *std::max_element(targets.begin(), targets.end());

    double scale = std::max(1.0, -static_cast<double>(law.core_lo()));
    if (law.has_geometric()) scale += 1.0 / (1.0 - law.geom_q());
    const long margin = static_cast<long>(20.0 * std::ceil(1.0 / mu) * std::ceil(scale));
    if (stop_level <= 0) {
        long d = margin;
        while (law.return_bound(static_cast<double>(d + 1)) > 1e-9 && d < (1L << 40)) d *= 2;
        stop_level = tmax + d;
    } else if (stop_level < tmax + margin) {
        throw std::invalid_argument("estimate_u: stop_level below max(targets) + margin");
    }

    McEstimate out;
    out.targets = targets;
    out.replicas = replicas;
    out.master_seed = master_seed;
    out.stop_level = stop_level;
    out.bias_bound = law.return_bound(static_cast<double>(stop_level + 1 - tmax));

    StepSampler sampler(law);
    const std::size_t nt = targets.size();
    std::vector<int> slot(static_cast<std::size_t>(tmax - tmin + 1), -1);
    for (std::size_t i = 0; i < nt; ++i) slot[static_cast<std::size_t>(targets[i] - tmin)] = static_cast<int>(i);

    // integer sums merge exactly in any order
    std::vector<unsigned long long> sum(nt, 0), sumsq(nt, 0);
    unsigned long long steps_total = 0;
#pragma omp parallel
    {
        std::vector<unsigned long long> ls(nt, 0), lq(nt, 0);
        std::vector<unsigned long long> cnt(nt, 0);
        unsigned long long lsteps = 0;
#pragma omp for schedule(dynamic, 256)
        for (long r = 0; r < replicas; ++r) {
            Philox4x32 rng(master_seed, static_cast<std::uint64_t>(r));
            std::fill(cnt.begin(), cnt.end(), 0ULL);
            long s = 0;
            while (s <= stop_level) {
                if (s >= tmin && s <= tmax) {
                    const int k = slot[static_cast<std::size_t>(s - tmin)];
                    if (k >= 0) ++cnt[static_cast<std::size_t>(k)];
                }
                s += sampler.sample(rng);
                ++lsteps;
            }
            for (std::size_t i = 0; i < nt; ++i) {
                ls[i] += cnt[i];
                lq[i] += cnt[i] * cnt[i];
            }
        }
#pragma omp critical
        {
            for (std::size_t i = 0; i < nt; ++i) {
                sum[i] += ls[i];
                sumsq[i] += lq[i];
            }
            steps_total += lsteps;
        }
    }

    const long double R = static_cast<long double>(replicas);
    out.estimate.resize(nt);
    out.se.resize(nt);
    for (std::size_t i = 0; i < nt; ++i) {
        const long double m = static_cast<long double>(sum[i]) / R;
        const long double var = (static_cast<long double>(sumsq[i]) - R * m * m) / (R - 1.0L);
        out.estimate[i] = static_cast<double>(m);
        out.se[i] = static_cast<double>(std::sqrt(std::max(var, 0.0L) / R));
    }
    out.mean_steps = static_cast<double>(static_cast<long double>(steps_total) / R);

    double min_se = INFINITY;
    for (double v : out.se)
        if (v > 0.0) min_se = std::min(min_se, v);
    if (std::isfinite(min_se) && out.bias_bound > 0.5 * min_se)
        throw std::runtime_error("estimate_u: bias bound exceeds se/2; raise stop_level");
    return out;
}

}  // namespace rrl
