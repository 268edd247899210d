#include "rrl/density.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "rrl/fft.hpp"
#include "rrl/special.hpp"

namespace rrl {

namespace {

// n with n h = x, or throw
long lattice_index(double x, double h, const char* what) {
    const double r = x / h;
    const long n = std::lround(r);
    if (std::abs(r - static_cast<double>(n)) > 1e-9 * std::max(1.0, std::abs(r))) {
        std::ostringstream os;
        os << "density: " << what << " = " << x << " is not a multiple of h = " << h;
        throw std::invalid_argument(os.str());
    }
    return n;
}

// triangular density on [-h0, h0]
double tri_cdf(double x, double h0) {
    if (x <= -h0) return 0.0;
    if (x >= h0) return 1.0;
    const double y = x / h0;
    return y <= 0.0 ? 0.5 * (1.0 + y) * (1.0 + y) : 1.0 - 0.5 * (1.0 - y) * (1.0 - y);
}

}  // namespace

DensityFamily::DensityFamily(const DensitySpec& spec) : spec_(spec) {
    if (!(spec.alpha > 1.0 && spec.alpha < 2.0)) throw std::invalid_argument("density: alpha must lie in (1,2)");
    if (!(spec.x0 > 0.0)) throw std::invalid_argument("density: x0 must be positive");
    if (!(spec.left_rate > 0.0)) throw std::invalid_argument("density: left_rate must be positive");
    if (!(spec.left_mass >= 0.0 && spec.left_mass < 1.0)) throw std::invalid_argument("density: left_mass must lie in [0,1)");
    if (!(spec.smoothing_width >= 0.0)) throw std::invalid_argument("density: smoothing_width must be >= 0");
    if (!(mu() > 0.0)) throw std::invalid_argument("density: drift must be positive");
}

double DensityFamily::mu_plus() const {
    return (1.0 - spec_.left_mass) * spec_.x0 * spec_.alpha / (spec_.alpha - 1.0);
}

double DensityFamily::mu_minus() const { return spec_.left_mass / spec_.left_rate; }

double DensityFamily::fbar(double x) const {
    const double w = spec_.left_mass;
    if (x < 0.0) return 1.0 - w * std::exp(spec_.left_rate * x);
    if (x < spec_.x0) return 1.0 - w;
    return (1.0 - w) * std::pow(x / spec_.x0, -spec_.alpha);
}

double DensityFamily::fcdf(double x) const {
    if (x < 0.0) return spec_.left_mass * std::exp(spec_.left_rate * x);
    return 1.0 - fbar(x);
}

StepLaw DensityFamily::lattice(double h) const {
    if (!(h > 0.0) || h > spec_.x0 / 8.0 * (1.0 + 1e-12)) throw std::invalid_argument("density: need 0 < h <= x0/8");
    const long m0 = lattice_index(spec_.x0, h, "x0");
    const long m = spec_.smoothing_width > 0.0 ? lattice_index(spec_.smoothing_width, h, "smoothing_width") : 0;
    const double a = spec_.alpha;
    const double w = spec_.left_mass;
    const double q = std::exp(-spec_.left_rate * h);
    const double one_q = -std::expm1(-spec_.left_rate * h);
    const double sq = std::sqrt(q);
    const double tail_coef = (1.0 - w) * std::pow(static_cast<double>(m0), a);

    // P(X in ((n - 1/2) h, (n + 1/2) h]) before smoothing
    auto base = [&](long n) -> double {
        if (n <= -1) return w * one_q * sq * std::pow(q, static_cast<double>(-n - 1));
        if (n == 0) return -w * std::expm1(-0.5 * spec_.left_rate * h);
        if (n < m0) return 0.0;
        if (n == m0) return -(1.0 - w) * std::expm1(-a * std::log1p(0.5 / static_cast<double>(m0)));
        const double r = static_cast<double>(n) + 0.5;
        // (r-1)^{-a} - r^{-a} without cancellation
        return tail_coef * std::pow(r, -a) * std::expm1(-a * std::log1p(-1.0 / r));
    };

    if (m == 0) {
        std::vector<double> core(static_cast<std::size_t>(m0 + 1), 0.0);
        for (long n = 0; n <= m0; ++n) core[static_cast<std::size_t>(n)] = base(n);
        return StepLaw::general(a, 0, std::move(core), TailKind::PowerCells, 0.0, {PowerCell{tail_coef, 0.5}}, w > 0.0,
                                w * one_q * sq, q);
    }

    // kernel cell masses kappa_j = P(K in ((j - 1/2) h, (j + 1/2) h]), |j| <= m
    const double h0 = spec_.smoothing_width;
    std::vector<double> kappa;
    for (long j = -m; j <= m; ++j)
        kappa.push_back(tri_cdf((static_cast<double>(j) + 0.5) * h, h0) - tri_cdf((static_cast<double>(j) - 0.5) * h, h0));
    auto kap = [&](long j) { return kappa[static_cast<std::size_t>(j + m)]; };

    const long lo = -m, hi = m0 + m;
    std::vector<double> core(static_cast<std::size_t>(hi - lo + 1), 0.0);
    for (long n = lo; n <= hi; ++n) {
        long double s = 0.0L;
        for (long j = -m; j <= m; ++j) s += static_cast<long double>(kap(j)) * base(n - j);
        core[static_cast<std::size_t>(n - lo)] = static_cast<double>(s);
    }
    std::vector<PowerCell> cells;
    double geo = 0.0;
    for (long j = -m; j <= m; ++j) {
        cells.push_back(PowerCell{tail_coef * kap(j), 0.5 - static_cast<double>(j)});
        geo += kap(j) * std::pow(q, static_cast<double>(j));
    }
    return StepLaw::general(a, lo, std::move(core), TailKind::PowerCells, 0.0, std::move(cells), w > 0.0,
                            w * one_q * sq * std::pow(q, static_cast<double>(m)) * geo, q);
}

GridRun discretize(const DensityFamily& family, double h, const DiscretizeOptions& opt) {
    GridRun run;
    run.h = h;
    run.law = family.lattice(h);
    if (!(run.law.mu() > 0.0)) throw std::runtime_error("discretize: induced drift is not positive");
    const long n_ratio = static_cast<long>(std::ceil(opt.t_ratio_max / h));
    const long n_u = static_cast<long>(std::ceil(opt.t_u_max / h));
    run.expansion = phibar(run.law, r_star(family.alpha()), n_ratio);
    const std::size_t M = std::max<std::size_t>(next_pow2(32 * static_cast<std::size_t>(n_u)), std::size_t{1} << 20);
    run.inversion = delta_by_inversion(run.law, n_u, M, opt.tol);
    run.u = u_from_delta(run.inversion, 0, n_u);
    return run;
}

ContDiagnostics cont_diagnostics(const DensityFamily& family, const GridRun& coarse, const GridRun& fine,
                                 const std::vector<double>& t_grid, double max_gap) {
    if (std::abs(fine.h - 0.5 * coarse.h) > 1e-12 * coarse.h)
        throw std::invalid_argument("cont_diagnostics: the fine run must use h/2");
    ContDiagnostics out;
    const double beta = family.alpha() - 1.0;
    const int rs = r_star(family.alpha());
    for (int k = 1; k <= rs; ++k) out.c.push_back(c_const(k, beta));
    out.mu = family.mu();
    const double nan = std::nan("");
    const GridRun* runs[2] = {&coarse, &fine};

    for (double t : t_grid) {
        ContRow row;
        row.t = t;
        row.ratio.assign(static_cast<std::size_t>(std::max(rs - 1, 0)), {nan, nan});
        row.phibar1 = row.first_order = row.e_star = row.e_star_norm = row.delta_ratio = row.delta_ratio_plus = {nan, nan};
        for (int r = 0; r < 2; ++r) {
            const GridRun& g = *runs[r];
            const long n = lattice_index(t, g.h, "t");
            const double mu_lat = g.law.mu();
            if (n <= g.expansion.n_max) {
                const double p1 = g.expansion.at(1, n);
                row.phibar1[r] = p1;
                for (int k = 2; k <= rs; ++k)
                    row.ratio[static_cast<std::size_t>(k - 2)][r] = g.expansion.at(k, n) / std::pow(p1, k);
            }
            if (n <= g.u.u.hi && n <= g.inversion.expansion.n_max) {
                // lattice quantities are the continuum ones read with mu = mu_lat h
                const double un = g.u.u.at(n);
                const double p1 = g.inversion.expansion.at(1, n);
                row.first_order[r] = mu_lat * (un - 1.0 / mu_lat) / p1;
                double e = mu_lat * un - 1.0;
                for (int k = 1; k <= std::min(rs, g.inversion.expansion.k_max); ++k) e -= g.inversion.expansion.at(k, n);
                row.e_star[r] = e;
                row.e_star_norm[r] = e / std::pow(p1, rs);
                const double dn = g.inversion.delta.at(n);
                const double fb = g.law.fbar(n);
                row.delta_ratio[r] = mu_lat * mu_lat * dn / fb;
                row.delta_ratio_plus[r] = mu_lat * family.mu_plus() * dn / (g.h * fb);
            }
        }
        // e* vanishes, so only the ratio-type columns are gated
        auto gap = [&](const std::array<double, 2>& v) {
            if (std::isfinite(v[0]) && std::isfinite(v[1]) && v[1] != 0.0)
                row.max_rel_gap = std::max(row.max_rel_gap, std::abs(v[0] - v[1]) / std::abs(v[1]));
        };
        for (const auto& v : row.ratio) gap(v);
        gap(row.phibar1);
        gap(row.first_order);
        gap(row.delta_ratio);
        out.rows.push_back(std::move(row));
    }
    for (const auto& row : out.rows) {
        if (row.max_rel_gap > max_gap) {
            std::ostringstream os;
            os << "cont_diagnostics: h-refinement moves a diagnostic by " << row.max_rel_gap << " at t = " << row.t
               << " (limit " << max_gap << ")";
            throw std::runtime_error(os.str());
        }
    }
    return out;
}

}  // namespace rrl
