#include "rrl/report.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace rrl {

std::string fmt(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string sha256_hex(const std::string& bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256 failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

std::string CsvTable::render(const std::string& manifest_hash) const {
    std::ostringstream os;
    os << "#meta manifest_sha256=" << manifest_hash << "\n";
    for (const auto& [k, v] : meta) os << "#meta " << k << "=" << v << "\n";
    for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
    os << "\n";
    for (const auto& row : rows) {
        if (row.size() != columns.size()) throw std::logic_error("csv: row width does not match the header");
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
        os << "\n";
    }
    return os.str();
}

void write_text(const std::string& dir, const std::string& name, const std::string& text) {
    std::filesystem::create_directories(dir);
    const auto path = std::filesystem::path(dir) / name;
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
    f << text;
    if (!f) throw std::runtime_error("write failed: " + path.string());
}

void write_csv(const std::string& dir, const std::string& name, const CsvTable& table, const Manifest& manifest) {
    write_text(dir, name, table.render(manifest.hash()));
}

CsvTable u_csv(const RenewalTable& table, long lo, long hi) {
    CsvTable t;
    t.add_meta("mu", table.mu);
    for (const auto& [k, v] : table.ledger) t.add_meta("budget." + k, v);
    t.columns = {"n", "u", "err", "method"};
    const std::string err = fmt(table.u.err_budget);
    const std::string m = method_name(table.method);
    lo = std::max(lo, table.u.lo);
    hi = std::min(hi, table.u.hi);
    for (long n = lo; n <= hi; ++n) t.rows.push_back({std::to_string(n), fmt(table.u.at(n)), err, m});
    return t;
}

CsvTable delta_csv(const DifferenceTable& dt, const StepLaw& law, const std::vector<long>& grid) {
    CsvTable t;
    t.add_meta("mu", dt.mu);
    t.add_meta("delta_err", dt.delta.err_budget);
    t.add_meta("ratio_prop_b", "mu*delta/phi");
    t.add_meta("ratio_prop_b_plus", "mu*delta/phi_plus");
    t.columns = {"n", "delta", "delta2", "n_delta", "ratio_prop_b", "ratio_prop_b_plus"};
    if (grid.empty()) return t;
    long lo = grid.front(), hi = grid.front();
    for (long n : grid) {
        lo = std::min(lo, n);
        hi = std::max(hi, n);
    }
    const WindowSeq d2 = delta2(dt, lo, hi);
    t.add_meta("delta2_err", d2.err_budget);
    for (const auto& r : prop_diagnostics(dt, law, grid)) {
        t.rows.push_back({std::to_string(r.n), fmt(r.delta), fmt(d2.at(r.n)), fmt(r.n_delta),
                          r.ratio_phi ? fmt(*r.ratio_phi) : "nan", r.ratio_phi_plus ? fmt(*r.ratio_phi_plus) : "nan"});
    }
    return t;
}

CsvTable expansion_csv(const std::vector<DiagRow>& rows, long u_hi) {
    CsvTable t;
    if (rows.empty()) return t;
    const std::size_t K = rows.front().phibar.size();
    const bool boundary = rows.back().mu2.has_value();
    t.columns.push_back("n");
    for (std::size_t k = 1; k <= K; ++k) t.columns.push_back("phibar_" + std::to_string(k));
    for (const char* c : {"partial_sum", "u", "d", "first_order"}) t.columns.push_back(c);
    for (std::size_t k = 2; k <= K; ++k) t.columns.push_back("ratio_" + std::to_string(k));
    t.columns.push_back("e_star");
    t.columns.push_back("e_star_err");
    if (boundary) {
        t.columns.push_back("mu2");
        t.columns.push_back("third");
    }
    for (const auto& r : rows) {
        const bool has_u = r.n <= u_hi;
        auto uv = [&](double v) { return has_u ? fmt(v) : std::string("nan"); };
        std::vector<std::string> row{std::to_string(r.n)};
        for (double v : r.phibar) row.push_back(fmt(v));
        row.push_back(fmt(r.partial_sum));
        row.push_back(uv(r.u));
        row.push_back(uv(r.d));
        row.push_back(uv(r.first_order));
        for (double v : r.ratio) row.push_back(fmt(v));
        row.push_back(uv(r.e_star));
        row.push_back(uv(r.e_star_err));
        if (boundary) {
            row.push_back(r.mu2 ? fmt(*r.mu2) : "nan");
            row.push_back(has_u && r.third ? fmt(*r.third) : "nan");
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

CsvTable small_t_csv(const std::vector<SmallTRow>& rows) {
    CsvTable t;
    t.columns = {"t", "re_ratio1", "im_ratio1", "re_ratio2", "im_ratio2"};
    for (const auto& r : rows)
        t.rows.push_back({fmt(r.t), fmt(r.ratio1.real()), fmt(r.ratio1.imag()), fmt(r.ratio2.real()), fmt(r.ratio2.imag())});
    return t;
}

CsvTable mc_csv(const McEstimate& est) {
    CsvTable t;
    t.add_meta("replicas", std::to_string(est.replicas));
    t.add_meta("master_seed", std::to_string(est.master_seed));
    t.add_meta("stop_level", std::to_string(est.stop_level));
    t.add_meta("mean_steps", est.mean_steps);
    t.columns = {"n", "u_mc", "se", "bias_bound"};
    for (std::size_t i = 0; i < est.targets.size(); ++i)
        t.rows.push_back({std::to_string(est.targets[i]), fmt(est.estimate[i]), fmt(est.se[i]), fmt(est.bias_bound)});
    return t;
}

CsvTable density_csv(const ContDiagnostics& diag) {
    CsvTable t;
    t.add_meta("mu", diag.mu);
    for (std::size_t k = 0; k < diag.c.size(); ++k) t.add_meta("c_" + std::to_string(k + 1), diag.c[k]);
    t.add_meta("suffix", "_h is the coarse step h, _h2 is h/2");
    if (diag.rows.empty()) return t;
    const std::size_t nr = diag.rows.front().ratio.size();
    t.columns.push_back("t");
    for (const char* sfx : {"_h", "_h2"}) {
        t.columns.push_back(std::string("phibar_1") + sfx);
        for (std::size_t k = 0; k < nr; ++k) t.columns.push_back("ratio_" + std::to_string(k + 2) + sfx);
        for (const char* c : {"first_order", "e_star", "e_star_norm", "delta_ratio", "delta_ratio_plus"})
            t.columns.push_back(std::string(c) + sfx);
    }
    t.columns.push_back("max_rel_gap");
    for (const auto& r : diag.rows) {
        std::vector<std::string> row{fmt(r.t)};
        for (int i = 0; i < 2; ++i) {
            row.push_back(fmt(r.phibar1[i]));
            for (const auto& v : r.ratio) row.push_back(fmt(v[i]));
            for (const auto* v : {&r.first_order, &r.e_star, &r.e_star_norm, &r.delta_ratio, &r.delta_ratio_plus})
                row.push_back(fmt((*v)[i]));
        }
        row.push_back(fmt(r.max_rel_gap));
        t.rows.push_back(std::move(row));
    }
    return t;
}

CsvTable law_tail_csv(const StepLaw& law, const std::vector<long>& grid) {
    CsvTable t;
    t.add_meta("alpha", law.alpha());
    t.add_meta("mu", law.mu());
    t.add_meta("mu_plus", law.moments().mu_plus);
    t.add_meta("mu_minus", law.moments().mu_minus);
    t.columns = {"n", "pmf", "fbar", "fcdf"};
    for (long n : grid) t.rows.push_back({std::to_string(n), fmt(law.pmf(n)), fmt(law.fbar(n)), fmt(law.fcdf(n))});
    return t;
}

std::vector<long> geometric_grid(long lo, long hi, int points) {
    if (lo < 1 || hi < lo || points < 2) throw std::invalid_argument("geometric_grid: need 1 <= lo <= hi and points >= 2");
    std::vector<long> g;
    const double r = std::log(static_cast<double>(hi) / static_cast<double>(lo)) / (points - 1);
    for (int i = 0; i < points; ++i) {
        const long n = i == points - 1 ? hi : std::lround(static_cast<double>(lo) * std::exp(r * i));
        if (g.empty() || n > g.back()) g.push_back(n);
    }
    return g;
}

std::vector<long> decades(long lo, long hi) {
    std::vector<long> g;
    for (long n = lo; n <= hi; n *= 10) g.push_back(n);
    return g;
}

}  // namespace rrl
