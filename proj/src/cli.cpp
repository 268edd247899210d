#include "rrl/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <optional>
#include <sstream>

#include "rrl/charfn.hpp"
#include "rrl/density.hpp"
#include "rrl/expansion.hpp"
#include "rrl/fft.hpp"
#include "rrl/lawspec.hpp"
#include "rrl/mcoracle.hpp"
#include "rrl/renewal.hpp"
#include "rrl/report.hpp"
#include "rrl/special.hpp"
#include "rrl/suite.hpp"

#ifndef RRL_DEFAULT_SPEC_DIR
#define RRL_DEFAULT_SPEC_DIR "specs"
#endif

namespace rrl {

namespace {

struct RunConfig {
    std::string subcommand;
    std::string spec;
    std::optional<long> n_max;
    std::optional<double> t_max;
    std::optional<long> grid_m;
    std::optional<double> tol;
    std::optional<int> k_max;
    std::uint64_t seed = 1;
    std::optional<long> replicas;
    std::string out = "rrl_out";
};

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void validate(const RunConfig& c) {
    if (c.n_max && *c.n_max <= 0) throw UsageError("--n-max must be positive");
    if (c.t_max && !(*c.t_max > 0.0)) throw UsageError("--t-max must be positive");
    if (c.grid_m && (*c.grid_m < 1024 || (*c.grid_m & (*c.grid_m - 1)) != 0))
        throw UsageError("--grid-m must be a power of two >= 1024");
    if (c.tol && !(*c.tol >= 1e-12 && *c.tol <= 1e-3)) throw UsageError("--tol must lie in [1e-12, 1e-3]");
    if (c.k_max && *c.k_max <= 0) throw UsageError("--k-max must be positive");
    if (c.replicas && *c.replicas < 2) throw UsageError("--replicas must be at least 2");
    if (c.seed == 0) throw UsageError("--seed must be positive");
}

// Buffered outputs, written only after the whole command succeeded.
struct Outputs {
    Manifest manifest;
    std::vector<std::pair<std::string, CsvTable>> files;
    void add(std::string name, CsvTable t) { files.emplace_back(std::move(name), std::move(t)); }
    void flush(const std::string& dir) const {
        for (const auto& [name, t] : files) write_csv(dir, name, t, manifest);
        write_text(dir, "manifest.json", manifest.dump());
    }
};

void base_manifest(Outputs& o, const RunConfig& c, const ParsedSpec* spec) {
    auto& m = o.manifest.data();
    m["version"] = kVersion;
    m["subcommand"] = c.subcommand;
    if (spec) m["spec"] = spec->canonical();
    if (c.n_max) m["n_max"] = *c.n_max;
    if (c.t_max) m["t_max"] = *c.t_max;
    if (c.grid_m) m["grid_m"] = *c.grid_m;
    if (c.tol) m["tol"] = *c.tol;
    if (c.k_max) m["k_max"] = *c.k_max;
    if (c.replicas) m["replicas"] = *c.replicas;
    m["seed"] = c.seed;
}

const StepLaw& need_law(const ParsedSpec& s) {
    if (!s.law) throw UsageError("this command needs a lattice law spec (family = power or atoms)");
    return *s.law;
}

std::size_t auto_grid(long n_max) { return std::max<std::size_t>(next_pow2(32 * static_cast<std::size_t>(n_max)), 1024); }

int cmd_law_info(const RunConfig& c, std::ostream& out) {
    const ParsedSpec s = parse_spec_file(c.spec);
    Outputs o;
    base_manifest(o, c, &s);
    if (s.kind == ParsedSpec::Kind::Density) {
        const DensityFamily f(s.density);
        out << "family cont_power\nalpha " << fmt(f.alpha()) << "\nmu " << fmt(f.mu()) << "\nmu_plus "
            << fmt(f.mu_plus()) << "\nmu_minus " << fmt(f.mu_minus()) << "\n";
        CsvTable t;
        t.columns = {"t", "fbar", "fcdf"};
        for (double x : {-10.0, -1.0, 0.0, 1.0, 10.0, 100.0, 1000.0}) t.rows.push_back({fmt(x), fmt(f.fbar(x)), fmt(f.fcdf(x))});
        o.add("law_tail.csv", t);
        o.flush(c.out);
        return 0;
    }
    const StepLaw& L = need_law(s);
    const auto& m = L.moments();
    out << L.describe() << "\nalpha " << fmt(L.alpha()) << "\nmu " << fmt(m.mu) << " (+- " << fmt(m.mu_bound)
        << ")\nmu_plus " << fmt(m.mu_plus) << "\nmu_minus " << fmt(m.mu_minus) << "\n";
    std::vector<long> grid = {-3, -2, -1, 0};
    for (long n : decades(1, c.n_max.value_or(100000))) grid.push_back(n);
    const CsvTable t = law_tail_csv(L, grid);
    out << "n,pmf,fbar,fcdf\n";
    for (const auto& row : t.rows) out << row[0] << "," << row[1] << "," << row[2] << "," << row[3] << "\n";
    o.add("law_tail.csv", t);
    o.flush(c.out);
    return 0;
}

int cmd_renewal(const RunConfig& c, std::ostream& out) {
    const ParsedSpec s = parse_spec_file(c.spec);
    const StepLaw& L = need_law(s);
    const long n_max = c.n_max.value_or(10000);
    const double tol = c.tol.value_or(1e-8);
    const std::size_t M = c.grid_m ? static_cast<std::size_t>(*c.grid_m) : auto_grid(n_max);
    if (M < 32 * static_cast<std::size_t>(n_max)) throw UsageError("--grid-m must be at least 32 * n_max");

    const RenewalTable dbl = u_by_doubling(L, 0, n_max, tol);
    const DifferenceTable dt = delta_by_inversion(L, n_max, M, std::min(tol, 1e-10));
    const RenewalTable inv = u_from_delta(dt, 0, n_max);
    double diff = 0.0;
    for (long n = 0; n <= n_max; ++n) diff = std::max(diff, std::abs(dbl.u.at(n) - inv.u.at(n)));
    const double budget = dbl.u.err_budget + inv.u.err_budget;
    const bool agree = diff <= budget;

    Outputs o;
    base_manifest(o, c, &s);
    o.manifest.data()["grid_m"] = M;
    o.manifest.data()["budgets"] = {{"doubling", dbl.u.err_budget}, {"inversion", inv.u.err_budget}};
    for (const RenewalTable* t : {&dbl, &inv}) {
        CsvTable csv = u_csv(*t, 0, n_max);
        csv.add_meta("agreement_max_abs_diff", diff);
        csv.add_meta("agreement_budget", budget);
        csv.add_meta("agreement", agree ? "pass" : "fail");
        o.add(std::string("u_") + method_name(t->method) + ".csv", std::move(csv));
    }
    std::vector<long> grid;
    for (long n : decades(1, n_max)) grid.push_back(-n);
    std::reverse(grid.begin(), grid.end());
    for (long n : decades(1, n_max)) grid.push_back(n);
    o.add("delta.csv", delta_csv(dt, L, grid));
    o.flush(c.out);
    out << "doubling err " << fmt(dbl.u.err_budget) << "\ninversion err " << fmt(inv.u.err_budget)
        << "\nmax |u_doubling - u_inversion| " << fmt(diff) << "\nagreement " << (agree ? "pass" : "fail") << "\n";
    return agree ? 0 : 1;
}

int cmd_expansion(const RunConfig& c, std::ostream& out) {
    const ParsedSpec s = parse_spec_file(c.spec);
    const StepLaw& L = need_law(s);
    const long n_max = c.n_max.value_or(100000);
    if (n_max < 10) throw UsageError("--n-max must be at least 10 for expansion");
    const int rs = r_star(L.alpha());
    const int k_max = c.k_max.value_or(rs);
    if (k_max > rs) throw UsageError("--k-max exceeds r* = " + std::to_string(rs));
    const ExpansionTable table = phibar(L, k_max, n_max);

    // u columns where an inversion at M = 2^22 reaches
    const long u_hi = std::min(n_max, 100000L);
    const std::size_t M = c.grid_m ? static_cast<std::size_t>(*c.grid_m) : auto_grid(u_hi);
    if (M < 32 * static_cast<std::size_t>(u_hi)) throw UsageError("--grid-m must be at least 32 * min(n_max, 1e5)");
    const DifferenceTable dt = delta_by_inversion(L, u_hi, M, c.tol.value_or(1e-10));
    const RenewalTable u = u_from_delta(dt, 0, u_hi);

    std::vector<long> grid = decades(10, n_max);
    if (grid.back() != n_max) grid.push_back(n_max);
    const auto rows = diagnostics(L, table, &u.u, grid);
    Outputs o;
    base_manifest(o, c, &s);
    o.manifest.data()["budgets"] = {{"inversion.u_err", u.u.err_budget}};
    CsvTable t = expansion_csv(rows, u_hi);
    const auto cst = constants(L.alpha());
    for (std::size_t k = 0; k < cst.c.size(); ++k) t.add_meta("c_" + std::to_string(k + 1), cst.c[k]);
    out << "mu " << fmt(L.mu()) << "\nr* " << rs << "\n";
    for (const auto& r : rows) {
        out << "n " << r.n << " phibar_1 " << fmt(r.phibar[0]);
        for (std::size_t k = 0; k < r.ratio.size(); ++k) out << " ratio_" << k + 2 << " " << fmt(r.ratio[k]);
        if (r.n <= u_hi) out << " e_star " << fmt(r.e_star);
        out << "\n";
    }
    o.add("expansion.csv", std::move(t));
    o.flush(c.out);
    return 0;
}

int cmd_charfn(const RunConfig& c, std::ostream& out) {
    const ParsedSpec s = parse_spec_file(c.spec);
    const StepLaw& L = need_law(s);
    const double t_max = c.t_max.value_or(1e-2);
    std::vector<double> ts;
    for (double t = t_max; t >= 1e-5 * (1 - 1e-9); t /= 10.0) ts.push_back(t);
    if (ts.empty()) throw UsageError("--t-max must be at least 1e-5");
    const auto rows = small_t_checks(L, ts);
    Outputs o;
    base_manifest(o, c, &s);
    CsvTable t = small_t_csv(rows);
    if (c.grid_m) {
        CharFnGrid grid = build_grid(L, static_cast<std::size_t>(*c.grid_m), c.tol.value_or(1e-10));
        derive(grid, 1);
        double ident = 0.0, min_gap = INFINITY;
        for (std::size_t j = 1; j < grid.M; ++j) {
            ident = std::max(ident, std::abs(grid.deltahat[j] + 1.0 / (grid.mu * grid.phihat[j])));
            min_gap = std::min(min_gap, std::abs(1.0 - grid.phat[j]));
        }
        t.add_meta("grid_m", std::to_string(grid.M));
        t.add_meta("grid_identity_residual", ident);
        t.add_meta("grid_min_abs_one_minus_phat", min_gap);
        t.add_meta("grid_trunc_bound", grid.trunc_bound);
        out << "grid M " << grid.M << " identity residual " << fmt(ident) << " min |1 - p^| " << fmt(min_gap) << "\n";
    }
    for (const auto& r : rows)
        out << "t " << fmt(r.t) << " |R1-1| " << fmt(std::abs(r.ratio1 - 1.0)) << " |R2-1| "
            << fmt(std::abs(r.ratio2 - 1.0)) << "\n";
    o.add("small_t.csv", std::move(t));
    o.flush(c.out);
    return 0;
}

int cmd_mc(const RunConfig& c, std::ostream& out) {
    const ParsedSpec s = parse_spec_file(c.spec);
    const StepLaw& L = need_law(s);
    const long n_max = c.n_max.value_or(10000);
    if (n_max < 10) throw UsageError("--n-max must be at least 10 for mc");
    const auto targets = geometric_grid(10, n_max, 40);
    const McEstimate est = estimate_u(L, targets, c.replicas.value_or(100000), c.seed);
    Outputs o;
    base_manifest(o, c, &s);
    o.manifest.data()["stop_level"] = est.stop_level;
    o.manifest.data()["budgets"] = {{"bias_bound", est.bias_bound}};
    for (std::size_t i = 0; i < targets.size(); ++i)
        out << "n " << targets[i] << " u " << fmt(est.estimate[i]) << " se " << fmt(est.se[i]) << "\n";
    o.add("mc.csv", mc_csv(est));
    o.flush(c.out);
    return 0;
}

int cmd_density(const RunConfig& c, std::ostream& out) {
    const ParsedSpec s = parse_spec_file(c.spec);
    if (s.kind != ParsedSpec::Kind::Density) throw UsageError("density needs a cont_power spec");
    const DensityFamily fam(s.density);
    const double t_max = c.t_max.value_or(1e5);
    if (t_max < 100.0) throw UsageError("--t-max must be at least 100 for density");
    DiscretizeOptions opt;
    opt.t_ratio_max = t_max;
    opt.t_u_max = std::min(t_max, 1e4);
    if (c.tol) opt.tol = *c.tol;
    const double h = 0.1 * s.density.x0;
    const GridRun coarse = discretize(fam, h, opt);
    const GridRun fine = discretize(fam, 0.5 * h, opt);
    std::vector<double> ts;
    for (double t = 100.0; t <= t_max * (1 + 1e-12); t *= 10.0) ts.push_back(t);
    const ContDiagnostics d = cont_diagnostics(fam, coarse, fine, ts);
    Outputs o;
    base_manifest(o, c, &s);
    o.manifest.data()["h"] = {h, 0.5 * h};
    o.manifest.data()["budgets"] = {{"coarse.u_err", coarse.u.u.err_budget}, {"fine.u_err", fine.u.u.err_budget}};
    out << "mu " << fmt(d.mu) << "\n";
    for (const auto& r : d.rows) {
        out << "t " << fmt(r.t) << " phibar_1 " << fmt(r.phibar1[1]);
        if (!r.ratio.empty()) out << " ratio_2 " << fmt(r.ratio[0][0]) << " / " << fmt(r.ratio[0][1]);
        out << " mu Delta/phi " << fmt(r.delta_ratio[1]) << " gap " << fmt(r.max_rel_gap) << "\n";
    }
    o.add("density.csv", density_csv(d));
    o.flush(c.out);
    return 0;
}

int cmd_verify(const RunConfig& c, std::ostream& out, std::ostream& err) {
    SuiteConfig sc;
    sc.spec_dir = c.spec.empty() ? RRL_DEFAULT_SPEC_DIR : c.spec;
    if (!std::filesystem::is_directory(sc.spec_dir)) throw UsageError("spec directory not found: " + sc.spec_dir);
    sc.out_dir = c.out;
    sc.seed = c.seed;
    sc.replicas = c.replicas.value_or(1000000);
    const SuiteReport rep = run_suite(sc, err);
    for (const auto& r : rep.results)
        out << (r.pass ? "PASS" : "FAIL") << " " << r.id << " " << r.title << ": " << r.measured
            << (r.note.empty() ? "" : " [" + r.note + "]") << "\n";
    return rep.all_pass() ? 0 : 1;
}

}  // namespace

int dispatch(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Renewal sequences of random walks with regularly varying steps"};
    app.require_subcommand(1);
    RunConfig c;

    auto spec = [&](CLI::App* s, bool required) {
        auto* o = s->add_option("--spec", c.spec, required ? "law or density spec file" : "directory of spec files");
        if (required) o->required();
    };
    auto add_n = [&](CLI::App* s) { s->add_option("--n-max", c.n_max, "largest index"); };
    auto add_t = [&](CLI::App* s) { s->add_option("--t-max", c.t_max, "largest t"); };
    auto add_m = [&](CLI::App* s) { s->add_option("--grid-m", c.grid_m, "transform grid size (power of two)"); };
    auto add_tol = [&](CLI::App* s) { s->add_option("--tol", c.tol, "target absolute error"); };
    auto add_out = [&](CLI::App* s) { s->add_option("--out", c.out, "output directory")->capture_default_str(); };
    auto add_seed = [&](CLI::App* s) { s->add_option("--seed", c.seed, "master seed")->capture_default_str(); };
    auto add_rep = [&](CLI::App* s) { s->add_option("--replicas", c.replicas, "Monte Carlo replicas"); };

    auto* law_info = app.add_subcommand("law-info", "moments and tail table of a law");
    spec(law_info, true); add_n(law_info); add_out(law_info);
    auto* renewal = app.add_subcommand("renewal", "u_n by doubling and by inversion, with their agreement");
    spec(renewal, true); add_n(renewal); add_m(renewal); add_tol(renewal); add_out(renewal);
    auto* expansion = app.add_subcommand("expansion", "expansion terms Phibar_k and remainder diagnostics");
    spec(expansion, true); add_n(expansion); add_m(expansion); add_tol(expansion); add_out(expansion);
    expansion->add_option("--k-max", c.k_max, "number of terms (default r*)");
    auto* charfn = app.add_subcommand("charfn", "small-t characteristic function ratios");
    spec(charfn, true); add_t(charfn); add_m(charfn); add_tol(charfn); add_out(charfn);
    auto* mc = app.add_subcommand("mc", "Monte Carlo estimate of u on a geometric target grid");
    spec(mc, true); add_n(mc); add_seed(mc); add_rep(mc); add_out(mc);
    auto* density = app.add_subcommand("density", "continuous family by lattice refinement");
    spec(density, true); add_t(density); add_tol(density); add_out(density);
    auto* verify = app.add_subcommand("verify", "run the acceptance suite");
    spec(verify, false); add_seed(verify); add_rep(verify); add_out(verify);

    try {
        app.parse(argc, argv);
        c.subcommand = app.get_subcommands().front()->get_name();
        validate(c);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return 2;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }

    configure_threads_from_env();
    try {
        const std::string& s = c.subcommand;
        if (s == "law-info") return cmd_law_info(c, out);
        if (s == "renewal") return cmd_renewal(c, out);
        if (s == "expansion") return cmd_expansion(c, out);
        if (s == "charfn") return cmd_charfn(c, out);
        if (s == "mc") return cmd_mc(c, out);
        if (s == "density") return cmd_density(c, out);
        return cmd_verify(c, out, err);
    } catch (const SpecError& e) {
        err << "spec error: " << e.what() << "\n";
        return 2;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "failed: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace rrl
