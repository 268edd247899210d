#include "rrl/lawspec.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <vector>

namespace rrl {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_real(const std::string& v, const std::string& origin, int line, const std::string& key) {
    const std::string t = trim(v);
    char* end = nullptr;
    errno = 0;
    double x = std::strtod(t.c_str(), &end);
    if (t.empty() || errno != 0 || end != t.c_str() + t.size() || !std::isfinite(x))
        throw SpecError(origin, line, "key '" + key + "': expected a real number, got '" + v + "'");
    return x;
}

long parse_int(const std::string& v, const std::string& origin, int line, const std::string& key) {
    const std::string t = trim(v);
    char* end = nullptr;
    errno = 0;
    long x = std::strtol(t.c_str(), &end, 10);
    if (t.empty() || errno != 0 || end != t.c_str() + t.size())
        throw SpecError(origin, line, "key '" + key + "': expected an integer, got '" + v + "'");
    return x;
}

// "(a:b,c:d)" -> {(a,b),(c,d)}
std::vector<std::pair<long, double>> parse_atom_list(const std::string& v, const std::string& origin, int line,
                                                     const std::string& key) {
    std::string t = trim(v);
    if (t.size() < 2 || t.front() != '(' || t.back() != ')')
        throw SpecError(origin, line, "key '" + key + "': expected (n:mass,...), got '" + v + "'");
    t = t.substr(1, t.size() - 2);
    std::vector<std::pair<long, double>> out;
    std::stringstream ss(t);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto colon = item.find(':');
        if (colon == std::string::npos)
            throw SpecError(origin, line, "key '" + key + "': atom '" + trim(item) + "' lacks ':'");
        out.emplace_back(parse_int(item.substr(0, colon), origin, line, key),
                         parse_real(item.substr(colon + 1), origin, line, key));
    }
    if (out.empty()) throw SpecError(origin, line, "key '" + key + "': empty atom list");
    return out;
}

LeftSpec parse_left(const std::string& v, const std::string& origin, int line) {
    LeftSpec left;
    const std::string t = trim(v);
    if (t == "none" || t.empty()) return left;
    if (t.rfind("atoms:", 0) == 0) {
        left.kind = LeftSpec::Kind::Atoms;
        left.atoms = parse_atom_list(t.substr(6), origin, line, "left");
        return left;
    }
    if (t.rfind("geom:", 0) == 0) {
        std::string body = trim(t.substr(5));
        if (body.size() < 2 || body.front() != '(' || body.back() != ')')
            throw SpecError(origin, line, "key 'left': expected geom:(q=..,mass=..)");
        body = body.substr(1, body.size() - 2);
        std::stringstream ss(body);
        std::string item;
        bool have_q = false, have_mass = false;
        while (std::getline(ss, item, ',')) {
            auto eq = item.find('=');
            if (eq == std::string::npos) throw SpecError(origin, line, "key 'left': geom field '" + trim(item) + "' lacks '='");
            const std::string name = trim(item.substr(0, eq));
            const double val = parse_real(item.substr(eq + 1), origin, line, "left");
            if (name == "q") {
                left.q = val;
                have_q = true;
            } else if (name == "mass") {
                left.mass = val;
                have_mass = true;
            } else {
                throw SpecError(origin, line, "key 'left': unknown geom field '" + name + "'");
            }
        }
        if (!have_q || !have_mass) throw SpecError(origin, line, "key 'left': geom needs q and mass");
        left.kind = LeftSpec::Kind::Geometric;
        return left;
    }
    throw SpecError(origin, line, "key 'left': expected atoms:(...), geom:(...) or none, got '" + v + "'");
}

}  // namespace

std::string ParsedSpec::canonical() const {
    std::string out;
    for (const auto& [k, v] : entries) out += k + "=" + v + "\n";
    return out;
}

ParsedSpec parse_spec_text(const std::string& text, const std::string& origin) {
    static const std::set<std::string> lattice_keys = {"family", "alpha", "right_mass", "left", "n_store", "atoms"};
    static const std::set<std::string> density_keys = {"family",    "alpha",     "x0",
                                                       "left_rate", "left_mass", "smoothing_width"};
    std::map<std::string, std::pair<std::string, int>> kv;
    std::stringstream ss(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(ss, raw)) {
        ++line_no;
        std::string line = raw;
        if (auto hash = line.find('#'); hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw SpecError(origin, line_no, "expected 'key = value', got '" + trim(raw) + "'");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key.empty()) throw SpecError(origin, line_no, "empty key");
        if (kv.count(key)) throw SpecError(origin, line_no, "duplicate key '" + key + "'");
        kv[key] = {val, line_no};
    }
    auto it = kv.find("family");
    if (it == kv.end()) throw SpecError(origin, line_no, "missing key 'family'");
    const std::string family = it->second.first;
    const int family_line = it->second.second;

    ParsedSpec out;
    for (const auto& [k, v] : kv) out.entries[k] = v.first;
    auto get = [&](const std::string& key) -> const std::pair<std::string, int>& {
        auto f = kv.find(key);
        if (f == kv.end()) throw SpecError(origin, family_line, "family '" + family + "' requires key '" + key + "'");
        return f->second;
    };

    if (family == "power" || family == "atoms") {
        for (const auto& [k, v] : kv)
            if (!lattice_keys.count(k)) throw SpecError(origin, v.second, "unknown key '" + k + "' for family " + family);
        {
            if (family == "power") {
                if (kv.count("atoms")) throw SpecError(origin, kv["atoms"].second, "key 'atoms' not allowed for family power");
                const auto& a = get("alpha");
                const double alpha = parse_real(a.first, origin, a.second, "alpha");
                if (!(alpha > 1.0 && alpha <= 2.0)) throw SpecError(origin, a.second, "alpha must lie in (1,2]");
                const auto& rm = get("right_mass");
                const double right_mass = parse_real(rm.first, origin, rm.second, "right_mass");
                LeftSpec left;
                int left_line = family_line;
                if (auto l = kv.find("left"); l != kv.end()) {
                    left = parse_left(l->second.first, origin, l->second.second);
                    left_line = l->second.second;
                }
                long n_store = 4096;
                if (auto n = kv.find("n_store"); n != kv.end()) {
                    n_store = parse_int(n->second.first, origin, n->second.second, "n_store");
                    if (n_store < 16) throw SpecError(origin, n->second.second, "n_store must be >= 16");
                }
                try {
                    out.law = StepLaw::power(alpha, right_mass, left, n_store);
                } catch (const std::invalid_argument& e) {
                    throw SpecError(origin, left_line, e.what());
                }
            } else {
                const auto& a = get("atoms");
                auto atoms = parse_atom_list(a.first, origin, a.second, "atoms");
                try {
                    out.law = StepLaw::atoms(atoms);
                } catch (const std::invalid_argument& e) {
                    throw SpecError(origin, a.second, e.what());
                }
            }
        }
        out.kind = ParsedSpec::Kind::Lattice;
        return out;
    }
    if (family == "cont_power") {
        for (const auto& [k, v] : kv)
            if (!density_keys.count(k)) throw SpecError(origin, v.second, "unknown key '" + k + "' for family cont_power");
        DensitySpec d;
        auto real_key = [&](const std::string& key, double& dst, auto ok, const char* msg) {
            const auto& e = get(key);
            dst = parse_real(e.first, origin, e.second, key);
            if (!ok(dst)) throw SpecError(origin, e.second, msg);
        };
        real_key("alpha", d.alpha, [](double x) { return x > 1.0 && x < 2.0; }, "alpha must lie in (1,2)");
        real_key("x0", d.x0, [](double x) { return x > 0.0; }, "x0 must be positive");
        real_key("left_rate", d.left_rate, [](double x) { return x > 0.0; }, "left_rate must be positive");
        real_key("left_mass", d.left_mass, [](double x) { return x >= 0.0 && x < 1.0; }, "left_mass must lie in [0,1)");
        if (kv.count("smoothing_width"))
            real_key("smoothing_width", d.smoothing_width, [](double x) { return x >= 0.0; },
                     "smoothing_width must be >= 0");
        out.kind = ParsedSpec::Kind::Density;
        out.density = d;
        return out;
    }
    throw SpecError(origin, family_line, "unknown family '" + family + "'");
}

ParsedSpec parse_spec_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SpecError(path, 0, "cannot open spec file");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_spec_text(buf.str(), path);
}

}  // namespace rrl
