#include <doctest.h>
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "helpers.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
    int code = -1;
    std::string output;
};

Run run(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + (env.empty() ? "" : " ") + std::string(RRL_CLI_PATH) + " " + args + " 2>&1";
    Run r;
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    char buf[4096];
    std::size_t got;
    while ((got = fread(buf, 1, sizeof buf, p)) > 0) r.output.append(buf, got);
    const int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

fs::path scratch(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / ("rrl_cli_test_" + name);
    fs::remove_all(d);
    return d;
}

}  // namespace

TEST_CASE("unknown flag: usage error, nothing written") {
    const auto out = scratch("unknown");
    const auto r = run("renewal --spec " + testing::spec_path("twoatom.law") + " --bogus 1 --out " + out.string());
    CHECK(r.code == 2);
    CHECK(r.output.find("--bogus") != std::string::npos);
    CHECK_FALSE(fs::exists(out));
}

TEST_CASE("malformed spec names the offending line") {
    const auto dir = scratch("badspec");
    fs::create_directories(dir);
    {
        std::ofstream f(dir / "bad.law");
        f << "# comment\nfamily = power\nalpha = banana\n";
    }
    const auto r = run("law-info --spec " + (dir / "bad.law").string() + " --out " + (dir / "o").string());
    CHECK(r.code == 2);
    CHECK(r.output.find("bad.law:3") != std::string::npos);
    CHECK_FALSE(fs::exists(dir / "o"));
    fs::remove_all(dir);
}

TEST_CASE("tolerance range is enforced") {
    const auto out = scratch("tol");
    CHECK(run("renewal --spec " + testing::spec_path("twoatom.law") + " --tol 1e-20 --out " + out.string()).code == 2);
    CHECK(run("renewal --spec " + testing::spec_path("twoatom.law") + " --tol 0.5 --out " + out.string()).code == 2);
    CHECK_FALSE(fs::exists(out));
}

TEST_CASE("law-info prints moments and writes the tail table") {
    const auto out = scratch("lawinfo");
    const auto r = run("law-info --spec " + testing::spec_path("power15.law") + " --out " + out.string());
    CHECK(r.code == 0);
    CHECK(r.output.find("mu_plus") != std::string::npos);
    const auto csv = slurp(out / "law_tail.csv");
    CHECK(csv.rfind("#meta manifest_sha256=", 0) == 0);
    CHECK(csv.find("n,pmf,fbar,fcdf\n") != std::string::npos);
    CHECK(fs::exists(out / "manifest.json"));
    fs::remove_all(out);
}

TEST_CASE("renewal stamps agreement and the manifest hash") {
    const auto out = scratch("renewal");
    const auto r = run("renewal --spec " + testing::spec_path("power15.law") + " --n-max 500 --out " + out.string());
    CHECK(r.code == 0);
    CHECK(r.output.find("agreement pass") != std::string::npos);
    for (const char* name : {"u_doubling.csv", "u_inversion.csv"}) {
        const auto csv = slurp(out / name);
        CAPTURE(name);
        CHECK(csv.find("#meta agreement=pass\n") != std::string::npos);
        CHECK(csv.find("n,u,err,method\n") != std::string::npos);
        const auto first = csv.substr(0, csv.find('\n'));
        CHECK(first.size() == std::string("#meta manifest_sha256=").size() + 64);
    }
    CHECK(slurp(out / "delta.csv").find("n,delta,delta2,n_delta,ratio_prop_b,ratio_prop_b_plus\n") != std::string::npos);
    fs::remove_all(out);
}

TEST_CASE("identical runs give identical bytes") {
    const auto a = scratch("det_a"), b = scratch("det_b");
    const std::string args = "mc --spec " + testing::spec_path("power15.law") + " --n-max 100 --replicas 2000 --seed 9";
    REQUIRE(run(args + " --out " + a.string(), "RRL_THREADS=2").code == 0);
    REQUIRE(run(args + " --out " + b.string(), "RRL_THREADS=1").code == 0);
    CHECK(slurp(a / "mc.csv") == slurp(b / "mc.csv"));
    CHECK(slurp(a / "manifest.json") == slurp(b / "manifest.json"));
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("missing subcommand is a usage error") { CHECK(run("").code == 2); }
