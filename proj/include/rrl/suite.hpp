#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace rrl {

struct CriterionResult {
    int id = 0;
    std::string title;
    bool pass = false;
    std::string measured;
    std::string threshold;
    std::string note;
    double seconds = 0.0;
};

struct SuiteConfig {
    std::string spec_dir;
    std::string out_dir;
    std::uint64_t seed = 1;
    long replicas = 1000000;
};

struct SuiteReport {
    std::vector<CriterionResult> results;
    bool all_pass() const;
};

// Runs the acceptance criteria, writes their CSV tables, manifest.json,
// summary.json and summary.txt to out_dir. Progress lines go to `log`.
SuiteReport run_suite(const SuiteConfig& cfg, std::ostream& log);

// CSV text of a small fixed workload run with the given thread count; used
// to check that results do not depend on it.
std::string determinism_probe(const std::string& spec_dir, std::uint64_t seed, int threads);

}  // namespace rrl
