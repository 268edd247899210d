#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "rrl/charfn.hpp"
#include "rrl/density.hpp"
#include "rrl/expansion.hpp"
#include "rrl/mcoracle.hpp"
#include "rrl/renewal.hpp"

namespace rrl {

inline constexpr const char* kVersion = "rrl 1.0.0";

// 17 significant digits, so values round-trip; "nan", "inf", "-inf" otherwise.
std::string fmt(double x);

std::string sha256_hex(const std::string& bytes);

// Run parameters and budgets. Everything in it must be a function of the
// configuration, never of timing or thread count, so its hash is stable.
class Manifest {
public:
    nlohmann::json& data() { return data_; }
    const nlohmann::json& data() const { return data_; }
    std::string dump() const { return data_.dump(2) + "\n"; }
    std::string hash() const { return sha256_hex(data_.dump()); }

private:
    nlohmann::json data_ = nlohmann::json::object();
};

struct CsvTable {
    std::vector<std::pair<std::string, std::string>> meta;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void add_meta(const std::string& key, const std::string& value) { meta.emplace_back(key, value); }
    void add_meta(const std::string& key, double value) { meta.emplace_back(key, fmt(value)); }
    std::string render(const std::string& manifest_hash) const;
};

// Writes dir/name; creates dir if needed.
void write_text(const std::string& dir, const std::string& name, const std::string& text);
void write_csv(const std::string& dir, const std::string& name, const CsvTable& table, const Manifest& manifest);

CsvTable u_csv(const RenewalTable& table, long lo, long hi);
CsvTable delta_csv(const DifferenceTable& dt, const StepLaw& law, const std::vector<long>& grid);
// u-dependent columns read nan for n > u_hi.
CsvTable expansion_csv(const std::vector<DiagRow>& rows, long u_hi);
CsvTable small_t_csv(const std::vector<SmallTRow>& rows);
CsvTable mc_csv(const McEstimate& est);
CsvTable density_csv(const ContDiagnostics& diag);
CsvTable law_tail_csv(const StepLaw& law, const std::vector<long>& grid);

std::vector<long> geometric_grid(long lo, long hi, int points);
std::vector<long> decades(long lo, long hi);

}  // namespace rrl
