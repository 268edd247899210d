#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include "rrl/steplaw.hpp"

namespace rrl {

class SpecError : public std::runtime_error {
public:
    SpecError(const std::string& origin, int line, const std::string& what)
        : std::runtime_error(origin + ":" + std::to_string(line) + ": " + what), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

struct DensitySpec {
    double alpha = 1.4;
    double x0 = 1.0;
    double left_rate = 1.0;
    double left_mass = 0.2;
    double smoothing_width = 0.0;
};

struct ParsedSpec {
    enum class Kind { Lattice, Density } kind = Kind::Lattice;
    std::optional<StepLaw> law;
    DensitySpec density;
    std::map<std::string, std::string> entries;  // normalized key -> value
    std::string canonical() const;
};

// Law spec text: one "key = value" per line, '#' starts a comment.
ParsedSpec parse_spec_text(const std::string& text, const std::string& origin = "<spec>");
ParsedSpec parse_spec_file(const std::string& path);

}  // namespace rrl
