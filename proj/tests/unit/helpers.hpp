#pragma once

#include <string>

#include "rrl/lawspec.hpp"
#include "rrl/steplaw.hpp"

namespace testing {

inline std::string spec_path(const std::string& name) { return std::string(RRL_SPEC_DIR) + "/" + name; }

inline rrl::StepLaw shipped(const std::string& name) { return *rrl::parse_spec_file(spec_path(name)).law; }

inline rrl::StepLaw power_law(double alpha) {
    rrl::LeftSpec left;
    left.kind = rrl::LeftSpec::Kind::Atoms;
    left.atoms = {{-1, 0.2}};
    return rrl::StepLaw::power(alpha, 0.8, left);
}

inline rrl::StepLaw one_sided(double alpha) { return rrl::StepLaw::power(alpha, 1.0, rrl::LeftSpec{}); }

}  // namespace testing
