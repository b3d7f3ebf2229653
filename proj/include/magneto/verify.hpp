#pragma once

#include <string>
#include <vector>

#include "magneto/config.hpp"

namespace magneto {

struct VerifyRow {
    std::string name;
    bool pass = false;
    std::string detail;
};

/// Runs the cross-module invariant suite on the configured scenario.
std::vector<VerifyRow> run_verify(const ExperimentConfig& cfg);

}  // namespace magneto
