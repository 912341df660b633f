#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace harmcalc {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

/// Runs every module's invariant checks (exact identities, property sweeps,
/// Monte Carlo cross-checks) and reports one result per check. Fully
/// deterministic for a given seed.
std::vector<CheckResult> run_verification_suite(std::uint64_t seed);

}  // namespace harmcalc
