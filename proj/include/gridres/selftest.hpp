#pragma once

#include <string>
#include <vector>

namespace gridres {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Runs the invariant suites of every module. With fast = true the heavy
/// oracle sweeps (50x50 error maps, 201x201 grids) are skipped.
std::vector<CheckResult> run_selftest(bool fast);

}  // namespace gridres
