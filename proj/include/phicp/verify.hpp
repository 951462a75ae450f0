#pragma once

#include <string>
#include <vector>

namespace phicp::verify {

// One oracle-equivalence or invariant check; detail carries the
// counterexample when it fails.
struct PropertyResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

std::vector<PropertyResult> phi_calculus();
std::vector<PropertyResult> prox();
std::vector<PropertyResult> monitors();
std::vector<PropertyResult> tomo_geometry();

// suite name -> results; throws invalid_argument for an unknown suite
std::vector<PropertyResult> run_suite(const std::string& name);

bool all_passed(const std::vector<PropertyResult>& results);

}  // namespace phicp::verify
