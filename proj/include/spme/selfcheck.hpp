#pragma once

#include <string>
#include <vector>

namespace spme {

struct CheckResult {
    std::string name;
    bool pass;
    double value;      // measured worst case
    double threshold;  // pass when value <= threshold
};

struct SelfcheckOptions {
    // Relative eigenvalue perturbation injected into every spectral basis (negative control).
    double fault = 0.0;
    std::size_t samples = 200;
};

// Eigenpair, coercivity, Poincare, norm-equivalence and ratio-suite checks.
std::vector<CheckResult> run_selfcheck(const SelfcheckOptions& options = {});

}  // namespace spme
