#pragma once

// Deterministic property checks against independent oracles: finite
// differences, brute-force sums and closed forms. No training involved.

#include <string>
#include <vector>

namespace nlspinn {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

// Network jets against central differences and the loss gradient against
// directional differences, over 100 random draws.
CheckResult check_jets_and_gradient(int draws = 100);
// Closed-form solutions satisfy the equation on 50x50 grids.
CheckResult check_exact_residuals();
// Identity at t=0, conservation, Gaussian closed form, semigroup.
CheckResult check_propagator();
// Brute-force nested means, homogeneity, weight monotonicity, the (8,4) pair.
CheckResult check_functionals();
// Quadratic, Rosenbrock and bit-identical repeat runs.
CheckResult check_optimizer();
// Split-step soliton accuracy and second-order convergence.
CheckResult check_oracle();
// Scalar and AVX2 kernels agree on a full loss gradient.
CheckResult check_isa_equivalence();

std::vector<CheckResult> run_property_suite();

}  // namespace nlspinn
