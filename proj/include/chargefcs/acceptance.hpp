#pragma once

#include <string>
#include <vector>

namespace chargefcs::acceptance {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    /// Measured values, tolerances and any caveat, on one line.
    std::string detail;
    double seconds = 0.0;
};

/// Tolerances and problem sizes are fixed in the implementation; there are no knobs.
CriterionResult analytic_self_consistency();     // 1
CriterionResult sep_sampler_vs_analytics();      // 2
CriterionResult kurtosis_decay();                // 3
CriterionResult keystone_equality();             // 4
CriterionResult spinwave_asymptote();            // 5
CriterionResult discrete_scaling();              // 6
CriterionResult weingarten_vs_haar();            // 7
CriterionResult quantum_self_averaging();        // 8
CriterionResult determinism();                   // 9

/// Runs the selected criteria (all when `ids` is empty) in order.
std::vector<CriterionResult> run(const std::vector<int>& ids = {});

/// "[PASS] 3 kurtosis decay (12.3 s): <detail>"
std::string format(const CriterionResult& r);

/// Weighted least squares y = A f(x) + B g(x); returns {A, B, sigma_A, sigma_B, chi2}.
struct TwoTermFit {
    double a = 0.0, b = 0.0, sigma_a = 0.0, sigma_b = 0.0, chi2 = 0.0;
};
TwoTermFit fit_two_terms(const std::vector<double>& f, const std::vector<double>& g, const std::vector<double>& y,
                         const std::vector<double>& sigma);

}  // namespace chargefcs::acceptance
