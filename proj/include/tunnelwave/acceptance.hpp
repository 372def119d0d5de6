#pragma once

#include <functional>
#include <string>
#include <vector>

namespace tw {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0;
};

// Runs the full acceptance pipeline on the canonical configuration
// (eckart(1,1), window [0.7,0.9], g=30, e0=0.78, J=0, P=1) at desk scale.
// Tolerances are pinned in the implementation. on_done fires after each
// criterion; artifacts (CSV summaries) go to out_dir when non-empty.
// `only` restricts to the listed criterion ids (empty: all).
std::vector<CriterionResult> run_acceptance(
    const std::string& out_dir,
    const std::function<void(const CriterionResult&)>& on_done,
    const std::vector<int>& only = {});

} // namespace tw
