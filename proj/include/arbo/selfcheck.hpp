#pragma once

#include <string>
#include <vector>

namespace arbo {

struct CheckResult {
    int criterion = 0;
    std::string name;
    bool pass = false;
    std::string detail;                    // deterministic summary
    std::vector<std::string> diagnostics;  // deterministic extra lines
    double seconds = 0.0;                  // wall time, excluded from reports
};

constexpr int kCriterionCount = 10;

// Criteria 1..9 run in-process; 10 needs the command-line tool and is run
// by the acceptance harness.
CheckResult run_criterion(int n);
std::vector<int> in_process_criteria();

}  // namespace arbo
