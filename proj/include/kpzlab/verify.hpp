#pragma once

// The acceptance criteria as a runnable registry: criteria 1-8 are exact
// algebra, 9-14 Monte Carlo, 15 the oracle cross-checks.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "kpzlab/manifest.hpp"

namespace kpz {

enum class VerifyTier { Exact, Mc, All };
enum class Budget { Fast, Full };

const char* to_string(VerifyTier t);
const char* to_string(Budget b);

enum class Relation { Within, AtLeast, AtMost };

struct Check {
    std::string label;
    double measured = 0.0;
    double target = 0.0;
    double tolerance = 0.0;  // Within: |measured - target| <= tolerance; bounds ignore it
    double error = 0.0;      // statistical error of `measured`, 0 for exact checks
    Relation relation = Relation::Within;
    bool pass = false;
};

struct CriterionResult {
    int id = 0;
    std::string title;
    bool monte_carlo = false;
    bool pass = false;
    std::vector<Check> checks;
    std::string note;  // config echo or the error that stopped the run
    double seconds = 0.0;
};

struct VerifyOptions {
    VerifyTier tier = VerifyTier::All;
    Budget budget = Budget::Full;
    std::uint64_t seed = 42;
    unsigned threads = 0;
    std::vector<int> only;  // empty: every criterion of the tier
};

/// Fast budgets cut sample counts and widen each statistical tolerance by
/// sqrt(full samples / fast samples).
std::vector<CriterionResult> run_verification(const VerifyOptions& options,
                                              const std::function<void(const CriterionResult&)>& on_result = {});

/// "PASS  9 Percolation hull ...", one line per criterion.
std::string summary_line(const CriterionResult& r);

Json to_json(const CriterionResult& r);

}  // namespace kpz
