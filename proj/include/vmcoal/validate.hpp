#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace vmcoal {

// One named check: pass is the stored comparison outcome (direction depends
// on the check), measured/limit document it, detail carries context.
struct CheckResult {
    std::string name;
    bool pass = false;
    double measured = 0.0;
    double limit = 0.0;
    std::string detail;
};

struct SuiteResult {
    std::string suite;
    std::vector<CheckResult> checks;
    bool pass() const;
};

struct ValidateOptions {
    std::uint64_t seed = 424243;
    int threads = 1;
};

// Property suites.  Deterministic given (seed, threads-independent layout);
// rerunning with the same options reproduces every measured value exactly.
SuiteResult validate_trees(const ValidateOptions& opts = {});
SuiteResult validate_inversion(const ValidateOptions& opts = {});
SuiteResult validate_kinetics(const ValidateOptions& opts = {});
SuiteResult validate_simulator(const ValidateOptions& opts = {});
SuiteResult validate_mst(const ValidateOptions& opts = {});

// suite in {trees, inversion, kinetics, simulator, mst, all}.
std::vector<SuiteResult> validate_suites(const std::string& suite,
                                         const ValidateOptions& opts = {});

// RFC-4180 rows: suite,check,measured,limit,pass,detail (17 significant digits).
void write_suite_csv(const SuiteResult& r, std::ostream& os);
void write_suites_csv(const std::vector<SuiteResult>& rs, const std::string& path);

}  // namespace vmcoal
