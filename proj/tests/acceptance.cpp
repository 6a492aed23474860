// Acceptance gate: runs every property suite once, grades the release
// criteria, and prints one verdict line per criterion.  Exits nonzero if any
// criterion fails.  All tolerances live in the suite implementations.

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "vmcoal/validate.hpp"

using namespace vmcoal;

namespace {

struct Criterion {
    int number;
    std::string description;
    // (suite, check) pairs; an empty check name selects the whole suite.
    std::vector<std::pair<std::string, std::string>> selectors;
};

using CheckMap = std::map<std::pair<std::string, std::string>, CheckResult>;

CheckMap index_checks(const std::vector<SuiteResult>& suites) {
    CheckMap map;
    for (const SuiteResult& s : suites)
        for (const CheckResult& c : s.checks) map[{s.suite, c.name}] = c;
    return map;
}

std::vector<const CheckResult*> select(const CheckMap& map, const std::vector<SuiteResult>& suites,
                                       const std::pair<std::string, std::string>& sel) {
    std::vector<const CheckResult*> out;
    if (sel.second.empty()) {
        for (const SuiteResult& s : suites)
            if (s.suite == sel.first)
                for (const CheckResult& c : s.checks) out.push_back(&c);
        return out;
    }
    const auto it = map.find(sel);
    if (it != map.end()) out.push_back(&it->second);
    return out;
}

std::string suite_csv(const SuiteResult& r) {
    std::ostringstream ss;
    write_suite_csv(r, ss);
    return ss.str();
}

}  // namespace

int main() {
    const ValidateOptions opts;  // pinned seed, single worker
    std::cout << "running property suites (seed " << opts.seed << ") ..." << std::endl;

    const std::vector<SuiteResult> suites{
        validate_trees(opts),    validate_inversion(opts), validate_kinetics(opts),
        validate_simulator(opts), validate_mst(opts),
    };
    const CheckMap map = index_checks(suites);
    write_suites_csv(suites, "acceptance_checks.csv");

    const std::vector<Criterion> criteria{
        {1,
         "tree enumerator: four methods agree, integer paths exact, pinned counts",
         {{"trees", "method-agreement"},
          {"trees", "method-zero-agreement"},
          {"trees", "integer-paths-equal"},
          {"trees", "cayley-counts"},
          {"trees", "bipartite-counts"},
          {"trees", "uniform-multipartite-counts"}}},
        {2,
         "tree identities: merge recursion, partition form, multinomial sum, eigenweight form",
         {{"trees", "merge-recursion"},
          {"trees", "partition-form-recursion"},
          {"trees", "abel-multinomial-sum"},
          {"trees", "eigenweight-closed-form"}}},
        {3, "inversion: round trip, minimality, method agreement, benchmark, curve decay",
         {{"inversion", ""}}},
        {4,
         "kinetics: closed form vs ODE, density residual, mass laws, moment identities",
         {{"kinetics", "closed-vs-ode"},
          {"kinetics", "density-residual"},
          {"kinetics", "mass-conservation"},
          {"kinetics", "mass-decay"},
          {"kinetics", "moments-truncated-sum"},
          {"kinetics", "moments-divergence"},
          {"kinetics", "moments-flow-derivative"}}},
        {5,
         "gelation times at pinned kernels",
         {{"kinetics", "gel-time-scalar"},
          {"kinetics", "gel-time-bipartite"},
          {"kinetics", "gel-time-bipartite-scaled"}}},
        {6, "simulator: ensemble densities within 3 s.e. of the closed form, error scaling",
         {{"simulator", ""}}},
        {7, "spanning-tree length: series and Monte Carlo at their limits", {{"mst", ""}}},
        {8, "determinism: suites rerun byte-identically under a different thread fan-out", {}},
    };

    int failures = 0;
    for (const Criterion& cr : criteria) {
        if (cr.number == 8) continue;  // graded separately below
        int total = 0, passed = 0;
        std::string first_fail;
        for (const auto& sel : cr.selectors) {
            const auto checks = select(map, suites, sel);
            if (checks.empty()) {
                first_fail = "missing check " + sel.first + "/" + sel.second;
                ++total;
                continue;
            }
            for (const CheckResult* c : checks) {
                ++total;
                if (c->pass) {
                    ++passed;
                } else if (first_fail.empty()) {
                    char buf[160];
                    std::snprintf(buf, sizeof(buf), "%s/%s measured=%.6g limit=%.6g",
                                  sel.first.c_str(), c->name.c_str(), c->measured, c->limit);
                    first_fail = buf;
                }
            }
        }
        const bool ok = total > 0 && passed == total;
        if (!ok) ++failures;
        std::cout << (ok ? "[PASS]" : "[FAIL]") << " criterion " << cr.number << ": "
                  << cr.description << " (" << passed << "/" << total << " checks";
        if (!ok && !first_fail.empty()) std::cout << "; first failure: " << first_fail;
        std::cout << ")" << std::endl;
    }

    // Criterion 8: identical options except the worker count must reproduce
    // every suite's CSV byte for byte.
    {
        ValidateOptions rerun = opts;
        rerun.threads = 3;
        const std::vector<SuiteResult> again{
            validate_trees(rerun),    validate_inversion(rerun), validate_kinetics(rerun),
            validate_simulator(rerun), validate_mst(rerun),
        };
        int mismatches = 0;
        std::string which;
        for (size_t i = 0; i < suites.size(); ++i) {
            if (suite_csv(suites[i]) != suite_csv(again[i])) {
                ++mismatches;
                if (which.empty()) which = suites[i].suite;
            }
        }
        const bool ok = mismatches == 0;
        if (!ok) ++failures;
        std::cout << (ok ? "[PASS]" : "[FAIL]")
                  << " criterion 8: determinism: suites rerun byte-identically under a different"
                     " thread fan-out ("
                  << (suites.size() - mismatches) << "/" << suites.size() << " suites";
        if (!ok) std::cout << "; first mismatch: " << which;
        std::cout << ")" << std::endl;
    }

    if (failures == 0) {
        std::cout << "acceptance: all criteria satisfied" << std::endl;
        return 0;
    }
    std::cout << "acceptance: " << failures << " criterion(s) failed" << std::endl;
    return 1;
}
