#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace vmcoal {

// Full command-line front end.  Returns the process exit code: 0 success,
// 1 failed validation suite, 2 invalid input, 3 no convergence, 64 usage.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace vmcoal
