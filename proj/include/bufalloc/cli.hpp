#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bufalloc {

/// Runs one CLI invocation. Exit codes: 0 safe/sufficient/nonblocking/
/// yes, 1 unsafe/insufficient/blocking/no, 2 usage or input error,
/// 3 state limit exceeded.
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
            std::ostream& err);

}  // namespace bufalloc
