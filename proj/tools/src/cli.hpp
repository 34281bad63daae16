#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace survbma::cli {

/// Entry point behind main(). Exit codes: 0 success, 2 configuration or
/// validation error, 3 numerical failure. Errors are written to `err` as
/// single-line JSON.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace survbma::cli
