#pragma once

#include <stdexcept>
#include <string>

namespace survbma {

/// Invalid user-supplied configuration or data. The CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Numerical failure: non-convergence, singular matrices, degenerate inputs.
/// The CLI maps this to exit code 3.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace survbma
