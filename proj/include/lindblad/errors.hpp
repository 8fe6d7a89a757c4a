// errors.hpp — Exception types shared across the toolkit

#pragma once

#include <stdexcept>
#include <string>

namespace lindblad {

// Bad input: malformed model files, expression errors, mismatched spaces,
// out-of-range arguments. Maps to CLI exit code 2.
struct model_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Numerical-tolerance failure: rank mismatches between dual nullspaces,
// ill-conditioned Gram matrices, positivity violations beyond tolerance,
// eigensolver breakdowns. Maps to CLI exit code 3.
struct numerical_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace lindblad
