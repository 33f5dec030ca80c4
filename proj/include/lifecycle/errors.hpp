#pragma once

#include <stdexcept>
#include <string>

namespace lifecycle {

// Not enough observations for the requested estimation.
struct InsufficientDataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A required input file is missing or unreadable.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Degenerate numeric input (constant series, zero norm, ...).
struct DegenerateInputError : std::domain_error {
    using std::domain_error::domain_error;
};

} // namespace lifecycle
