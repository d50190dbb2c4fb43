#pragma once

#include <stdexcept>
#include <string>

namespace spme {

// Precondition or configuration violations (bad sizes, out-of-range exponents, unknown keys).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Non-finite state, blow-up or step-budget exhaustion during integration.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace spme
