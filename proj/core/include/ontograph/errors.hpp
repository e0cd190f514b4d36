#pragma once

#include <stdexcept>
#include <string>

namespace ontograph {

/// Malformed input: bad files, bad config, shape mismatches caused by the
/// caller. Maps to process exit code 2 in the CLI.
class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numeric failure during computation (non-finite values, divergence).
/// Maps to process exit code 3 in the CLI.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace ontograph
