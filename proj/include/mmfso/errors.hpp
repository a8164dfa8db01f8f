#pragma once

#include <stdexcept>
#include <string>

namespace mmfso {

/// Invalid or inconsistent user configuration (maps to CLI exit code 2).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what, int line = 0)
        : std::runtime_error(what), line_(line) {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

/// A computation produced a non-finite value or lost all significant digits
/// (maps to CLI exit code 3).
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An iterative or integral evaluation did not reach its accuracy target.
class ConvergenceError : public NumericError {
public:
    using NumericError::NumericError;
};

}  // namespace mmfso
