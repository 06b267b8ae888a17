#pragma once

#include <stdexcept>
#include <string>

namespace toepsim {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid argument or violated precondition.
struct ArgumentError : Error {
    using Error::Error;
};

// Bad experiment configuration; carries the offending field name.
struct ConfigError : Error {
    explicit ConfigError(const std::string& field_name, const std::string& what)
        : Error(what), field(field_name) {}
    std::string field;
};

// Non-finite values, failed convergence, and similar numerical trouble.
struct NumericError : Error {
    using Error::Error;
};

// Requested search space exceeds a hard capacity guard.
struct CapacityError : Error {
    using Error::Error;
};

// Channel matrix is (numerically) rank deficient.
struct SingularChannelError : Error {
    using Error::Error;
};

// File read/write failure; message includes the path.
struct IoError : Error {
    using Error::Error;
};

}  // namespace toepsim
