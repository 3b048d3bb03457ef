#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace flock {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Invalid parameters, malformed config documents, out-of-range fields.
struct ConfigError : Error {
    ConfigError(std::string field, const std::string& what)
        : Error(field.empty() ? what : field + ": " + what), field_(std::move(field)) {}
    const std::string& field() const { return field_; }

  private:
    std::string field_;
};

/// Inputs with mismatched shapes or broken structural invariants.
struct InvalidArgument : Error {
    using Error::Error;
};

/// Non-finite state, eigensolver non-convergence.
struct NumericError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

}  // namespace flock
