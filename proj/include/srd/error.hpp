#pragma once

#include <stdexcept>
#include <string>

namespace srd {

/// Base class for all library errors. `reason()` is a short machine-parsable
/// token (e.g. "ellipticity", "g(0)!=0") that the CLI prints verbatim.
class Error : public std::runtime_error {
public:
    Error(std::string reason, const std::string& message)
        : std::runtime_error(message), reason_(std::move(reason)) {}

    const std::string& reason() const noexcept { return reason_; }

private:
    std::string reason_;
};

/// Malformed input: bad shapes, invalid parameters, unparsable config.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A modelling assumption failed its audit (ellipticity, growth bounds,
/// Hölder constants, quasi positivity, ...).
class AuditError : public Error {
public:
    using Error::Error;
};

/// Numerical failure at run time: singular solve, non-finite state, ...
class SolverError : public Error {
public:
    using Error::Error;
};

}  // namespace srd
