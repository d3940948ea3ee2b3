#pragma once

#include <stdexcept>
#include <string>

namespace finfo {

/// Base of every error thrown by the library. The CLI maps the concrete
/// subclass to a process exit code.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual int exit_code() const noexcept { return 1; }
};

/// Bad arguments or configuration (exit 2).
class UsageError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 2; }
};

/// Malformed or inconsistent data (exit 3).
class DataError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 3; }
};

/// Numerical failure: non-convergence, infinite log-densities (exit 4).
class NumericalError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 4; }
};

}  // namespace finfo
