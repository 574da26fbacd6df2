#pragma once

#include <stdexcept>
#include <string>

namespace cfarq {

// Base for everything the library throws. Callers that only care about
// "did it work" catch this; the CLI maps the subclasses to exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

/// I - G(z) is numerically singular at the evaluation point.
class SingularMatrix : public Error {
public:
    using Error::Error;
};

/// A PGF evaluated at z=1 is not 1. Carries the offending value.
class NotNormalized : public Error {
public:
    NotNormalized(const std::string& what, double value)
        : Error(what), value_(value) {}
    double value() const noexcept { return value_; }

private:
    double value_;
};

/// A simulated frame exceeded the slot cap.
class Divergence : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace cfarq
