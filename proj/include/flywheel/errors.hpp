#pragma once

#include <stdexcept>
#include <string>

namespace flywheel {

/// Invalid argument values (sizes, counts, step lengths).
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Curve parameter outside [0, S].
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Profile that cannot be analysed: non-monotone radius or non-positive thickness.
class GeometryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Quadrature or linear solve failures.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or invalid configuration document.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace flywheel
