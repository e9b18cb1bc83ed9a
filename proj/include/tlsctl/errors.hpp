#pragma once

#include <stdexcept>
#include <string>

namespace tlsctl {

/// Malformed scenario or pulse input. Carries the source location when known.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A physical or structural invariant was violated by otherwise well-formed input.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// An output file or directory could not be created or written.
class OutputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Quadrature non-convergence, integrator instability and similar failures.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace tlsctl
