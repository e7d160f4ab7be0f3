#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace singdet {

// Base class for everything thrown by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Problem construction / input validation failures (bad flags, inadmissible
// boundary pairs, malformed expressions).  The CLI maps these to exit code 1.
class UsageError : public Error {
public:
    explicit UsageError(const std::string& msg) : Error(msg) {}
};

// Expression syntax error; `offset` is the byte offset into the source text.
class ParseError : public UsageError {
public:
    ParseError(const std::string& msg, std::size_t offset)
        : UsageError(msg + " (at byte " + std::to_string(offset) + ")"), offset(offset) {}
    std::size_t offset;
};

// Expression evaluated to a non-finite value or outside a function's domain.
class EvalError : public Error {
public:
    EvalError(const std::string& msg, double x)
        : Error(msg + " (at x = " + std::to_string(x) + ")"), x(x) {}
    double x;
};

// Numerical failures during a computation (non-convergence, quadrature
// breakdown, Wronskian constancy violation, resolvent pole).  Exit code 2.
class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& msg) : Error(msg) {}
};

// Overflow guard tripped; carries the log-scaled magnitude of the result.
class RangeError : public NumericalError {
public:
    RangeError(const std::string& msg, double log_value)
        : NumericalError(msg + " (log value " + std::to_string(log_value) + ")"),
          log_value(log_value) {}
    double log_value;
};

}  // namespace singdet
