#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace optocool {

/// Invalid user input: bad parameter values, malformed scenario files, unknown paths.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical procedure could not produce a trustworthy answer.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Dense or sparse linear solve on a (near-)singular matrix.
class SingularSystemError : public NumericalError {
public:
    SingularSystemError(const std::string& what, double condition)
        : NumericalError(what), condition_(condition) {}

    /// Estimated 2-norm condition number (infinity when exactly singular).
    double condition() const noexcept { return condition_; }

private:
    double condition_;
};

/// Evaluation at (or numerically on top of) a pole of a response function.
class PoleError : public NumericalError {
public:
    PoleError(const std::string& what, std::complex<double> location)
        : NumericalError(what), location_(location) {}

    std::complex<double> location() const noexcept { return location_; }

private:
    std::complex<double> location_;
};

/// The requested quantity does not exist because the dynamics heat without bound.
class DivergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace optocool
