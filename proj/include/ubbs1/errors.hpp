#pragma once

#include <stdexcept>
#include <string>

namespace ubbs1 {

/// Argument outside the mathematical domain of a function (z outside (0,1), x <= 0, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Parameter vector violates its constraints.
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Iterative procedure (root finding, optimisation, quadrature) did not converge.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Numerical result contradicts a structural property that should hold.
class NumericalAnomaly : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Too few observations for the requested computation.
class InsufficientData : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace ubbs1
