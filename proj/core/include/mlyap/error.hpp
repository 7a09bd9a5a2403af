#pragma once

#include <stdexcept>
#include <string>

namespace mlyap {

/// Raised when an operation is called outside the parameter range where it
/// is well defined (step size too large, implicit denominator vanishing, ...).
class PreconditionError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Raised when an iterative or quadrature computation cannot certify its
/// own accuracy.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace mlyap
