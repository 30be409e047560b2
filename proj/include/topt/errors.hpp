#ifndef TOPT_ERRORS_HPP
#define TOPT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace topt {

// Bad scalar/config inputs (poisson out of range, negative radius, ...).
struct ParameterError : std::invalid_argument {
  explicit ParameterError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Structurally valid inputs that violate an operation's domain
// (size mismatch, density outside [0,1], invalid partition, ...).
struct DomainError : std::domain_error {
  explicit DomainError(const std::string& msg) : std::domain_error(msg) {}
};

// Linear solve failed to reduce the residual within its iteration budget.
struct SingularSystemError : std::runtime_error {
  explicit SingularSystemError(const std::string& msg) : std::runtime_error(msg) {}
};

// Single-constraint projection cannot be solved by the binary search
// (zero constraint gradient, or the linearized feasible set is empty).
// Callers fall back to the regularized Newton path.
struct InfeasibleLinearization : std::runtime_error {
  explicit InfeasibleLinearization(const std::string& msg) : std::runtime_error(msg) {}
};

// Projection solver hit a numerical dead end (non-finite iterates,
// unsolvable Newton system).
struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

// Optimizer/problem combination is not supported (e.g. OC on a
// multi-constraint problem).
struct UnsupportedProblem : std::runtime_error {
  explicit UnsupportedProblem(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace topt

#endif
