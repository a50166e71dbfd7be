#pragma once

#include <stdexcept>
#include <string>

namespace qcs {

/// Bad caller input: out-of-range index, odd qubit count, non-unitary gate.
class InvalidArgument : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// A physical or algebraic invariant failed to hold (kernel bug or bad state).
class InvariantViolation : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// An iterative solver or optimizer exhausted its budget.
class SolverFailure : public std::runtime_error {
  public:
    SolverFailure(const std::string &what, double best_residual)
        : std::runtime_error(what), best_residual_(best_residual) {
    }
    double best_residual() const {
        return best_residual_;
    }

  private:
    double best_residual_;
};

}  // namespace qcs
