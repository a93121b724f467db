#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace dfovu {

/// Precondition or argument contract broken by the caller.
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Random problem generation could not satisfy its structural requirements.
class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The proximal dual QP did not reach its duality-gap tolerance.
class QpFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A runtime invariant of the algorithm was observed to fail.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// The grey-box call budget ran out. Carries the best point seen so far.
class BudgetExhausted : public std::runtime_error {
 public:
  BudgetExhausted(const std::string& what, Eigen::VectorXd best_x, double best_f)
      : std::runtime_error(what), best_x_(std::move(best_x)), best_f_(best_f) {}

  const Eigen::VectorXd& best_x() const { return best_x_; }
  double best_f() const { return best_f_; }

 private:
  Eigen::VectorXd best_x_;
  double best_f_;
};

}  // namespace dfovu
