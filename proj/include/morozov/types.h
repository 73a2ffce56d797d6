#ifndef MOROZOV_TYPES_H_
#define MOROZOV_TYPES_H_

#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace morozov {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Caller passed something that violates a documented precondition
// (dimension mismatch, negative threshold, tau2 <= tau1, ...).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The forward model is undefined at the requested point, e.g. a gravity
// source at nonpositive depth.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// An inner solver produced a non-finite functional value.
class DivergedError : public std::runtime_error {
 public:
  DivergedError(const std::string& what, int iteration)
      : std::runtime_error(what), iteration_(iteration) {}
  int iteration() const { return iteration_; }

 private:
  int iteration_;
};

// No usable sample was available for a statistical estimate.
class EstimationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void RequireSize(const Vector& v, Eigen::Index n, const char* what) {
  if (v.size() != n) {
    throw InvalidInput(std::string(what) + ": expected length " +
                       std::to_string(n) + ", got " +
                       std::to_string(v.size()));
  }
}

}  // namespace morozov

#endif  // MOROZOV_TYPES_H_
