#ifndef MOROZOV_CHECKS_H_
#define MOROZOV_CHECKS_H_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace morozov {

struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;  // measured quantity
  double limit = 0.0;  // pass threshold
  std::string detail;
};

// Numerical invariants of the library on small seeded problems: Jacobians
// against central differences, adjoint identities, prox operators against
// brute-force minimization, ISTA descent and alpha-path monotonicity.
std::vector<CheckResult> RunInvariantChecks(std::uint64_t seed);

// Fixed-width pass/fail table, one line per check.
std::string FormatCheckTable(const std::vector<CheckResult>& results);

// Minimizer on [lo, hi] of a convex function given its right derivative
// (nondecreasing): the smallest z with right_derivative(z) >= 0, found by
// bisection to floating-point resolution.
double MinimizeConvex1d(const std::function<double(double)>& right_derivative,
                        double lo, double hi);

}  // namespace morozov

#endif  // MOROZOV_CHECKS_H_
