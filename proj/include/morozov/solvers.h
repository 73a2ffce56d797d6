#ifndef MOROZOV_SOLVERS_H_
#define MOROZOV_SOLVERS_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "morozov/operators.h"
#include "morozov/penalties.h"

namespace morozov {

enum class SolverStatus { kConverged, kIterationCap, kStalled };
enum class StepPolicy { kFixed, kAdaptive };

// How the Landweber iteration switches its regularization force off.
//   kGradientRatio: include alpha * grad R only while
//                   alpha ||grad R|| > threshold * ||F'^* (F - y)||.
//   kAlphaCutoff:   use alpha when alpha >= threshold, otherwise 0.
//   kNone:          always include it.
enum class ThresholdRule { kGradientRatio, kAlphaCutoff, kNone };

enum class SolverKind { kIsta, kLandweber };

std::string ToString(SolverStatus status);
std::string ToString(StepPolicy policy);
std::string ToString(ThresholdRule rule);
std::string ToString(SolverKind kind);
StepPolicy ParseStepPolicy(const std::string& s);
ThresholdRule ParseThresholdRule(const std::string& s);
SolverKind ParseSolverKind(const std::string& s);

struct SolverConfig {
  int max_iterations = 2000;
  // Relative change threshold applied to both the iterate and J.
  double tolerance = 1e-8;
  // Consecutive iterations with relative J decrease below `stall_tolerance`
  // before a run is declared stalled.
  int stall_window = 25;
  double stall_tolerance = 1e-12;
  StepPolicy step_policy = StepPolicy::kAdaptive;

  // ISTA. With kFixed the step is 1/fixed_lambda throughout. With kAdaptive
  // lambda = lambda_safety * ||F'(x)||^2 is re-estimated every
  // lambda_refresh iterations and enlarged whenever a step fails to descend.
  double fixed_lambda = 1.0;
  double lambda_safety = 1.1;
  int lambda_refresh = 50;
  int max_lambda_increases = 60;

  // Landweber. With kAdaptive, omega_k = omega0 / max(frobenius_floor,
  // ||F'(x_k)||_F^2); with kFixed, omega_k = omega0.
  double omega0 = 1.0;
  double frobenius_floor = 0.0;
  ThresholdRule threshold_rule = ThresholdRule::kGradientRatio;
  double threshold = 1e-3;
  int max_step_halvings = 20;

  std::optional<Vector> warm_start;
  bool record_history = false;

  // Throws InvalidInput on nonsensical values.
  void Validate() const;
};

struct SolverResult {
  Vector x;
  double alpha = 0.0;
  double discrepancy = 0.0;       // ||F(x) - y||
  double penalty_value = 0.0;     // R(x)
  double functional_value = 0.0;  // 1/2 discrepancy^2 + alpha R(x)
  int iterations_used = 0;
  SolverStatus status = SolverStatus::kIterationCap;
  double optimality_residual = 0.0;
  // Iterations where J rose by more than 1e-12 (1 + |J|).
  int descent_violations = 0;
  int lambda_increases = 0;
  double final_step = 0.0;
  // J(x^k) for k = 0, 1, ... when SolverConfig::record_history is set.
  std::vector<double> history;
};

// 1/2 ||F(x) - y||^2 + alpha R(x).
double TikhonovFunctional(const ForwardOperator& op, const Vector& y,
                          const Penalty& penalty, double alpha,
                          const Vector& x);

// Proximal-gradient (iterative soft thresholding for l1) minimization:
//   x <- prox_{alpha/lambda R}(x - F'(x)^* (F(x) - y) / lambda).
// Starts from cfg.warm_start or zero and returns the earliest iterate with
// the smallest J. Throws DivergedError if J becomes non-finite.
SolverResult IstaMinimize(const ForwardOperator& op, const Vector& y_delta,
                          double alpha, const Penalty& penalty,
                          const SolverConfig& cfg);

// Regularized Landweber iteration
//   x <- x - omega_k [F'(x)^* (F(x) - y) + alpha_k grad R(x)]
// for a differentiable penalty (grad R = penalty.SubgradientAt). A step that
// leaves the operator's domain is halved, up to cfg.max_step_halvings times,
// after which the run is reported as stalled.
SolverResult LandweberTikhonovMinimize(const ForwardOperator& op,
                                       const Vector& y_delta, double alpha,
                                       const Penalty& penalty,
                                       const SolverConfig& cfg,
                                       const Vector& cold_start);

// Probes the first-order condition
//   <F'(x)^*(F(x) - y), z - x> - alpha R(x) + alpha R(z) >= 0
// over `probes` points z around x: half along signed coordinate axes, half
// along random directions, at distances (1 + ||x||_inf) 10^-k, k = 0..3.
// Returns the most negative value found, or 0.
double CheckFirstOrder(const ForwardOperator& op, const Vector& y_delta,
                       double alpha, const Penalty& penalty, const Vector& x,
                       int probes, std::uint64_t seed = 0x5eed);

struct TikhonovProblem {
  OperatorPtr op;
  Vector y_delta;
  PenaltyPtr penalty;
  SolverKind solver = SolverKind::kIsta;
  SolverConfig config;
  // Cold start; zero when empty.
  Vector initial_guess;
  int optimality_probes = 200;
  std::uint64_t probe_seed = 0x5eed;
};

// Dispatches to the configured inner solver and attaches the optimality
// residual. Deterministic in (problem, alpha, warm_start).
SolverResult SolveForAlpha(const TikhonovProblem& problem, double alpha,
                           const std::optional<Vector>& warm_start =
                               std::nullopt);

}  // namespace morozov

#endif  // MOROZOV_SOLVERS_H_
