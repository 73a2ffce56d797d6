#include "morozov/solvers.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "morozov/random.h"

namespace morozov {

std::string ToString(SolverStatus status) {
  switch (status) {
    case SolverStatus::kConverged: return "converged";
    case SolverStatus::kIterationCap: return "iteration-cap";
    case SolverStatus::kStalled: return "stalled";
  }
  return "unknown";
}

std::string ToString(StepPolicy policy) {
  return policy == StepPolicy::kFixed ? "fixed" : "adaptive";
}

std::string ToString(ThresholdRule rule) {
  switch (rule) {
    case ThresholdRule::kGradientRatio: return "gradient-ratio";
    case ThresholdRule::kAlphaCutoff: return "alpha-cutoff";
    case ThresholdRule::kNone: return "none";
  }
  return "unknown";
}

std::string ToString(SolverKind kind) {
  return kind == SolverKind::kIsta ? "ista" : "landweber";
}

StepPolicy ParseStepPolicy(const std::string& s) {
  if (s == "fixed") return StepPolicy::kFixed;
  if (s == "adaptive") return StepPolicy::kAdaptive;
  throw InvalidInput("unknown step policy '" + s + "'");
}

ThresholdRule ParseThresholdRule(const std::string& s) {
  if (s == "gradient-ratio") return ThresholdRule::kGradientRatio;
  if (s == "alpha-cutoff") return ThresholdRule::kAlphaCutoff;
  if (s == "none") return ThresholdRule::kNone;
  throw InvalidInput("unknown threshold rule '" + s + "'");
}

SolverKind ParseSolverKind(const std::string& s) {
  if (s == "ista") return SolverKind::kIsta;
  if (s == "landweber") return SolverKind::kLandweber;
  throw InvalidInput("unknown solver '" + s + "'");
}

void SolverConfig::Validate() const {
  if (max_iterations < 1) throw InvalidInput("max_iterations must be >= 1");
  if (!(tolerance > 0.0)) throw InvalidInput("tolerance must be > 0");
  if (stall_window < 1) throw InvalidInput("stall_window must be >= 1");
  if (!(stall_tolerance >= 0.0)) {
    throw InvalidInput("stall_tolerance must be >= 0");
  }
  if (!(fixed_lambda > 0.0)) throw InvalidInput("fixed_lambda must be > 0");
  if (!(lambda_safety >= 1.0)) throw InvalidInput("lambda_safety must be >= 1");
  if (lambda_refresh < 1) throw InvalidInput("lambda_refresh must be >= 1");
  if (!(omega0 > 0.0)) throw InvalidInput("omega0 must be > 0");
  if (!(frobenius_floor >= 0.0)) {
    throw InvalidInput("frobenius_floor must be >= 0");
  }
  if (!(threshold >= 0.0)) throw InvalidInput("threshold must be >= 0");
  if (max_step_halvings < 0) {
    throw InvalidInput("max_step_halvings must be >= 0");
  }
}

double TikhonovFunctional(const ForwardOperator& op, const Vector& y,
                          const Penalty& penalty, double alpha,
                          const Vector& x) {
  return 0.5 * (op.Evaluate(x) - y).squaredNorm() + alpha * penalty.Value(x);
}

namespace {

constexpr double kTiny = std::numeric_limits<double>::min();

bool Rose(double next, double current) {
  return next > current + 1e-12 * (1.0 + std::abs(current));
}

// Bookkeeping shared by both iterations: best iterate, history, and the
// convergence / stall tests.
class Tracker {
 public:
  Tracker(const SolverConfig& cfg, Vector x0, double j0)
      : cfg_(cfg), best_x_(std::move(x0)), best_j_(j0) {
    if (cfg_.record_history) history_.push_back(j0);
  }

  // Returns true when the run should stop.
  bool Step(const Vector& x_prev, double j_prev, const Vector& x_next,
            double j_next, int iteration) {
    iterations_ = iteration;
    if (Rose(j_next, j_prev)) ++descent_violations_;
    if (cfg_.record_history) history_.push_back(j_next);
    if (j_next < best_j_) {
      best_j_ = j_next;
      best_x_ = x_next;
    }
    const double dx =
        (x_next - x_prev).norm() / std::max(x_prev.norm(), kTiny);
    const double dj = std::abs(j_next - j_prev) / std::max(std::abs(j_prev), kTiny);
    if (dx <= cfg_.tolerance && dj <= cfg_.tolerance) {
      status_ = SolverStatus::kConverged;
      return true;
    }
    const double decrease = (j_prev - j_next) / std::max(std::abs(j_prev), kTiny);
    stall_count_ = decrease < cfg_.stall_tolerance ? stall_count_ + 1 : 0;
    if (stall_count_ >= cfg_.stall_window) {
      status_ = SolverStatus::kStalled;
      return true;
    }
    return false;
  }

  void MarkStalled() { status_ = SolverStatus::kStalled; }

  SolverResult Finish(const ForwardOperator& op, const Vector& y,
                      const Penalty& penalty, double alpha) {
    SolverResult r;
    r.alpha = alpha;
    r.x = best_x_;
    r.discrepancy = (op.Evaluate(r.x) - y).norm();
    r.penalty_value = penalty.Value(r.x);
    r.functional_value =
        0.5 * r.discrepancy * r.discrepancy + alpha * r.penalty_value;
    r.iterations_used = iterations_;
    r.status = status_;
    r.descent_violations = descent_violations_;
    r.history = std::move(history_);
    return r;
  }

 private:
  const SolverConfig& cfg_;
  Vector best_x_;
  double best_j_;
  std::vector<double> history_;
  int iterations_ = 0;
  int stall_count_ = 0;
  int descent_violations_ = 0;
  SolverStatus status_ = SolverStatus::kIterationCap;
};

// J at x, or +inf when x is outside the operator's domain or F overflows.
double SafeFunctional(const ForwardOperator& op, const Vector& y,
                      const Penalty& penalty, double alpha, const Vector& x) {
  if (!x.allFinite()) return std::numeric_limits<double>::infinity();
  try {
    const double j = TikhonovFunctional(op, y, penalty, alpha, x);
    return std::isfinite(j) ? j : std::numeric_limits<double>::infinity();
  } catch (const DomainError&) {
    return std::numeric_limits<double>::infinity();
  }
}

}  // namespace

SolverResult IstaMinimize(const ForwardOperator& op, const Vector& y_delta,
                          double alpha, const Penalty& penalty,
                          const SolverConfig& cfg) {
  cfg.Validate();
  if (!(alpha > 0.0)) throw InvalidInput("IstaMinimize: alpha must be > 0");
  RequireSize(y_delta, op.output_dim(), "IstaMinimize data");
  Vector x = cfg.warm_start ? *cfg.warm_start : Vector::Zero(op.input_dim());
  RequireSize(x, op.input_dim(), "IstaMinimize warm start");

  const bool adaptive = cfg.step_policy == StepPolicy::kAdaptive;
  const auto lambda_at = [&](const Vector& at) {
    return std::max(cfg.lambda_safety * JacobianNormSquared(op, at), kTiny);
  };
  double lambda = adaptive ? lambda_at(x) : cfg.fixed_lambda;

  double j = SafeFunctional(op, y_delta, penalty, alpha, x);
  if (!std::isfinite(j)) throw DivergedError("IstaMinimize: J(x0) is not finite", 0);
  Tracker tracker(cfg, x, j);
  int lambda_increases = 0;

  for (int k = 1; k <= cfg.max_iterations; ++k) {
    if (adaptive && k > 1 && (k - 1) % cfg.lambda_refresh == 0) {
      lambda = lambda_at(x);
    }
    const Vector grad =
        op.JacobianAdjointApply(x, op.Evaluate(x) - y_delta);
    Vector next;
    double j_next;
    for (int attempt = 0;; ++attempt) {
      next = penalty.Prox(x - grad / lambda, alpha / lambda);
      j_next = SafeFunctional(op, y_delta, penalty, alpha, next);
      if (!adaptive || !Rose(j_next, j)) break;
      if (attempt >= cfg.max_lambda_increases) {
        throw DivergedError("IstaMinimize: no descent step at iteration " +
                                std::to_string(k),
                            k);
      }
      double candidate = 2.0 * lambda;
      if (std::isfinite(j_next)) candidate = std::max(candidate, lambda_at(next));
      lambda = candidate;
      ++lambda_increases;
    }
    if (!std::isfinite(j_next)) {
      throw DivergedError(
          "IstaMinimize: non-finite functional at iteration " +
              std::to_string(k),
          k);
    }
    const bool stop = tracker.Step(x, j, next, j_next, k);
    x = std::move(next);
    j = j_next;
    if (stop) break;
  }
  SolverResult result = tracker.Finish(op, y_delta, penalty, alpha);
  result.lambda_increases = lambda_increases;
  result.final_step = 1.0 / lambda;
  return result;
}

SolverResult LandweberTikhonovMinimize(const ForwardOperator& op,
                                       const Vector& y_delta, double alpha,
                                       const Penalty& penalty,
                                       const SolverConfig& cfg,
                                       const Vector& cold_start) {
  cfg.Validate();
  if (!(alpha >= 0.0)) {
    throw InvalidInput("LandweberTikhonovMinimize: alpha must be >= 0");
  }
  RequireSize(y_delta, op.output_dim(), "LandweberTikhonovMinimize data");
  Vector x = cfg.warm_start ? *cfg.warm_start : cold_start;
  RequireSize(x, op.input_dim(), "LandweberTikhonovMinimize start");

  double j = TikhonovFunctional(op, y_delta, penalty, alpha, x);
  Tracker tracker(cfg, x, j);
  double omega = cfg.omega0;

  for (int k = 1; k <= cfg.max_iterations; ++k) {
    const Matrix jac = op.Jacobian(x);
    const Vector data_grad = jac.transpose() * (op.Evaluate(x) - y_delta);
    const Vector reg_grad = penalty.SubgradientAt(x);
    double alpha_k = alpha;
    switch (cfg.threshold_rule) {
      case ThresholdRule::kGradientRatio:
        if (!(alpha * reg_grad.norm() > cfg.threshold * data_grad.norm())) {
          alpha_k = 0.0;
        }
        break;
      case ThresholdRule::kAlphaCutoff:
        if (alpha < cfg.threshold) alpha_k = 0.0;
        break;
      case ThresholdRule::kNone:
        break;
    }
    const Vector grad = data_grad + alpha_k * reg_grad;
    omega = cfg.step_policy == StepPolicy::kAdaptive
                ? cfg.omega0 / std::max({cfg.frobenius_floor,
                                         jac.squaredNorm(), kTiny})
                : cfg.omega0;

    Vector next = x - omega * grad;
    double j_next = SafeFunctional(op, y_delta, penalty, alpha, next);
    int halvings = 0;
    while (!std::isfinite(j_next) && halvings < cfg.max_step_halvings) {
      omega *= 0.5;
      ++halvings;
      next = x - omega * grad;
      j_next = SafeFunctional(op, y_delta, penalty, alpha, next);
    }
    if (!std::isfinite(j_next)) {
      tracker.MarkStalled();
      break;
    }
    const bool stop = tracker.Step(x, j, next, j_next, k);
    x = std::move(next);
    j = j_next;
    if (stop) break;
  }
  SolverResult result = tracker.Finish(op, y_delta, penalty, alpha);
  result.final_step = omega;
  return result;
}

double CheckFirstOrder(const ForwardOperator& op, const Vector& y_delta,
                       double alpha, const Penalty& penalty, const Vector& x,
                       int probes, std::uint64_t seed) {
  const Vector grad = op.JacobianAdjointApply(x, op.Evaluate(x) - y_delta);
  const double base = alpha * penalty.Value(x);
  const double radius = 1.0 + x.cwiseAbs().maxCoeff();
  const Eigen::Index n = x.size();
  Rng rng(seed);
  double worst = 0.0;
  for (int i = 0; i < probes; ++i) {
    Vector dir;
    if (i % 2 == 0) {
      const Eigen::Index axis = (i / 2) % n;
      dir = Vector::Zero(n);
      dir[axis] = ((i / 2) / n) % 2 == 0 ? 1.0 : -1.0;
    } else {
      dir = rng.NormalVector(n).normalized();
    }
    const double step = radius * std::pow(10.0, -((i / 2) % 4));
    const Vector z = x + step * dir;
    const double value = grad.dot(z - x) - base + alpha * penalty.Value(z);
    worst = std::min(worst, value);
  }
  return worst;
}

SolverResult SolveForAlpha(const TikhonovProblem& problem, double alpha,
                           const std::optional<Vector>& warm_start) {
  if (!(alpha > 0.0)) throw InvalidInput("SolveForAlpha: alpha must be > 0");
  SolverConfig cfg = problem.config;
  if (warm_start) cfg.warm_start = warm_start;
  const Vector cold = problem.initial_guess.size() > 0
                          ? problem.initial_guess
                          : Vector::Zero(problem.op->input_dim());
  SolverResult result;
  if (problem.solver == SolverKind::kIsta) {
    if (!cfg.warm_start) cfg.warm_start = cold;
    result = IstaMinimize(*problem.op, problem.y_delta, alpha,
                          *problem.penalty, cfg);
  } else {
    result = LandweberTikhonovMinimize(*problem.op, problem.y_delta, alpha,
                                       *problem.penalty, cfg, cold);
  }
  result.optimality_residual =
      CheckFirstOrder(*problem.op, problem.y_delta, alpha, *problem.penalty,
                      result.x, problem.optimality_probes, problem.probe_seed);
  return result;
}

}  // namespace morozov
