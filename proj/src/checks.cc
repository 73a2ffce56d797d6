#include "morozov/checks.h"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "morozov/experiments.h"
#include "morozov/random.h"

namespace morozov {

namespace {

CheckResult AtMost(std::string name, double value, double limit,
                   std::string detail = "") {
  return {std::move(name), value <= limit, value, limit, std::move(detail)};
}

// Worst violation of "G, m nondecreasing and R nonincreasing in alpha" over
// rows whose optimality residual is at least -1e-6.
double MonotonicityViolation(const std::vector<SweepRecord>& rows) {
  double worst = 0.0;
  const SweepRecord* prev = nullptr;
  for (const auto& r : rows) {
    if (!r.error.empty() || r.optimality_residual < -1e-6) continue;
    if (prev) {
      const auto excess = [](double drop, double scale) {
        return std::max(0.0, drop - 1e-6 * (1.0 + std::abs(scale)));
      };
      worst = std::max(worst, excess(prev->discrepancy - r.discrepancy, r.discrepancy));
      worst = std::max(worst, excess(prev->functional - r.functional, r.functional));
      worst = std::max(worst, excess(r.penalty - prev->penalty, r.penalty));
    }
    prev = &r;
  }
  return worst;
}

}  // namespace

double MinimizeConvex1d(const std::function<double(double)>& right_derivative,
                        double lo, double hi) {
  if (right_derivative(lo) >= 0.0) return lo;
  // Invariant: right_derivative(lo) < 0 <= right_derivative(hi).
  for (int i = 0; i < 2000; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (right_derivative(mid) >= 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

std::vector<CheckResult> RunInvariantChecks(std::uint64_t seed) {
  std::vector<CheckResult> out;
  Rng rng(seed);

  CsConfig cs;
  cs.seed = seed;
  const ProblemBundle cs_bundle = GenCsProblem(cs);
  const ForwardOperator& cs_op = *cs_bundle.problem.op;
  GravityConfig grav;
  grav.seed = seed;
  const ProblemBundle grav_bundle = GenGravityProblem(grav);
  const ForwardOperator& grav_op = *grav_bundle.problem.op;
  const Vector grav_init = grav_bundle.problem.initial_guess;

  {
    const Vector x = 0.5 * rng.NormalVector(cs_op.input_dim());
    const FdReport r = CheckJacobianFd(cs_op, x);
    out.push_back(AtMost("cs-jacobian-fd", r.max_rel_error, 1e-5));
    const FdReport g = CheckJacobianFd(grav_op, grav_init);
    out.push_back(AtMost("gravity-jacobian-fd", g.max_rel_error, 1e-5));
  }
  {
    double cs_worst = 0.0;
    double grav_worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const Vector x = 0.5 * rng.NormalVector(cs_op.input_dim());
      const Vector v = rng.NormalVector(cs_op.input_dim());
      const Vector w = rng.NormalVector(cs_op.output_dim());
      cs_worst = std::max(cs_worst, AdjointMismatch(cs_op, x, v, w));
      Vector p = grav_init;
      for (Eigen::Index k = 0; k < p.size(); ++k) p[k] += rng.Uniform(-20.0, 20.0);
      const Vector gv = rng.NormalVector(grav_op.input_dim());
      const Vector gw = rng.NormalVector(grav_op.output_dim());
      grav_worst = std::max(grav_worst, AdjointMismatch(grav_op, p, gv, gw));
    }
    out.push_back(AtMost("cs-adjoint", cs_worst, 1e-10));
    out.push_back(AtMost("gravity-adjoint", grav_worst, 1e-10));
  }
  {
    double worst_l1 = 0.0;
    double worst_quad = 0.0;
    for (int i = 0; i < 100; ++i) {
      const double v = rng.Uniform(-5.0, 5.0);
      const double t = rng.Uniform(0.0, 3.0);
      const double d = rng.Uniform(0.1, 3.0);
      const double bound = std::abs(v) + 1.0;
      const double l1 = MinimizeConvex1d(
          [&](double z) { return z - v + (z >= 0.0 ? t : -t); }, -bound, bound);
      const double quad = MinimizeConvex1d(
          [&](double z) { return z - v + t * d * d * z; }, -bound, bound);
      const Vector vv = Vector::Constant(1, v);
      worst_l1 = std::max(worst_l1, std::abs(SoftThreshold(vv, t)[0] - l1));
      worst_quad = std::max(
          worst_quad,
          std::abs(QuadraticProx(vv, t, Vector::Constant(1, d))[0] - quad));
    }
    out.push_back(AtMost("soft-threshold-prox", worst_l1, 1e-9));
    out.push_back(AtMost("quadratic-prox", worst_quad, 1e-9));
  }
  {
    TikhonovProblem problem = cs_bundle.problem;
    problem.config.record_history = true;
    const SolverResult r = SolveForAlpha(problem, 0.05);
    out.push_back(AtMost("ista-descent", r.descent_violations, 0.0,
                         std::to_string(r.iterations_used) + " iterations"));
  }
  {
    const ProblemBundle scalar = GenScalarOracleProblem({});
    std::vector<double> grid;
    for (int i = 1; i <= 15; ++i) grid.push_back(0.1 * i);
    const auto rows = SweepAlpha(scalar.problem, grid, WarmStartPolicy::kWarm,
                                 scalar.x_true);
    double worst = 0.0;
    for (const auto& r : rows) {
      worst = std::max(worst, std::abs(r.discrepancy - std::min(r.alpha, 1.0)));
    }
    out.push_back(AtMost("scalar-lasso-discrepancy", worst, 1e-8));
    out.push_back(AtMost("scalar-lasso-monotonicity", MonotonicityViolation(rows), 0.0));
  }
  {
    CsConfig noisy = cs;
    noisy.snr_db = 30.0;
    const ProblemBundle b = GenCsProblem(noisy);
    std::vector<double> grid;
    for (int j = 7; j >= 0; --j) grid.push_back(0.5 * std::ldexp(1.0, -j));
    const auto rows = SweepAlpha(b.problem, grid, WarmStartPolicy::kWarm, b.x_true);
    out.push_back(AtMost("cs-path-monotonicity", MonotonicityViolation(rows), 0.0));
  }
  {
    const double err = std::max(std::abs(ComputeC(1.0, 2.0, 0.5) - 4.0),
                                std::abs(ComputeC(1.102, 2.771, 0.5) - 4.408));
    out.push_back(AtMost("constant-c", err, 1e-12));
  }
  return out;
}

std::string FormatCheckTable(const std::vector<CheckResult>& results) {
  std::string out;
  char line[256];
  std::snprintf(line, sizeof(line), "%-28s %-6s %-14s %-14s %s\n", "check",
                "result", "value", "limit", "detail");
  out += line;
  for (const auto& r : results) {
    std::snprintf(line, sizeof(line), "%-28s %-6s %-14.6g %-14.6g %s\n",
                  r.name.c_str(), r.passed ? "PASS" : "FAIL", r.value, r.limit,
                  r.detail.c_str());
    out += line;
  }
  return out;
}

}  // namespace morozov
