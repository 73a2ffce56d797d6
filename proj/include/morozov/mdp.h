#ifndef MOROZOV_MDP_H_
#define MOROZOV_MDP_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "morozov/solvers.h"

namespace morozov {

// c = max{tau2, (3 + 2 gamma) tau1}. Requires 1 <= tau1 < tau2, gamma > 0.
double ComputeC(double tau1, double tau2, double gamma);

struct MdpConfig {
  double tau1 = 1.0;
  double tau2 = 2.0;
  double gamma = 0.5;
  double q = 0.5;
  double alpha0 = 1.0;
  int max_search_steps = 60;
  // Growth steps alpha <- alpha / q allowed before giving up.
  int max_grow_steps = 60;
  double bracket_rel_tol = 1e-3;
  // Start each solve from the solution at the nearest alpha seen so far.
  bool warm_start = true;

  double c() const { return ComputeC(tau1, tau2, gamma); }
  void Validate() const;
};

enum class Window { kBelow, kInsideClassical, kInsideWidened, kAbove };
std::string ToString(Window w);

// Classifies a discrepancy against [tau1 delta, tau2 delta] and the widened
// [tau1 delta, c delta]; both intervals are closed. kInsideWidened means
// inside the widened window but not the classical one.
Window MdpWindowCheck(double discrepancy, double delta, const MdpConfig& cfg);

inline bool InsideWidened(Window w) {
  return w == Window::kInsideClassical || w == Window::kInsideWidened;
}

enum class SearchPhase { kGrow, kReduce, kBisect };
enum class SearchOutcome { kAccepted, kBracketCollapsed, kStepCap };
std::string ToString(SearchPhase p);
std::string ToString(SearchOutcome o);

struct TraceStep {
  int step = 0;
  SearchPhase phase = SearchPhase::kGrow;
  double alpha = 0.0;
  double discrepancy = 0.0;
  double penalty = 0.0;
  double functional = 0.0;
  // Bracket after this step; 0 when not yet established.
  double alpha_min = 0.0;
  double alpha_max = 0.0;
};

struct AlphaSearchTrace {
  std::vector<TraceStep> steps;
  double alpha_min = 0.0;
  double alpha_max = 0.0;
  SearchOutcome outcome = SearchOutcome::kStepCap;
  std::vector<std::string> warnings;
};

struct AlphaSearchResult {
  double alpha = 0.0;
  // Solution at `alpha`: the accepted one, or the last one evaluated.
  SolverResult result;
  AlphaSearchTrace trace;
  bool accepted() const { return trace.outcome == SearchOutcome::kAccepted; }
};

using AlphaSolver = std::function<SolverResult(
    double alpha, const std::optional<Vector>& warm_start)>;

// Discrepancy-principle search for alpha:
//   grow   - while ||F(x_a) - y|| <= c delta (and outside the window),
//            a <- a / q, so that the search starts from a too-large alpha;
//   reduce - a <- q a while the discrepancy exceeds c delta;
//   bisect - a <- (a_min + a_max) / 2, moving a_max down on discrepancies
//            above c delta and a_min up on those below tau1 delta.
// Every evaluated alpha whose discrepancy lies in [tau1 delta, c delta] is
// accepted immediately.
AlphaSearchResult AlphaSearch(const AlphaSolver& solve, const MdpConfig& cfg,
                              double delta);

// Convenience overload over SolveForAlpha. Runs VerifyDataCondition first and
// records a warning in the trace when it fails.
AlphaSearchResult AlphaSearch(const TikhonovProblem& problem,
                              const MdpConfig& cfg, double delta);

struct GammaEstimate {
  double gamma_hat = 0.0;
  int pairs_used = 0;
  int pairs_skipped = 0;
  // Anchor indices (x1, x2) attaining gamma_hat.
  int first = -1;
  int second = -1;
};

// Empirical tangential-cone constant
//   max ||F(x2) - F(x1) - F'(x1)(x2 - x1)|| / ||F(x2) - F(x1)||
// over `pair_samples` ordered anchor pairs. Pair k is drawn from a stream
// seeded with MixSeed(seed, k), so a larger sample is a superset of a smaller
// one. Pairs with ||F(x2) - F(x1)|| < 1e-12 are skipped; throws
// EstimationError when every pair is.
GammaEstimate EstimateGamma(const ForwardOperator& op,
                            const std::vector<Vector>& anchors,
                            int pair_samples, std::uint64_t seed);

struct DataConditionReport {
  double baseline_residual = 0.0;  // ||F(0) - y_delta||
  double tau1_delta = 0.0;
  double tau2_delta = 0.0;
  std::optional<double> noise_norm;  // ||y - y_delta|| when y is known
  bool satisfied = false;
};

// Checks ||y - y_delta|| <= tau1 delta < tau2 delta <= ||F(0) - y_delta||;
// the left half only when clean data is supplied. F(0) is op.Baseline().
DataConditionReport VerifyDataCondition(
    const ForwardOperator& op, const Vector& y_delta, double delta,
    double tau1, double tau2, const std::optional<Vector>& y_clean = std::nullopt);

// One row of an alpha sweep.
struct SweepRecord {
  double alpha = 0.0;
  double discrepancy = 0.0;  // ||F(x_a) - y_delta||, not squared
  double penalty = 0.0;
  double functional = 0.0;   // 1/2 discrepancy^2 + alpha penalty
  double relative_error = 0.0;
  SolverStatus status = SolverStatus::kIterationCap;
  double optimality_residual = 0.0;
  int iterations = 0;
  std::string error;  // nonempty when the solve failed
};

struct GapReport {
  bool classical_hit = false;
  bool widened_hit = false;
  std::vector<std::size_t> classical_indices;
  std::vector<std::size_t> widened_indices;
  // Largest |discrepancy| change between neighbouring alphas.
  double max_jump = 0.0;
  double jump_alpha_lo = 0.0;
  double jump_alpha_hi = 0.0;
};

// `sweep` must be nonempty and sorted by increasing alpha.
GapReport ClassicalGapReport(const std::vector<SweepRecord>& sweep,
                             double delta, const MdpConfig& cfg);

}  // namespace morozov

#endif  // MOROZOV_MDP_H_
