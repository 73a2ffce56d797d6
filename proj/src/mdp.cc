#include "morozov/mdp.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "morozov/random.h"

namespace morozov {

double ComputeC(double tau1, double tau2, double gamma) {
  if (!(tau1 >= 1.0)) throw InvalidInput("tau1 must be >= 1");
  if (!(tau2 > tau1)) throw InvalidInput("tau2 must be > tau1");
  if (!(gamma > 0.0)) throw InvalidInput("gamma must be > 0");
  return std::max(tau2, (3.0 + 2.0 * gamma) * tau1);
}

void MdpConfig::Validate() const {
  ComputeC(tau1, tau2, gamma);
  if (!(q > 0.0 && q < 1.0)) throw InvalidInput("q must lie in (0, 1)");
  if (!(alpha0 > 0.0)) throw InvalidInput("alpha0 must be > 0");
  if (max_search_steps < 1) throw InvalidInput("max_search_steps must be >= 1");
  if (max_grow_steps < 0) throw InvalidInput("max_grow_steps must be >= 0");
  if (!(bracket_rel_tol > 0.0)) {
    throw InvalidInput("bracket_rel_tol must be > 0");
  }
}

std::string ToString(Window w) {
  switch (w) {
    case Window::kBelow: return "below";
    case Window::kInsideClassical: return "inside_classical";
    case Window::kInsideWidened: return "inside_widened";
    case Window::kAbove: return "above";
  }
  return "unknown";
}

std::string ToString(SearchPhase p) {
  switch (p) {
    case SearchPhase::kGrow: return "grow";
    case SearchPhase::kReduce: return "reduce";
    case SearchPhase::kBisect: return "bisect";
  }
  return "unknown";
}

std::string ToString(SearchOutcome o) {
  switch (o) {
    case SearchOutcome::kAccepted: return "accepted";
    case SearchOutcome::kBracketCollapsed: return "bracket-collapsed";
    case SearchOutcome::kStepCap: return "step-cap";
  }
  return "unknown";
}

Window MdpWindowCheck(double discrepancy, double delta, const MdpConfig& cfg) {
  if (!(delta > 0.0)) throw InvalidInput("MdpWindowCheck: delta must be > 0");
  const double lo = cfg.tau1 * delta;
  if (discrepancy < lo) return Window::kBelow;
  if (discrepancy <= cfg.tau2 * delta) return Window::kInsideClassical;
  if (discrepancy <= cfg.c() * delta) return Window::kInsideWidened;
  return Window::kAbove;
}

namespace {

class SearchState {
 public:
  SearchState(const AlphaSolver& solve, const MdpConfig& cfg, double delta)
      : solve_(solve), cfg_(cfg), lo_(cfg.tau1 * delta), hi_(cfg.c() * delta) {}

  const SolverResult& Evaluate(double alpha, SearchPhase phase) {
    std::optional<Vector> warm;
    if (cfg_.warm_start && !solutions_.empty()) {
      warm = NearestSolution(alpha);
    }
    last_ = solve_(alpha, warm);
    solutions_[alpha] = last_.x;
    TraceStep step;
    step.step = static_cast<int>(trace_.steps.size());
    step.phase = phase;
    step.alpha = alpha;
    step.discrepancy = last_.discrepancy;
    step.penalty = last_.penalty_value;
    step.functional = last_.functional_value;
    step.alpha_min = alpha_min;
    step.alpha_max = alpha_max;
    trace_.steps.push_back(step);
    return last_;
  }

  bool Inside(const SolverResult& r) const {
    return r.discrepancy >= lo_ && r.discrepancy <= hi_;
  }
  bool Above(const SolverResult& r) const { return r.discrepancy > hi_; }

  void UpdateBracketInTrace() {
    trace_.steps.back().alpha_min = alpha_min;
    trace_.steps.back().alpha_max = alpha_max;
  }

  AlphaSearchResult Finish(SearchOutcome outcome) {
    trace_.outcome = outcome;
    trace_.alpha_min = alpha_min;
    trace_.alpha_max = alpha_max;
    AlphaSearchResult out;
    out.alpha = last_.alpha;
    out.result = std::move(last_);
    out.trace = std::move(trace_);
    return out;
  }

  double alpha_min = 0.0;
  double alpha_max = 0.0;

 private:
  Vector NearestSolution(double alpha) const {
    const double la = std::log(alpha);
    auto best = solutions_.begin();
    double best_dist = std::numeric_limits<double>::infinity();
    for (auto it = solutions_.begin(); it != solutions_.end(); ++it) {
      const double dist = std::abs(std::log(it->first) - la);
      if (dist < best_dist) {
        best_dist = dist;
        best = it;
      }
    }
    return best->second;
  }

  const AlphaSolver& solve_;
  const MdpConfig& cfg_;
  const double lo_;
  const double hi_;
  std::map<double, Vector> solutions_;
  SolverResult last_;
  AlphaSearchTrace trace_;
};

}  // namespace

AlphaSearchResult AlphaSearch(const AlphaSolver& solve, const MdpConfig& cfg,
                              double delta) {
  cfg.Validate();
  if (!(delta > 0.0)) throw InvalidInput("AlphaSearch: delta must be > 0");
  SearchState state(solve, cfg, delta);

  double alpha = cfg.alpha0;
  const SolverResult* r = &state.Evaluate(alpha, SearchPhase::kGrow);
  if (state.Inside(*r)) return state.Finish(SearchOutcome::kAccepted);

  // Grow until the discrepancy exceeds c delta. A successful growth step
  // brackets the window directly: [previous alpha, current alpha].
  int grow_steps = 0;
  while (!state.Above(*r)) {
    if (grow_steps >= cfg.max_grow_steps) {
      return state.Finish(SearchOutcome::kStepCap);
    }
    state.alpha_min = alpha;
    alpha /= cfg.q;
    ++grow_steps;
    r = &state.Evaluate(alpha, SearchPhase::kGrow);
    if (state.Inside(*r)) return state.Finish(SearchOutcome::kAccepted);
  }
  state.alpha_max = alpha;
  state.UpdateBracketInTrace();

  int steps = 0;
  if (grow_steps == 0) {
    while (true) {
      if (steps >= cfg.max_search_steps) {
        return state.Finish(SearchOutcome::kStepCap);
      }
      alpha *= cfg.q;
      ++steps;
      r = &state.Evaluate(alpha, SearchPhase::kReduce);
      if (state.Inside(*r)) return state.Finish(SearchOutcome::kAccepted);
      if (state.Above(*r)) {
        state.alpha_max = alpha;
        state.UpdateBracketInTrace();
        continue;
      }
      state.alpha_min = alpha;
      state.UpdateBracketInTrace();
      break;
    }
  }

  while (true) {
    if ((state.alpha_max - state.alpha_min) / state.alpha_max <
        cfg.bracket_rel_tol) {
      return state.Finish(SearchOutcome::kBracketCollapsed);
    }
    if (steps >= cfg.max_search_steps) {
      return state.Finish(SearchOutcome::kStepCap);
    }
    alpha = 0.5 * (state.alpha_min + state.alpha_max);
    ++steps;
    r = &state.Evaluate(alpha, SearchPhase::kBisect);
    if (state.Inside(*r)) return state.Finish(SearchOutcome::kAccepted);
    if (state.Above(*r)) {
      state.alpha_max = alpha;
    } else {
      state.alpha_min = alpha;
    }
    state.UpdateBracketInTrace();
  }
}

AlphaSearchResult AlphaSearch(const TikhonovProblem& problem,
                              const MdpConfig& cfg, double delta) {
  const DataConditionReport data = VerifyDataCondition(
      *problem.op, problem.y_delta, delta, cfg.tau1, cfg.tau2);
  AlphaSolver solve = [&problem](double alpha,
                                 const std::optional<Vector>& warm) {
    return SolveForAlpha(problem, alpha, warm);
  };
  AlphaSearchResult out = AlphaSearch(solve, cfg, delta);
  if (!data.satisfied) {
    out.trace.warnings.push_back(
        "data condition violated: ||F(0) - y_delta|| = " +
        std::to_string(data.baseline_residual) + " < tau2 delta = " +
        std::to_string(data.tau2_delta));
  }
  return out;
}

GammaEstimate EstimateGamma(const ForwardOperator& op,
                            const std::vector<Vector>& anchors,
                            int pair_samples, std::uint64_t seed) {
  if (anchors.size() < 2) {
    throw InvalidInput("EstimateGamma: at least two anchors required");
  }
  if (pair_samples < 1) throw InvalidInput("EstimateGamma: pair_samples < 1");
  const auto n = static_cast<std::int64_t>(anchors.size());
  GammaEstimate est;
  for (int k = 0; k < pair_samples; ++k) {
    Rng rng(MixSeed(seed, static_cast<std::uint64_t>(k)));
    const auto i = rng.UniformInt(0, n - 1);
    auto j = rng.UniformInt(0, n - 2);
    if (j >= i) ++j;
    const Vector& x1 = anchors[i];
    const Vector& x2 = anchors[j];
    const Vector f1 = op.Evaluate(x1);
    const Vector df = op.Evaluate(x2) - f1;
    const double denom = df.norm();
    if (denom < 1e-12) {
      ++est.pairs_skipped;
      continue;
    }
    const double remainder = (df - op.JacobianApply(x1, x2 - x1)).norm();
    const double ratio = remainder / denom;
    if (est.pairs_used == 0 || ratio > est.gamma_hat) {
      est.gamma_hat = ratio;
      est.first = static_cast<int>(i);
      est.second = static_cast<int>(j);
    }
    ++est.pairs_used;
  }
  if (est.pairs_used == 0) {
    throw EstimationError("EstimateGamma: every sampled pair was degenerate");
  }
  return est;
}

DataConditionReport VerifyDataCondition(const ForwardOperator& op,
                                        const Vector& y_delta, double delta,
                                        double tau1, double tau2,
                                        const std::optional<Vector>& y_clean) {
  if (!(delta > 0.0)) {
    throw InvalidInput("VerifyDataCondition: delta must be > 0");
  }
  DataConditionReport report;
  report.baseline_residual = (op.Baseline() - y_delta).norm();
  report.tau1_delta = tau1 * delta;
  report.tau2_delta = tau2 * delta;
  report.satisfied = report.tau2_delta <= report.baseline_residual &&
                     report.tau1_delta < report.tau2_delta;
  if (y_clean) {
    report.noise_norm = (*y_clean - y_delta).norm();
    report.satisfied = report.satisfied && *report.noise_norm <= report.tau1_delta;
  }
  return report;
}

GapReport ClassicalGapReport(const std::vector<SweepRecord>& sweep,
                             double delta, const MdpConfig& cfg) {
  if (sweep.empty()) throw InvalidInput("ClassicalGapReport: empty sweep");
  for (std::size_t i = 1; i < sweep.size(); ++i) {
    if (!(sweep[i].alpha > sweep[i - 1].alpha)) {
      throw InvalidInput("ClassicalGapReport: sweep not sorted by alpha");
    }
  }
  GapReport report;
  for (std::size_t i = 0; i < sweep.size(); ++i) {
    if (!sweep[i].error.empty()) continue;
    const Window w = MdpWindowCheck(sweep[i].discrepancy, delta, cfg);
    if (w == Window::kInsideClassical) report.classical_indices.push_back(i);
    if (InsideWidened(w)) report.widened_indices.push_back(i);
    if (i > 0 && sweep[i - 1].error.empty()) {
      const double jump =
          std::abs(sweep[i].discrepancy - sweep[i - 1].discrepancy);
      if (jump > report.max_jump) {
        report.max_jump = jump;
        report.jump_alpha_lo = sweep[i - 1].alpha;
        report.jump_alpha_hi = sweep[i].alpha;
      }
    }
  }
  report.classical_hit = !report.classical_indices.empty();
  report.widened_hit = !report.widened_indices.empty();
  return report;
}

}  // namespace morozov
