// Acceptance harness: prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "morozov/config.h"
#include "morozov/experiments.h"
#include "morozov/penalties.h"
#include "morozov/random.h"
#include "morozov/runner.h"

namespace morozov {
namespace {

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double Median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void Require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int failures = 0;

void Report(int n, Verdict& v, double seconds, double budget) {
  v.Require(seconds <= budget, "runtime over " + std::to_string(budget) + " s");
  if (!v.pass) ++failures;
  std::cout << "criterion " << n << ": " << (v.pass ? "PASS" : "FAIL") << " "
            << v.detail.str() << " (" << seconds << " s)" << std::endl;
}

void ConstantC() {
  const auto start = Clock::now();
  Verdict v;
  const double a = ComputeC(1, 2, 0.5);
  const double b = ComputeC(1.102, 2.771, 0.5);
  v.detail << "c(1,2,0.5)=" << a << " c(1.102,2.771,0.5)=" << FormatDouble(b);
  v.Require(a == 4.0, "c(1,2,0.5) = 4");
  v.Require(std::abs(b - 4.408) <= 1e-12, "c(1.102,2.771,0.5) = 4.408");
  Report(1, v, Seconds(start), 1.0);
}

void ScalarOracle() {
  const auto start = Clock::now();
  Verdict v;
  int runs = 0;
  int bad = 0;
  for (int i = 1; i <= 24; ++i) {
    ScalarOracleConfig cfg;
    cfg.delta = 0.01 * i;
    const ProblemBundle b = GenScalarOracleProblem(cfg);
    for (int e = -3; e <= 3; ++e) {
      for (double q : {0.3, 0.5, 0.7}) {
        MdpConfig mdp = cfg.mdp;
        mdp.alpha0 = std::pow(10.0, e);
        mdp.q = q;
        const AlphaSearchResult r = AlphaSearch(b.problem, mdp, b.delta);
        ++runs;
        const double d = r.result.discrepancy;
        if (!r.accepted() || d < mdp.tau1 * b.delta || d > mdp.c() * b.delta) ++bad;
      }
    }
  }
  v.detail << runs << " searches, " << bad << " failures";
  v.Require(bad == 0, "zero failures");
  Report(2, v, Seconds(start), 5.0);
}

void CsSixtyDecibels() {
  const auto start = Clock::now();
  Verdict v;
  std::vector<double> a1;
  std::vector<double> ub;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    CsConfig cfg;
    cfg.seed = seed;
    const ExperimentResult r = RunCsExperiment(cfg, AlphaMode::kAlgorithm1);
    const StudyRecord& rec = r.record;
    if (seed == 1) {
      v.detail << "seed 1: delta=" << rec.delta << " alpha=" << rec.alpha
               << " discrepancy/delta=" << rec.discrepancy / rec.delta << ";";
    }
    v.Require(rec.outcome == "accepted", "seed " + std::to_string(seed) + " accepted");
    v.Require(rec.discrepancy >= rec.delta && rec.discrepancy <= 4 * rec.delta,
              "seed " + std::to_string(seed) + " discrepancy in [delta, 4 delta]");
    a1.push_back(rec.relative_error);
    ub.push_back(RunCsExperiment(cfg, AlphaMode::kUpperBound).record.relative_error);
  }
  v.detail << " median Rerror algorithm1=" << Median(a1) << " upper-bound=" << Median(ub);
  v.Require(Median(a1) <= 0.05, "median algorithm1 Rerror <= 0.05");
  v.Require(Median(ub) <= 0.10, "median upper-bound Rerror <= 0.10");
  Report(3, v, Seconds(start), 120.0);
}

void ClassicalGap() {
  const auto start = Clock::now();
  Verdict v;
  CsConfig cfg;
  cfg.snr_db = 30.0;
  const ProblemBundle b = GenCsProblem(cfg);
  std::vector<double> grid;
  for (int j = 7; j >= 0; --j) grid.push_back(0.5 * std::ldexp(1.0, -j));
  const auto rows = SweepAlpha(b.problem, grid, WarmStartPolicy::kWarm, b.x_true);
  const GapReport gap = ClassicalGapReport(rows, b.delta, cfg.mdp);
  v.detail << "delta=" << b.delta << " classical hits=" << gap.classical_indices.size()
           << " widened hits=" << gap.widened_indices.size()
           << " max jump/delta=" << gap.max_jump / b.delta;
  if (!gap.classical_hit) {
    v.detail << "; gap observed";
    v.Require(gap.widened_hit, "a sweep point in [delta, 4 delta]");
  } else {
    const AlphaSearchResult r = AlphaSearch(b.problem, cfg.mdp, b.delta);
    v.detail << "; classical window hit, fallback: algorithm1 "
             << ToString(r.trace.outcome) << " at alpha=" << r.alpha;
    v.Require(r.accepted(), "algorithm1 acceptance (fallback)");
  }
  Report(4, v, Seconds(start), 60.0);
}

void Gravity() {
  const auto start = Clock::now();
  Verdict v;
  GravityConfig cfg;
  const ExperimentResult a1 = RunGravityExperiment(cfg, AlphaMode::kAlgorithm1);
  const ExperimentResult ub = RunGravityExperiment(cfg, AlphaMode::kUpperBound);
  const StudyRecord& rec = a1.record;
  double worst = 0.0;
  std::ostringstream params;
  for (Eigen::Index i = 0; i < a1.solution.x.size(); ++i) {
    worst = std::max(worst, std::abs(a1.solution.x[i] - a1.bundle.x_true[i]));
    params << (i ? "," : "") << a1.solution.x[i];
  }
  v.detail << "delta=" << rec.delta << " c_delta/delta=" << rec.c_delta / rec.delta
           << " algorithm1 alpha=" << rec.alpha << " Rerror=" << rec.relative_error
           << " params=[" << params.str() << "] max param error=" << worst
           << " upper-bound Rerror=" << ub.record.relative_error;
  v.Require(rec.delta >= 2.0e-7 && rec.delta <= 3.5e-7, "delta in [2.0e-7, 3.5e-7]");
  v.Require(std::abs(rec.c_delta / rec.delta - 4.408) <= 1e-12, "c_delta/delta = 4.408");
  v.Require(rec.outcome == "accepted", "algorithm1 accepted");
  v.Require(rec.relative_error <= 0.06, "algorithm1 Rerror <= 0.06");
  v.Require(worst <= 10.0, "every parameter within 10 of truth");
  v.Require(ub.record.relative_error <= 0.18, "upper-bound Rerror <= 0.18");
  Report(5, v, Seconds(start), 60.0);
}

std::vector<SweepRecord> Converged(const std::vector<SweepRecord>& rows) {
  std::vector<SweepRecord> out;
  for (const SweepRecord& r : rows) {
    if (r.error.empty() && r.optimality_residual >= -1e-6) out.push_back(r);
  }
  return out;
}

struct MonotonicityStats {
  int rows = 0;
  int violations = 0;
  double max_m_jump = 0.0;
};

MonotonicityStats CheckSweep(const std::vector<SweepRecord>& all) {
  const std::vector<SweepRecord> rows = Converged(all);
  MonotonicityStats s;
  s.rows = static_cast<int>(rows.size());
  const auto slack = [](double x) { return 1e-6 * (1 + std::abs(x)); };
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const SweepRecord& a = rows[i - 1];
    const SweepRecord& b = rows[i];
    if (b.discrepancy < a.discrepancy - slack(a.discrepancy)) ++s.violations;
    if (b.penalty > a.penalty + slack(a.penalty)) ++s.violations;
    if (b.functional < a.functional - slack(a.functional)) ++s.violations;
    s.max_m_jump = std::max(s.max_m_jump, std::abs(b.functional - a.functional));
  }
  return s;
}

// Log grid from a to b with `intervals` intervals.
std::vector<double> LogGrid(double a, double b, int intervals) {
  std::ostringstream spec;
  spec << "log:" << FormatDouble(a) << ":" << FormatDouble(b) << ":" << intervals + 1;
  return ParseAlphaGrid(spec.str());
}

void Monotonicity() {
  const auto start = Clock::now();
  Verdict v;
  CsConfig cs;
  cs.snr_db = 30.0;
  GravityConfig gravity;
  struct Case {
    std::string name;
    ProblemBundle bundle;
    double lo;
    double hi;
    int intervals;
  } cases[] = {{"cs", GenCsProblem(cs), 0.5 * std::ldexp(1.0, -7), 0.5, 7},
               {"gravity", GenGravityProblem(gravity), 1e-4, 1.0, 19}};
  for (const Case& c : cases) {
    const auto coarse = SweepAlpha(c.bundle.problem, LogGrid(c.lo, c.hi, c.intervals),
                                   WarmStartPolicy::kWarm, c.bundle.x_true);
    const auto fine = SweepAlpha(c.bundle.problem, LogGrid(c.lo, c.hi, 4 * c.intervals),
                                 WarmStartPolicy::kWarm, c.bundle.x_true);
    const MonotonicityStats sc = CheckSweep(coarse);
    const MonotonicityStats sf = CheckSweep(fine);
    const double shrink = sf.max_m_jump > 0.0 ? sc.max_m_jump / sf.max_m_jump : INFINITY;
    v.detail << c.name << ": converged rows " << sc.rows << "/" << coarse.size() << " and "
             << sf.rows << "/" << fine.size() << ", violations " << sc.violations + sf.violations
             << ", m-jump shrink " << shrink << "x; ";
    v.Require(sc.rows >= 2 && sf.rows >= 2, c.name + " has converged rows");
    v.Require(sc.violations + sf.violations == 0, c.name + " G, R, m monotone");
    v.Require(shrink >= 2.0, c.name + " m-jump shrinks >= 2x under 4x refinement");
  }
  Report(6, v, Seconds(start), 300.0);
}

void KernelOracles() {
  const auto start = Clock::now();
  Verdict v;
  Rng rng(7);
  double prox_err = 0.0;
  for (int k = 0; k < 100; ++k) {
    const double x = rng.Uniform(-3.0, 3.0);
    const double t = rng.Uniform(0.0, 2.0);
    // Brute force: grid minimum of 1/2 (z - x)^2 + t |z|, then bisection on
    // the right derivative inside the winning cell.
    const auto phi = [&](double z) { return 0.5 * (z - x) * (z - x) + t * std::abs(z); };
    double best = -4.0;
    for (double z = -4.0; z <= 4.0; z += 1e-4) {
      if (phi(z) < phi(best)) best = z;
    }
    const auto right = [&](double z) { return z - x + (z >= 0.0 ? t : -t); };
    double lo = best - 2e-4;
    double hi = best + 2e-4;
    if (right(lo) >= 0.0) {
      hi = lo;
    } else {
      for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (right(mid) >= 0.0 ? hi : lo) = mid;
      }
    }
    prox_err = std::max(prox_err, std::abs(SoftThreshold(Vector::Constant(1, x), t)[0] - hi));
  }
  CsConfig cs;
  const ProblemBundle c = GenCsProblem(cs);
  const ProblemBundle g = GenGravityProblem(GravityConfig{});
  const double cs_fd = CheckJacobianFd(*c.problem.op, rng.NormalVector(200)).max_rel_error;
  const double g_fd = CheckJacobianFd(*g.problem.op, g.x_true).max_rel_error;
  double adj = 0.0;
  for (int k = 0; k < 100; ++k) {
    adj = std::max(adj, AdjointMismatch(*c.problem.op, rng.NormalVector(200),
                                        rng.NormalVector(200), rng.NormalVector(80)));
    Vector x = g.x_true;
    for (Eigen::Index i = 0; i < 4; ++i) x[i] += rng.Uniform(-50.0, 50.0);
    adj = std::max(adj, AdjointMismatch(*g.problem.op, x, rng.NormalVector(4),
                                        rng.NormalVector(50)));
  }
  v.detail << "prox error " << prox_err << ", FD rel error cs " << cs_fd << " gravity " << g_fd
           << ", adjoint mismatch " << adj;
  v.Require(prox_err <= 1e-9, "soft threshold within 1e-9");
  v.Require(cs_fd < 1e-5 && g_fd < 1e-5, "Jacobian FD < 1e-5");
  v.Require(adj <= 1e-10, "adjoint identity to 1e-10");
  Report(7, v, Seconds(start), 10.0);
}

void NoiseStudy() {
  const auto start = Clock::now();
  Verdict v;
  CsConfig cfg;
  const NoiseStudyResult r = CsNoiseLevelStudy(
      cfg, {30, 35, 40, 45, 50, 55, 60}, 5, AlphaMode::kAlgorithm1, 0);
  int accepted = 0;
  for (const StudyRecord& rec : r.records) accepted += rec.outcome == "accepted";
  const double rho_a = r.rho_delta_alpha.value_or(NAN);
  const double rho_e = r.rho_level_rerror.value_or(NAN);
  v.detail << r.records.size() << " runs, " << accepted << " accepted, spearman(delta, alpha)="
           << rho_a << " spearman(snr, Rerror)=" << rho_e;
  v.Require(r.records.size() == 35, "35 runs");
  v.Require(rho_a > 0.0, "spearman(delta, alpha) > 0");
  v.Require(rho_e < 0.0, "spearman(snr, Rerror) < 0");
  Report(8, v, Seconds(start), 600.0);
}

void BregmanRate() {
  const auto start = Clock::now();
  Verdict v;
  GravityConfig cfg;
  const RateStudyResult r =
      GravityBregmanRateStudy(cfg, {0.02, 0.01, 0.005, 0.0025, 0.00125}, 0);
  const StudyRecord& top = r.records.front();
  const double k = top.bregman_distance / top.delta;
  bool bounded = true;
  for (const StudyRecord& rec : r.records) {
    v.detail << "(" << rec.delta << ", " << rec.bregman_distance << ") ";
    bounded = bounded && rec.bregman_distance <= k * rec.delta;
  }
  v.detail << "slope=" << r.slope << " K=" << k;
  v.Require(r.slope >= 0.5 && r.slope <= 1.5, "slope in [0.5, 1.5]");
  v.Require(bounded, "d <= K delta");
  Report(9, v, Seconds(start), 300.0);
}

void Reproducibility() {
  const auto start = Clock::now();
  Verdict v;
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / "morozov_acceptance_replay";
  fs::remove_all(root);
  const std::vector<std::string> configs = {
      "experiment = cs\nmode = algorithm1\nseed = 4\n",
      "experiment = cs\nmode = upper-bound\n",
      "experiment = cs\nmode = sweep\nalpha_grid = log:1e-3:1:12\nsweep_warm_start = cold\n"
      "jobs = 3\n",
      "experiment = cs\nmode = noise-study\nlevels = 40, 60\nseeds_per_level = 2\njobs = 2\n",
      "experiment = gravity\nmode = algorithm1\n",
      "experiment = gravity\nmode = upper-bound\n",
      "experiment = gravity\nmode = rate-study\n",
      "experiment = scalar-oracle\nmode = sweep\nalpha_grid = lin:0.05:1.5:30\n",
      "experiment = cs\nmode = check\n",
  };
  int compared = 0;
  int differing = 0;
  std::ostringstream log;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    RunConfig cfg = ParseConfigText(configs[i]);
    cfg.out = (root / ("run" + std::to_string(i))).string();
    const RunReport first = Run(cfg, log);
    const std::string manifest = cfg.out + "/manifest.json";
    RunConfig again = ConfigFromManifest(manifest);
    again.out = cfg.out + "_replay";
    const RunReport second = Run(again, log);
    const auto diff = DifferingOutputs(manifest, cfg.out, again.out);
    compared += static_cast<int>(first.files.size()) - 1;
    differing += static_cast<int>(diff.size());
    for (const auto& f : diff) v.detail << "differs: run" << i << "/" << f << " ";
    v.Require(first.exit_code == second.exit_code, "run" + std::to_string(i) + " exit code");
  }
  fs::remove_all(root);
  v.detail << configs.size() << " manifests replayed, " << compared << " files compared, "
           << differing << " differ";
  v.Require(differing == 0, "bit-identical replay");
  Report(10, v, Seconds(start), 600.0);
}

}  // namespace
}  // namespace morozov

int main() {
  using namespace morozov;
  const std::vector<void (*)()> criteria = {ConstantC, ScalarOracle, CsSixtyDecibels,
                                           ClassicalGap, Gravity, Monotonicity,
                                           KernelOracles, NoiseStudy, BregmanRate,
                                           Reproducibility};
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    try {
      criteria[i]();
    } catch (const std::exception& e) {
      ++failures;
      std::cout << "criterion " << i + 1 << ": FAIL exception: " << e.what() << std::endl;
    }
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) +
                                                            " criteria failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
