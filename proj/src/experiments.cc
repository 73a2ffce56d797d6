#include "morozov/experiments.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "morozov/random.h"

namespace morozov {

std::string ToString(AlphaMode mode) {
  return mode == AlphaMode::kAlgorithm1 ? "algorithm1" : "upper-bound";
}

std::string ToString(PenaltyReference r) {
  return r == PenaltyReference::kZero ? "zero" : "initial-guess";
}

PenaltyReference ParsePenaltyReference(const std::string& s) {
  if (s == "zero") return PenaltyReference::kZero;
  if (s == "initial-guess") return PenaltyReference::kInitialGuess;
  throw InvalidInput("unknown penalty reference '" + s + "'");
}

MdpConfig CsConfig::DefaultMdp() {
  MdpConfig m;
  m.tau1 = 1.0;
  m.tau2 = 2.0;
  m.gamma = 0.5;
  m.q = 0.5;
  m.alpha0 = 0.5;
  return m;
}

void CsConfig::Validate() const {
  if (n < 1 || m < 1) throw InvalidInput("cs: n and m must be >= 1");
  if (m > n) throw InvalidInput("cs: m must not exceed n");
  if (p < 0 || p > n) throw InvalidInput("cs: p must lie in [0, n]");
  if (!(matrix_scale > 0.0)) throw InvalidInput("cs: matrix_scale must be > 0");
  if (!(amplitude.min_magnitude >= 0.0) ||
      !(amplitude.max_magnitude >= amplitude.min_magnitude)) {
    throw InvalidInput("cs: amplitude range must satisfy 0 <= min <= max");
  }
  if (!(upper_bound_step > 0.0)) {
    throw InvalidInput("cs: upper_bound_step must be > 0");
  }
  mdp.Validate();
  solver.Validate();
}

MdpConfig GravityConfig::DefaultMdp() {
  MdpConfig m;
  m.tau1 = 1.102;
  m.tau2 = 2.771;
  m.gamma = 0.5;
  m.q = 0.5;
  m.alpha0 = 1.0;
  return m;
}

SolverConfig GravityConfig::DefaultSolver() {
  SolverConfig s;
  s.max_iterations = 500;
  return s;
}

void GravityConfig::Validate() const {
  if (station_count < 1) throw InvalidInput("gravity: station_count must be >= 1");
  if (!(station_max > station_min)) {
    throw InvalidInput("gravity: station range must be nondegenerate");
  }
  if (radii.empty() || radii.size() != density_contrast.size()) {
    throw InvalidInput("gravity: one radius and density contrast per sphere");
  }
  const std::size_t n_params = 2 * radii.size();
  if (true_params.size() != n_params || init_params.size() != n_params) {
    throw InvalidInput("gravity: parameter vectors must have 2 entries per sphere");
  }
  for (std::size_t k = 1; k < n_params; k += 2) {
    if (!(true_params[k] > 0.0) || !(init_params[k] > 0.0)) {
      throw InvalidInput("gravity: depths must be > 0");
    }
  }
  if (!(noise_fraction >= 0.0)) {
    throw InvalidInput("gravity: noise_fraction must be >= 0");
  }
  if (!(penalty_length_scale > 0.0) || !(data_unit > 0.0)) {
    throw InvalidInput("gravity: penalty scales must be > 0");
  }
  if (!(upper_bound_step > 0.0)) {
    throw InvalidInput("gravity: upper_bound_step must be > 0");
  }
  mdp.Validate();
  solver.Validate();
}

void ScalarOracleConfig::Validate() const {
  if (!(delta > 0.0)) throw InvalidInput("scalar-oracle: delta must be > 0");
  mdp.Validate();
}

// ---------------------------------------------------------------------------

Vector GenSparseSignal(int n, int p, const AmplitudeRule& rule,
                       std::uint64_t seed) {
  if (n < 0 || p < 0) throw InvalidInput("GenSparseSignal: negative size");
  if (p > n) throw InvalidInput("GenSparseSignal: p exceeds n");
  Rng rng(seed);
  std::vector<int> positions(n);
  std::iota(positions.begin(), positions.end(), 0);
  // Partial Fisher-Yates: the first p entries become a uniform p-subset.
  for (int i = 0; i < p; ++i) {
    const auto j = static_cast<int>(rng.UniformInt(i, n - 1));
    std::swap(positions[i], positions[j]);
  }
  Vector x = Vector::Zero(n);
  for (int i = 0; i < p; ++i) {
    double magnitude = rng.Uniform(rule.min_magnitude, rule.max_magnitude);
    if (magnitude == 0.0) magnitude = rule.max_magnitude;
    const double sign = rng.UniformInt(0, 1) == 0 ? -1.0 : 1.0;
    x[positions[i]] = sign * magnitude;
  }
  return x;
}

NoisyData AddAwgn(const Vector& y, double snr_db, std::uint64_t seed) {
  if (y.size() == 0) throw InvalidInput("AddAwgn: empty signal");
  const double snr = std::min(snr_db, 300.0);
  const double power = y.squaredNorm() / static_cast<double>(y.size());
  const double stddev = std::sqrt(power / std::pow(10.0, snr / 10.0));
  Rng rng(seed);
  NoisyData out;
  out.y_delta = y + stddev * rng.NormalVector(y.size());
  out.delta = (out.y_delta - y).norm();
  return out;
}

NoisyData AddProportionalNoise(const Vector& y, double fraction,
                               std::uint64_t seed) {
  if (!(fraction >= 0.0)) {
    throw InvalidInput("AddProportionalNoise: fraction must be >= 0");
  }
  NoisyData out;
  if (fraction == 0.0) {
    out.y_delta = y;
    return out;
  }
  Rng rng(seed);
  const Vector g = rng.NormalVector(y.size());
  out.y_delta = y + (fraction * y.norm() / g.norm()) * g;
  out.delta = (out.y_delta - y).norm();
  return out;
}

ProblemBundle GenCsProblem(const CsConfig& cfg) {
  cfg.Validate();
  Rng matrix_rng(MixSeed(cfg.seed, 0));
  CsOperatorSpec spec;
  spec.matrix = matrix_rng.NormalMatrix(cfg.m, cfg.n);
  spec.pre_power = cfg.pre_power;
  spec.post_power = cfg.post_power;
  spec.scale = cfg.matrix_scale;
  auto op = std::make_shared<const CsOperator>(spec);

  ProblemBundle b;
  b.raw_matrix_norm = op->raw_norm();
  b.scaled_matrix_norm = op->scaled_norm();
  b.x_true = GenSparseSignal(cfg.n, cfg.p, cfg.amplitude, MixSeed(cfg.seed, 1));
  b.y_clean = op->Evaluate(b.x_true);
  NoisyData noisy = AddAwgn(b.y_clean, cfg.snr_db, MixSeed(cfg.seed, 2));
  b.delta = noisy.delta;
  b.problem.op = op;
  b.problem.y_delta = std::move(noisy.y_delta);
  b.problem.penalty = std::make_shared<const L1Penalty>();
  b.problem.solver = SolverKind::kIsta;
  b.problem.config = cfg.solver;
  b.problem.initial_guess = Vector::Zero(cfg.n);
  return b;
}

ProblemBundle GenGravityProblem(const GravityConfig& cfg) {
  cfg.Validate();
  GravitySceneSpec scene;
  scene.radii = cfg.radii;
  scene.density_contrast = cfg.density_contrast;
  scene.gravitational_constant = cfg.gravitational_constant;
  scene.stations =
      EquispacedStations(cfg.station_min, cfg.station_max, cfg.station_count);
  auto op = std::make_shared<const GravityOperator>(std::move(scene));

  const Eigen::Index n = op->input_dim();
  ProblemBundle b;
  b.x_true = Eigen::Map<const Vector>(cfg.true_params.data(), n);
  const Vector init = Eigen::Map<const Vector>(cfg.init_params.data(), n);
  b.y_clean = op->Evaluate(b.x_true);
  NoisyData noisy =
      AddProportionalNoise(b.y_clean, cfg.noise_fraction, MixSeed(cfg.seed, 2));
  b.delta = noisy.delta;

  const Vector scaling =
      Vector::Constant(n, cfg.data_unit / cfg.penalty_length_scale);
  const Vector reference = cfg.penalty_reference == PenaltyReference::kZero
                               ? Vector::Zero(n)
                               : init;
  b.problem.op = op;
  b.problem.y_delta = std::move(noisy.y_delta);
  b.problem.penalty = std::make_shared<const QuadraticPenalty>(scaling, reference);
  b.problem.solver = SolverKind::kLandweber;
  b.problem.config = cfg.solver;
  b.problem.initial_guess = init;
  return b;
}

ProblemBundle GenScalarOracleProblem(const ScalarOracleConfig& cfg) {
  cfg.Validate();
  ProblemBundle b;
  b.problem.op = std::make_shared<const LinearOperator>(Matrix::Identity(1, 1));
  b.problem.y_delta = Vector::Ones(1);
  b.problem.penalty = std::make_shared<const L1Penalty>();
  b.problem.solver = SolverKind::kIsta;
  b.problem.config.step_policy = StepPolicy::kFixed;
  b.problem.config.fixed_lambda = 1.0;
  b.problem.initial_guess = Vector::Zero(1);
  b.x_true = Vector::Ones(1);
  b.y_clean = Vector::Ones(1);
  b.delta = cfg.delta;
  return b;
}

double RelativeError(const Vector& x, const Vector& x_true) {
  RequireSize(x, x_true.size(), "RelativeError");
  const double norm = x_true.norm();
  if (norm == 0.0) {
    throw InvalidInput("RelativeError: true solution is zero");
  }
  return (x - x_true).norm() / norm;
}

// ---------------------------------------------------------------------------

namespace {

SweepRecord ToSweepRecord(const SolverResult& r, const Vector& x_true) {
  SweepRecord rec;
  rec.alpha = r.alpha;
  rec.discrepancy = r.discrepancy;
  rec.penalty = r.penalty_value;
  rec.functional = r.functional_value;
  rec.relative_error = x_true.norm() > 0.0 ? RelativeError(r.x, x_true) : 0.0;
  rec.status = r.status;
  rec.optimality_residual = r.optimality_residual;
  rec.iterations = r.iterations_used;
  return rec;
}

// Walks alpha0 +/- step k towards discrepancy = c delta; returns the index of
// the chosen row in `scan`.
std::size_t UpperBoundScan(const TikhonovProblem& problem, double alpha0,
                           const SolverResult& start, double c_delta,
                           double step, int max_steps, const Vector& x_true,
                           std::vector<SweepRecord>& scan,
                           std::vector<SolverResult>& solutions) {
  scan.push_back(ToSweepRecord(start, x_true));
  solutions.push_back(start);
  if (start.discrepancy <= c_delta) {
    std::size_t chosen = 0;
    for (int k = 1; k <= max_steps; ++k) {
      const double alpha = alpha0 + step * k;
      SolverResult r = SolveForAlpha(problem, alpha, solutions.back().x);
      const bool ok = r.discrepancy <= c_delta;
      scan.push_back(ToSweepRecord(r, x_true));
      solutions.push_back(std::move(r));
      if (!ok) break;
      chosen = scan.size() - 1;
    }
    return chosen;
  }
  for (int k = 1; k <= max_steps; ++k) {
    const double alpha = alpha0 - step * k;
    if (!(alpha > 0.0)) break;
    SolverResult r = SolveForAlpha(problem, alpha, solutions.back().x);
    const bool ok = r.discrepancy <= c_delta;
    scan.push_back(ToSweepRecord(r, x_true));
    solutions.push_back(std::move(r));
    if (ok) return scan.size() - 1;
  }
  // Nothing at or below c delta on the grid: keep the closest row.
  return scan.size() - 1;
}

}  // namespace

ExperimentResult RunExperiment(ProblemBundle bundle, const MdpConfig& mdp,
                               AlphaMode mode, double upper_bound_step,
                               int upper_bound_max_steps) {
  mdp.Validate();
  if (bundle.x_true.norm() == 0.0) {
    throw InvalidInput("RunExperiment: zero true solution, relative error undefined");
  }
  ExperimentResult out;
  out.bundle = std::move(bundle);
  const ProblemBundle& b = out.bundle;
  StudyRecord& rec = out.record;
  rec.mode = ToString(mode);
  rec.delta = b.delta;
  rec.c_delta = mdp.c() * b.delta;

  if (b.delta == 0.0) {
    out.solution = SolveForAlpha(b.problem, mdp.alpha0);
    rec.outcome = "noise-free";
  } else {
    AlphaSearchResult search = AlphaSearch(b.problem, mdp, b.delta);
    out.trace = std::move(search.trace);
    out.solution = std::move(search.result);
    rec.outcome = ToString(out.trace.outcome);
    if (mode == AlphaMode::kUpperBound) {
      std::vector<SolverResult> solutions;
      const std::size_t chosen = UpperBoundScan(
          b.problem, out.solution.alpha, out.solution, rec.c_delta,
          upper_bound_step, upper_bound_max_steps, b.x_true,
          out.upper_bound_scan, solutions);
      out.solution = std::move(solutions[chosen]);
    }
  }
  rec.alpha = out.solution.alpha;
  rec.discrepancy = out.solution.discrepancy;
  rec.relative_error = RelativeError(out.solution.x, b.x_true);
  rec.bregman_distance =
      BregmanDistance(*b.problem.penalty, out.solution.x, b.x_true).distance;
  rec.solver_status = ToString(out.solution.status);
  rec.solver_iterations = out.solution.iterations_used;
  return out;
}

ExperimentResult RunCsExperiment(const CsConfig& cfg, AlphaMode mode) {
  ExperimentResult out = RunExperiment(GenCsProblem(cfg), cfg.mdp, mode,
                                       cfg.upper_bound_step,
                                       cfg.upper_bound_max_steps);
  out.record.experiment = "cs";
  out.record.level = cfg.snr_db;
  out.record.seed = cfg.seed;
  return out;
}

ExperimentResult RunGravityExperiment(const GravityConfig& cfg,
                                      AlphaMode mode) {
  ExperimentResult out = RunExperiment(GenGravityProblem(cfg), cfg.mdp, mode,
                                       cfg.upper_bound_step,
                                       cfg.upper_bound_max_steps);
  out.record.experiment = "gravity";
  out.record.level = cfg.noise_fraction;
  out.record.seed = cfg.seed;
  return out;
}

// ---------------------------------------------------------------------------

std::vector<SweepRecord> SweepAlpha(const TikhonovProblem& problem,
                                    std::vector<double> alpha_grid,
                                    WarmStartPolicy policy,
                                    const Vector& x_true, int jobs) {
  if (alpha_grid.empty()) throw InvalidInput("SweepAlpha: empty grid");
  for (std::size_t i = 0; i < alpha_grid.size(); ++i) {
    if (!(alpha_grid[i] > 0.0)) throw InvalidInput("SweepAlpha: alpha must be > 0");
    if (i > 0 && !(alpha_grid[i] > alpha_grid[i - 1])) {
      throw InvalidInput("SweepAlpha: grid must be strictly increasing");
    }
  }
  const int count = static_cast<int>(alpha_grid.size());
  std::vector<SweepRecord> rows(count);
  const auto solve_row = [&](int i, const std::optional<Vector>& warm,
                             Vector* solution) {
    try {
      SolverResult r = SolveForAlpha(problem, alpha_grid[i], warm);
      rows[i] = ToSweepRecord(r, x_true);
      if (solution) *solution = std::move(r.x);
      return true;
    } catch (const std::exception& e) {
      rows[i] = SweepRecord{};
      rows[i].alpha = alpha_grid[i];
      rows[i].error = e.what();
      return false;
    }
  };
  if (policy == WarmStartPolicy::kWarm) {
    std::optional<Vector> warm;
    for (int i = count - 1; i >= 0; --i) {
      Vector x;
      if (solve_row(i, warm, &x)) warm = std::move(x);
    }
  } else {
    ParallelFor(count, jobs, [&](int i) { solve_row(i, std::nullopt, nullptr); });
  }
  return rows;
}

std::vector<double> ParseAlphaGrid(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) {
    throw InvalidInput("alpha grid '" + spec + "': expected KIND:...");
  }
  const std::string kind = spec.substr(0, colon);
  std::vector<std::string> parts;
  {
    std::string rest = spec.substr(colon + 1);
    const char sep = kind == "list" ? ',' : ':';
    std::stringstream ss(rest);
    std::string item;
    while (std::getline(ss, item, sep)) parts.push_back(item);
  }
  const auto number = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size()) {
      throw InvalidInput("alpha grid '" + spec + "': bad number '" + s + "'");
    }
    return v;
  };
  std::vector<double> grid;
  if (kind == "list") {
    for (const auto& p : parts) grid.push_back(number(p));
  } else if (kind == "lin" || kind == "log") {
    if (parts.size() != 3) {
      throw InvalidInput("alpha grid '" + spec + "': expected " + kind + ":a:b:n");
    }
    const double a = number(parts[0]);
    const double b = number(parts[1]);
    const double n_real = number(parts[2]);
    const int n = static_cast<int>(n_real);
    if (n < 1 || n != n_real) {
      throw InvalidInput("alpha grid '" + spec + "': n must be a positive integer");
    }
    if (kind == "log" && !(a > 0.0 && b > 0.0)) {
      throw InvalidInput("alpha grid '" + spec + "': log endpoints must be > 0");
    }
    for (int i = 0; i < n; ++i) {
      const double t = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
      if (i == 0) {
        grid.push_back(a);
        continue;
      }
      if (i == n - 1) {
        grid.push_back(b);
        continue;
      }
      grid.push_back(kind == "lin"
                         ? a + (b - a) * t
                         : std::exp(std::log(a) + (std::log(b) - std::log(a)) * t));
    }
  } else {
    throw InvalidInput("alpha grid '" + spec + "': unknown kind '" + kind + "'");
  }
  if (grid.empty()) throw InvalidInput("alpha grid '" + spec + "': no alphas");
  std::sort(grid.begin(), grid.end());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0)) {
      throw InvalidInput("alpha grid '" + spec + "': alphas must be > 0");
    }
    if (i > 0 && grid[i] == grid[i - 1]) {
      throw InvalidInput("alpha grid '" + spec + "': duplicate alpha");
    }
  }
  return grid;
}

// ---------------------------------------------------------------------------

namespace {

NoiseStudyResult RunNoiseStudy(
    const std::vector<double>& levels, int seeds_per_level, std::uint64_t base,
    int jobs, const std::function<StudyRecord(double, std::uint64_t)>& run) {
  if (levels.empty()) throw InvalidInput("noise study: empty level list");
  if (seeds_per_level < 1) throw InvalidInput("noise study: seeds_per_level < 1");
  const int count = static_cast<int>(levels.size()) * seeds_per_level;
  NoiseStudyResult out;
  out.records.resize(count);
  ParallelFor(count, jobs, [&](int i) {
    const double level = levels[i / seeds_per_level];
    const std::uint64_t seed = MixSeed(base, static_cast<std::uint64_t>(i));
    try {
      out.records[i] = run(level, seed);
    } catch (const std::exception& e) {
      StudyRecord& r = out.records[i];
      r.level = level;
      r.seed = seed;
      r.outcome = std::string("error: ") + e.what();
    }
  });
  std::vector<double> delta, alpha, level, rerr;
  for (const auto& r : out.records) {
    if (r.outcome.rfind("error", 0) == 0) continue;
    delta.push_back(r.delta);
    alpha.push_back(r.alpha);
    level.push_back(r.level);
    rerr.push_back(r.relative_error);
  }
  if (delta.size() >= 2) {
    out.rho_delta_alpha = SpearmanCorrelation(delta, alpha);
    out.rho_level_rerror = SpearmanCorrelation(level, rerr);
  }
  return out;
}

}  // namespace

NoiseStudyResult CsNoiseLevelStudy(const CsConfig& cfg,
                                   const std::vector<double>& snr_db,
                                   int seeds_per_level, AlphaMode mode,
                                   int jobs) {
  return RunNoiseStudy(snr_db, seeds_per_level, cfg.seed, jobs,
                       [&](double level, std::uint64_t seed) {
                         CsConfig c = cfg;
                         c.snr_db = level;
                         c.seed = seed;
                         return RunCsExperiment(c, mode).record;
                       });
}

NoiseStudyResult GravityNoiseLevelStudy(const GravityConfig& cfg,
                                        const std::vector<double>& fractions,
                                        int seeds_per_level, AlphaMode mode,
                                        int jobs) {
  return RunNoiseStudy(fractions, seeds_per_level, cfg.seed, jobs,
                       [&](double level, std::uint64_t seed) {
                         GravityConfig c = cfg;
                         c.noise_fraction = level;
                         c.seed = seed;
                         return RunGravityExperiment(c, AlphaMode(mode)).record;
                       });
}

RateStudyResult GravityBregmanRateStudy(const GravityConfig& cfg,
                                        const std::vector<double>& fractions,
                                        int jobs) {
  std::vector<double> levels = fractions;
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  if (levels.size() < 4) {
    throw InvalidInput("rate study: at least four distinct noise levels required");
  }
  RateStudyResult out;
  out.records.resize(fractions.size());
  ParallelFor(static_cast<int>(fractions.size()), jobs, [&](int i) {
    GravityConfig c = cfg;
    c.noise_fraction = fractions[i];
    out.records[i] = RunGravityExperiment(c, AlphaMode::kAlgorithm1).record;
  });
  std::vector<double> lx, ly;
  out.used_in_fit.assign(out.records.size(), false);
  for (std::size_t i = 0; i < out.records.size(); ++i) {
    const StudyRecord& r = out.records[i];
    if (r.delta > 0.0 && r.bregman_distance > 0.0) {
      out.used_in_fit[i] = true;
      lx.push_back(std::log(r.delta));
      ly.push_back(std::log(r.bregman_distance));
    }
  }
  out.points_used = static_cast<int>(lx.size());
  if (lx.size() >= 2) {
    const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / lx.size();
    const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / ly.size();
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      sxx += (lx[i] - mx) * (lx[i] - mx);
      sxy += (lx[i] - mx) * (ly[i] - my);
    }
    out.slope = sxx > 0.0 ? sxy / sxx : 0.0;
    out.intercept = my - out.slope * mx;
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<double> AverageRanks(const std::vector<double>& v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double SpearmanCorrelation(const std::vector<double>& a,
                           const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2) {
    throw InvalidInput("SpearmanCorrelation: need two equal-length samples");
  }
  const std::vector<double> ra = AverageRanks(a);
  const std::vector<double> rb = AverageRanks(b);
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

void ParallelFor(int count, int jobs, const std::function<void(int)>& body) {
  if (count <= 0) return;
  const int workers = std::clamp(jobs, 1, count);
  if (workers == 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> threads;
    threads.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      threads.emplace_back([&] {
        for (int i = next++; i < count; i = next++) {
          try {
            body(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace morozov
