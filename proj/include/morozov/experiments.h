#ifndef MOROZOV_EXPERIMENTS_H_
#define MOROZOV_EXPERIMENTS_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "morozov/mdp.h"
#include "morozov/solvers.h"

namespace morozov {

enum class AlphaMode { kAlgorithm1, kUpperBound };
std::string ToString(AlphaMode mode);

struct AmplitudeRule {
  double min_magnitude = 0.5;
  double max_magnitude = 1.5;
};

struct CsConfig {
  int n = 200;
  int m = 80;
  int p = 16;
  double snr_db = 60.0;
  double matrix_scale = 0.05;
  int pre_power = 3;
  int post_power = 1;
  AmplitudeRule amplitude;
  MdpConfig mdp = DefaultMdp();
  SolverConfig solver;
  // Grid spacing and length cap for the upper-bound alpha scan.
  double upper_bound_step = 0.001;
  int upper_bound_max_steps = 5000;
  std::uint64_t seed = 1;

  static MdpConfig DefaultMdp();
  void Validate() const;
};

enum class PenaltyReference { kZero, kInitialGuess };
std::string ToString(PenaltyReference r);
PenaltyReference ParsePenaltyReference(const std::string& s);

struct GravityConfig {
  int station_count = 50;
  double station_min = -500.0;
  double station_max = 500.0;
  std::vector<double> true_params = {-200.0, 150.0, 200.0, 200.0};
  std::vector<double> init_params = {-150.0, 100.0, 150.0, 250.0};
  std::vector<double> radii = {100.0, 100.0};
  std::vector<double> density_contrast = {300.0, 300.0};
  double gravitational_constant = 6.674e-11;
  double noise_fraction = 0.02;
  // Quadratic penalty 1/2 ||D (x - ref)||^2 with D_ii = data_unit / length
  // scale: parameters measured in units of `penalty_length_scale` meters,
  // misfit measured in units of `data_unit` m/s^2 (1e-5 = 1 mGal).
  double penalty_length_scale = 100.0;
  double data_unit = 1e-5;
  PenaltyReference penalty_reference = PenaltyReference::kInitialGuess;
  MdpConfig mdp = DefaultMdp();
  SolverConfig solver = DefaultSolver();
  double upper_bound_step = 0.001;
  int upper_bound_max_steps = 5000;
  std::uint64_t seed = 1;

  static MdpConfig DefaultMdp();
  static SolverConfig DefaultSolver();
  void Validate() const;
};

struct ScalarOracleConfig {
  double delta = 0.2;
  MdpConfig mdp;
  void Validate() const;
};

// A Tikhonov problem together with the ground truth it was generated from.
struct ProblemBundle {
  TikhonovProblem problem;
  Vector x_true;
  Vector y_clean;
  double delta = 0.0;
  // Spectral norms of the sensing matrix before and after scaling (CS only).
  double raw_matrix_norm = 0.0;
  double scaled_matrix_norm = 0.0;
};

// Exactly p nonzeros at distinct uniformly drawn positions; magnitudes
// uniform in [min, max] with a random sign.
Vector GenSparseSignal(int n, int p, const AmplitudeRule& rule,
                       std::uint64_t seed);

struct NoisyData {
  Vector y_delta;
  double delta = 0.0;  // measured ||y - y_delta||
};

// Additive white Gaussian noise with per-component variance
// (||y||^2 / m) / 10^(snr_db / 10). SNR is capped at 300 dB.
NoisyData AddAwgn(const Vector& y, double snr_db, std::uint64_t seed);

// Gaussian noise direction scaled so that ||e|| = fraction ||y|| exactly.
NoisyData AddProportionalNoise(const Vector& y, double fraction,
                               std::uint64_t seed);

ProblemBundle GenCsProblem(const CsConfig& cfg);
ProblemBundle GenGravityProblem(const GravityConfig& cfg);
// F(x) = x on R^1 with y_delta = 1, l1 penalty and a fixed unit ISTA step,
// so that the discrepancy at alpha is exactly min(alpha, 1).
ProblemBundle GenScalarOracleProblem(const ScalarOracleConfig& cfg);

// ||x - x_true|| / ||x_true||; throws InvalidInput when x_true = 0.
double RelativeError(const Vector& x, const Vector& x_true);

struct StudyRecord {
  std::string experiment;
  std::string mode;
  double level = 0.0;  // snr_db (cs) or noise fraction (gravity)
  std::uint64_t seed = 0;
  double delta = 0.0;
  double c_delta = 0.0;
  double alpha = 0.0;
  double discrepancy = 0.0;
  double relative_error = 0.0;
  double bregman_distance = 0.0;
  std::string outcome;
  std::string solver_status;
  int solver_iterations = 0;
};

struct ExperimentResult {
  StudyRecord record;
  SolverResult solution;
  AlphaSearchTrace trace;
  ProblemBundle bundle;
  // Rows of the upper-bound scan, in scan order.
  std::vector<SweepRecord> upper_bound_scan;
};

// Selects alpha on a generated problem and reports the reconstruction.
// kAlgorithm1 runs AlphaSearch. kUpperBound starts from the AlphaSearch
// alpha and walks the grid alpha +/- step * k towards ||F(x_a) - y|| = c
// delta, keeping the grid point with the largest discrepancy <= c delta.
// With delta = 0 no selection is possible; the solver runs once at
// mdp.alpha0 and the outcome is "noise-free".
ExperimentResult RunExperiment(ProblemBundle bundle, const MdpConfig& mdp,
                               AlphaMode mode, double upper_bound_step,
                               int upper_bound_max_steps);

ExperimentResult RunCsExperiment(const CsConfig& cfg, AlphaMode mode);
ExperimentResult RunGravityExperiment(const GravityConfig& cfg,
                                      AlphaMode mode);

enum class WarmStartPolicy { kCold, kWarm };

// One record per alpha, returned in increasing alpha order. Solves run in
// decreasing alpha order; with kWarm each starts from the previous solution.
// Per-alpha failures are recorded in the row and the sweep continues. With
// kCold, rows are computed on up to `jobs` threads.
std::vector<SweepRecord> SweepAlpha(const TikhonovProblem& problem,
                                    std::vector<double> alpha_grid,
                                    WarmStartPolicy policy,
                                    const Vector& x_true, int jobs = 1);

// Parses lin:a:b:n, log:a:b:n or list:v1,v2,...
std::vector<double> ParseAlphaGrid(const std::string& spec);

struct NoiseStudyResult {
  std::vector<StudyRecord> records;
  // Spearman correlations; absent with fewer than two usable records.
  std::optional<double> rho_delta_alpha;
  std::optional<double> rho_level_rerror;
};

// Runs the CS experiment for each SNR and each of `seeds_per_level`
// replicas; replica r of level i uses MixSeed(cfg.seed, i * seeds + r).
NoiseStudyResult CsNoiseLevelStudy(const CsConfig& cfg,
                                   const std::vector<double>& snr_db,
                                   int seeds_per_level, AlphaMode mode,
                                   int jobs = 1);

// Same over gravity noise fractions.
NoiseStudyResult GravityNoiseLevelStudy(const GravityConfig& cfg,
                                        const std::vector<double>& fractions,
                                        int seeds_per_level, AlphaMode mode,
                                        int jobs = 1);

struct RateStudyResult {
  std::vector<StudyRecord> records;
  std::vector<bool> used_in_fit;
  double slope = 0.0;
  double intercept = 0.0;
  int points_used = 0;
};

// For each noise fraction (same seed, so the noise direction is shared),
// selects alpha by AlphaSearch and computes d = D_R(x_alpha, x_true) with the
// penalty's subgradient at x_true. Fits log d = slope log delta + intercept
// over rows with d > 0 and delta > 0. Requires at least four distinct levels.
RateStudyResult GravityBregmanRateStudy(const GravityConfig& cfg,
                                        const std::vector<double>& fractions,
                                        int jobs = 1);

// Spearman rank correlation with average ranks for ties.
double SpearmanCorrelation(const std::vector<double>& a,
                           const std::vector<double>& b);

// Runs body(i) for i in [0, count) on up to `jobs` threads.
void ParallelFor(int count, int jobs, const std::function<void(int)>& body);

}  // namespace morozov

#endif  // MOROZOV_EXPERIMENTS_H_
