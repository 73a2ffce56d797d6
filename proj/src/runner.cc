#include "morozov/runner.h"

#include <filesystem>
#include <thread>

#include "morozov/checks.h"
#include "morozov/output.h"

namespace morozov {

namespace {

namespace fs = std::filesystem;

class Writer {
 public:
  Writer(const RunConfig& cfg) : dir_(cfg.out), format_(cfg.format) {}

  void Emit(const std::string& stem, const Table& table) {
    if (format_ != OutputFormat::kJson) {
      Write(stem + ".csv", table.ToCsv());
    }
    if (format_ != OutputFormat::kCsv) {
      Write(stem + ".json", table.ToJson().dump(2) + "\n");
    }
  }

  void Write(const std::string& name, const std::string& contents) {
    WriteFile((dir_ / name).string(), contents);
    files_.push_back(name);
  }

  const std::vector<std::string>& files() const { return files_; }

 private:
  fs::path dir_;
  OutputFormat format_;
  std::vector<std::string> files_;
};

int Jobs(const RunConfig& cfg) {
  if (cfg.jobs > 0) return cfg.jobs;
  return std::max(1u, std::thread::hardware_concurrency());
}

ProblemBundle MakeBundle(const RunConfig& cfg) {
  switch (cfg.experiment) {
    case Experiment::kCs: {
      CsConfig c = cfg.cs;
      c.seed = cfg.seed;
      return GenCsProblem(c);
    }
    case Experiment::kGravity: {
      GravityConfig g = cfg.gravity;
      g.seed = cfg.seed;
      return GenGravityProblem(g);
    }
    case Experiment::kScalarOracle:
      return GenScalarOracleProblem(cfg.scalar);
  }
  throw InvalidInput("unknown experiment");
}

const MdpConfig& Mdp(const RunConfig& cfg) {
  switch (cfg.experiment) {
    case Experiment::kCs: return cfg.cs.mdp;
    case Experiment::kGravity: return cfg.gravity.mdp;
    case Experiment::kScalarOracle: return cfg.scalar.mdp;
  }
  throw InvalidInput("unknown experiment");
}

nlohmann::json Number(double v) {
  if (!std::isfinite(v)) return FormatDouble(v);
  return v;
}

void EmitSolutionPlot(const RunConfig& cfg, const ProblemBundle& b,
                      const Vector& x, Writer& w) {
  if (cfg.experiment == Experiment::kCs) {
    w.Emit("plot_" + ToString(PlotKind::kSignalOverlay), SignalOverlay(b.x_true, x));
  } else if (cfg.experiment == Experiment::kGravity) {
    const auto& op = static_cast<const GravityOperator&>(*b.problem.op);
    const auto& st = op.spec().stations;
    const Vector stations = Eigen::Map<const Vector>(st.data(), st.size());
    w.Emit("plot_" + ToString(PlotKind::kGravityProfile),
           GravityProfile(stations, b.y_clean, b.problem.y_delta, op.Evaluate(x)));
  }
}

int RunSingle(const RunConfig& cfg, Writer& w, nlohmann::json& summary,
              std::ostream& log) {
  const AlphaMode mode = cfg.mode == RunMode::kUpperBound
                             ? AlphaMode::kUpperBound
                             : AlphaMode::kAlgorithm1;
  ExperimentResult r;
  switch (cfg.experiment) {
    case Experiment::kCs: {
      CsConfig c = cfg.cs;
      c.seed = cfg.seed;
      r = RunCsExperiment(c, mode);
      break;
    }
    case Experiment::kGravity: {
      GravityConfig g = cfg.gravity;
      g.seed = cfg.seed;
      r = RunGravityExperiment(g, mode);
      break;
    }
    case Experiment::kScalarOracle:
      r = RunExperiment(GenScalarOracleProblem(cfg.scalar), cfg.scalar.mdp,
                        mode, 0.001, 5000);
      r.record.experiment = "scalar-oracle";
      r.record.seed = cfg.seed;
      break;
  }
  w.Emit("study", StudyTable({r.record}));
  w.Emit("trace", TraceTable(r.trace));
  if (!r.upper_bound_scan.empty()) w.Emit("scan", SweepTable(r.upper_bound_scan));
  Table solution;
  solution.columns = {"index", "x"};
  for (Eigen::Index i = 0; i < r.solution.x.size(); ++i) {
    solution.AddRow({std::int64_t{i}, r.solution.x[i]});
  }
  w.Emit("solution", solution);
  EmitSolutionPlot(cfg, r.bundle, r.solution.x, w);

  summary["delta"] = Number(r.record.delta);
  summary["c_delta"] = Number(r.record.c_delta);
  summary["alpha"] = Number(r.record.alpha);
  summary["discrepancy"] = Number(r.record.discrepancy);
  summary["relative_error"] = Number(r.record.relative_error);
  summary["outcome"] = r.record.outcome;
  summary["warnings"] = r.trace.warnings;
  log << "delta " << FormatDouble(r.record.delta) << ", c delta "
      << FormatDouble(r.record.c_delta) << ", alpha "
      << FormatDouble(r.record.alpha) << ", discrepancy "
      << FormatDouble(r.record.discrepancy) << ", rerror "
      << FormatDouble(r.record.relative_error) << " (" << r.record.outcome
      << ")\n";
  for (const auto& warning : r.trace.warnings) log << "warning: " << warning << "\n";
  const bool ok = r.record.outcome == "accepted" || r.record.outcome == "noise-free";
  return ok ? kExitOk : kExitSearch;
}

int RunSweepMode(const RunConfig& cfg, Writer& w, nlohmann::json& summary,
                 std::ostream& log) {
  const ProblemBundle b = MakeBundle(cfg);
  const std::vector<double> grid = ParseAlphaGrid(cfg.alpha_grid);
  const auto rows =
      SweepAlpha(b.problem, grid, cfg.sweep_warm_start, b.x_true, Jobs(cfg));
  w.Emit("sweep", SweepTable(rows));
  w.Emit("plot_" + ToString(PlotKind::kRerrorVsAlpha),
         SweepPlot(PlotKind::kRerrorVsAlpha, rows, b.delta, Mdp(cfg)));
  summary["delta"] = Number(b.delta);
  summary["rows"] = rows.size();
  std::size_t failed = 0;
  for (const auto& r : rows) failed += r.error.empty() ? 0 : 1;
  summary["failed_rows"] = failed;
  if (b.delta > 0.0) {
    const MdpConfig& mdp = Mdp(cfg);
    w.Emit("plot_" + ToString(PlotKind::kDiscrepancyVsAlpha),
           SweepPlot(PlotKind::kDiscrepancyVsAlpha, rows, b.delta, mdp));
    const GapReport gap = ClassicalGapReport(rows, b.delta, mdp);
    summary["c_delta"] = Number(mdp.c() * b.delta);
    summary["classical_window_hit"] = gap.classical_hit;
    summary["widened_window_hit"] = gap.widened_hit;
    summary["max_discrepancy_jump"] = Number(gap.max_jump);
    log << "sweep of " << rows.size() << " alphas, delta " << FormatDouble(b.delta)
        << ": classical window " << (gap.classical_hit ? "hit" : "missed")
        << ", widened window " << (gap.widened_hit ? "hit" : "missed") << "\n";
  } else {
    log << "sweep of " << rows.size() << " alphas on noise-free data\n";
  }
  if (failed > 0) log << failed << " rows failed\n";
  return failed == rows.size() ? kExitSolver : kExitOk;
}

int StudyExitCode(const std::vector<StudyRecord>& records) {
  int code = kExitOk;
  for (const auto& r : records) {
    if (r.outcome.rfind("error", 0) == 0) return kExitSolver;
    if (r.outcome != "accepted" && r.outcome != "noise-free") code = kExitSearch;
  }
  return code;
}

int RunNoiseStudyMode(const RunConfig& cfg, Writer& w, nlohmann::json& summary,
                      std::ostream& log) {
  const std::vector<double> levels = cfg.ResolvedLevels();
  NoiseStudyResult study;
  if (cfg.experiment == Experiment::kCs) {
    CsConfig c = cfg.cs;
    c.seed = cfg.seed;
    study = CsNoiseLevelStudy(c, levels, cfg.seeds_per_level,
                              AlphaMode::kAlgorithm1, Jobs(cfg));
  } else {
    GravityConfig g = cfg.gravity;
    g.seed = cfg.seed;
    study = GravityNoiseLevelStudy(g, levels, cfg.seeds_per_level,
                                   AlphaMode::kAlgorithm1, Jobs(cfg));
  }
  w.Emit("study", StudyTable(study.records));
  for (PlotKind kind : {PlotKind::kDeltaVsSnr, PlotKind::kAlphaVsSnr,
                        PlotKind::kRerrorVsSnr}) {
    w.Emit("plot_" + ToString(kind), StudyPlot(kind, study.records));
  }
  summary["records"] = study.records.size();
  summary["spearman_delta_alpha"] =
      study.rho_delta_alpha ? Number(*study.rho_delta_alpha) : nlohmann::json();
  summary["spearman_level_rerror"] =
      study.rho_level_rerror ? Number(*study.rho_level_rerror) : nlohmann::json();
  log << study.records.size() << " runs";
  if (study.rho_delta_alpha) {
    log << ", spearman(delta, alpha) " << FormatDouble(*study.rho_delta_alpha)
        << ", spearman(level, rerror) " << FormatDouble(*study.rho_level_rerror);
  }
  log << "\n";
  return StudyExitCode(study.records);
}

int RunRateStudyMode(const RunConfig& cfg, Writer& w, nlohmann::json& summary,
                     std::ostream& log) {
  GravityConfig g = cfg.gravity;
  g.seed = cfg.seed;
  const RateStudyResult study =
      GravityBregmanRateStudy(g, cfg.ResolvedLevels(), Jobs(cfg));
  Table t = StudyTable(study.records);
  t.columns.push_back("used_in_fit");
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    t.rows[i].push_back(std::int64_t{study.used_in_fit[i] ? 1 : 0});
  }
  w.Emit("study", t);
  summary["slope"] = Number(study.slope);
  summary["intercept"] = Number(study.intercept);
  summary["points_used"] = study.points_used;
  log << "log-log slope of Bregman distance against delta: "
      << FormatDouble(study.slope) << " over " << study.points_used
      << " points\n";
  return StudyExitCode(study.records);
}

int RunCheckMode(const RunConfig& cfg, Writer& w, nlohmann::json& summary,
                 std::ostream& log) {
  const auto results = RunInvariantChecks(cfg.seed);
  Table t;
  t.columns = {"check", "passed", "value", "limit", "detail"};
  int failed = 0;
  for (const auto& r : results) {
    t.AddRow({r.name, std::int64_t{r.passed ? 1 : 0}, r.value, r.limit, r.detail});
    failed += r.passed ? 0 : 1;
  }
  w.Emit("check", t);
  log << FormatCheckTable(results);
  summary["checks"] = results.size();
  summary["failed"] = failed;
  return failed == 0 ? kExitOk : kExitCheck;
}

}  // namespace

RunReport Run(const RunConfig& cfg, std::ostream& log) {
  RunReport report;
  nlohmann::json summary = nlohmann::json::object();
  std::vector<std::string> defaults;
  for (const auto& key : ConfigKeys()) {
    if (!cfg.explicit_keys.count(key)) defaults.push_back(key);
  }
  report.manifest = {{"schema_version", kManifestSchemaVersion},
                     {"artifact", "morozov"},
                     {"artifact_version", kArtifactVersion},
                     {"experiment", ToString(cfg.experiment)},
                     {"mode", ToString(cfg.mode)},
                     {"config", SerializeConfig(cfg)},
                     {"defaulted_keys", defaults}};
  try {
    cfg.Validate();
  } catch (const ConfigError& e) {
    report.exit_code = kExitConfig;
    report.message = e.what();
    return report;
  }
  std::error_code ec;
  fs::create_directories(cfg.out, ec);
  if (ec || !fs::is_directory(cfg.out)) {
    report.exit_code = kExitUnexpected;
    report.message = "cannot create output directory '" + cfg.out + "'";
    return report;
  }

  Writer w(cfg);
  try {
    switch (cfg.mode) {
      case RunMode::kAlgorithm1:
      case RunMode::kUpperBound:
        report.exit_code = RunSingle(cfg, w, summary, log);
        break;
      case RunMode::kSweep:
        report.exit_code = RunSweepMode(cfg, w, summary, log);
        break;
      case RunMode::kNoiseStudy:
        report.exit_code = RunNoiseStudyMode(cfg, w, summary, log);
        break;
      case RunMode::kRateStudy:
        report.exit_code = RunRateStudyMode(cfg, w, summary, log);
        break;
      case RunMode::kCheck:
        report.exit_code = RunCheckMode(cfg, w, summary, log);
        break;
    }
  } catch (const ConfigError& e) {
    report.exit_code = kExitConfig;
    report.message = e.what();
  } catch (const InvalidInput& e) {
    report.exit_code = kExitConfig;
    report.message = e.what();
  } catch (const DivergedError& e) {
    report.exit_code = kExitSolver;
    report.message = e.what();
  } catch (const DomainError& e) {
    report.exit_code = kExitSolver;
    report.message = e.what();
  } catch (const std::exception& e) {
    report.exit_code = kExitUnexpected;
    report.message = e.what();
  }

  report.files = w.files();
  report.files.push_back("manifest.json");
  report.manifest["files"] = report.files;
  report.manifest["summary"] = summary;
  report.manifest["exit_code"] = report.exit_code;
  report.manifest["message"] = report.message;
  try {
    WriteFile((fs::path(cfg.out) / "manifest.json").string(),
              report.manifest.dump(2) + "\n");
  } catch (const std::exception& e) {
    report.exit_code = kExitUnexpected;
    report.message = e.what();
  }
  return report;
}

RunConfig ConfigFromManifest(const std::string& manifest_path) {
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(ReadFile(manifest_path));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("manifest '" + manifest_path + "' is not valid JSON: " + e.what());
  }
  if (!manifest.contains("schema_version") ||
      manifest["schema_version"] != kManifestSchemaVersion) {
    throw ConfigError("manifest '" + manifest_path + "' has an unsupported schema version");
  }
  if (!manifest.contains("config") || !manifest["config"].is_string()) {
    throw ConfigError("manifest '" + manifest_path + "' has no embedded config");
  }
  return ParseConfigText(manifest["config"].get<std::string>());
}

std::vector<std::string> DifferingOutputs(const std::string& manifest_path,
                                          const std::string& dir_a,
                                          const std::string& dir_b) {
  const auto manifest = nlohmann::json::parse(ReadFile(manifest_path));
  std::vector<std::string> differing;
  for (const auto& entry : manifest.at("files")) {
    const std::string name = entry.get<std::string>();
    if (name == "manifest.json") continue;
    std::string a, b;
    try {
      a = ReadFile((fs::path(dir_a) / name).string());
      b = ReadFile((fs::path(dir_b) / name).string());
    } catch (const std::exception&) {
      differing.push_back(name);
      continue;
    }
    if (a != b) differing.push_back(name);
  }
  return differing;
}

}  // namespace morozov
