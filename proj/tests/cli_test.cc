#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "morozov/config.h"
#include "morozov/output.h"
#include "morozov/runner.h"

namespace morozov {
namespace {

namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    path_ = fs::temp_directory_path() /
            (std::string("morozov_") + info->test_suite_name() + "_" + info->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string operator/(const std::string& name) const { return (path_ / name).string(); }
  std::string str() const { return path_.string(); }

 private:
  fs::path path_;
};

int Cli(const std::string& args, std::string* output = nullptr) {
  const std::string cmd = std::string(MOROZOV_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return -1;
  std::string text;
  char buf[4096];
  while (std::fgets(buf, sizeof buf, pipe) != nullptr) text += buf;
  const int status = pclose(pipe);
  if (output != nullptr) *output = text;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<std::string> CsvLines(const std::string& path) {
  std::istringstream in(ReadFile(path));
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

TEST(Config, MinimalCsConfigFillsDefaults) {
  const RunConfig cfg = ParseConfigText("experiment = cs\nseed = 1\n");
  EXPECT_EQ(cfg.experiment, Experiment::kCs);
  EXPECT_EQ(cfg.cs.n, 200);
  EXPECT_EQ(cfg.cs.m, 80);
  EXPECT_EQ(cfg.cs.p, 16);
  EXPECT_EQ(cfg.cs.mdp.tau1, 1.0);
  EXPECT_EQ(cfg.cs.mdp.tau2, 2.0);
  EXPECT_EQ(cfg.cs.mdp.gamma, 0.5);
  EXPECT_EQ(cfg.cs.matrix_scale, 0.05);
  EXPECT_EQ(cfg.explicit_keys, (std::set<std::string>{"experiment", "seed"}));
}

TEST(Config, SectionsAndComments) {
  const RunConfig cfg = ParseConfigText(
      "# gravity run\nexperiment = gravity   # trailing comment\n\n"
      "[gravity]\nnoise_fraction = 0.01\ntrue_params = -200, 150, 200, 200\n"
      "[gravity.mdp]\nalpha0 = 2\n[gravity.solver]\nthreshold_rule = none\n");
  EXPECT_EQ(cfg.gravity.noise_fraction, 0.01);
  EXPECT_EQ(cfg.gravity.mdp.alpha0, 2.0);
  EXPECT_EQ(cfg.gravity.solver.threshold_rule, ThresholdRule::kNone);
  EXPECT_TRUE(cfg.explicit_keys.count("gravity.mdp.alpha0"));
}

TEST(Config, ConstraintViolationsNameTheConstraint) {
  try {
    ParseConfigText("experiment = cs\n[cs.mdp]\ntau1 = 2\ntau2 = 1.5\n");
    FAIL() << "expected rejection";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("tau2 must be > tau1"), std::string::npos) << e.what();
  }
}

TEST(Config, ErrorsCarryLineNumbers) {
  const struct {
    const char* text;
    int line;
  } cases[] = {
      {"experiment = cs\nsnr = 30\n", 2},
      {"experiment = cs\n[cs]\n\nn = many\n", 4},
      {"experiment = cs\n[nowhere]\n", 2},
      {"experiment = cs\nseed = 1\nseed = 2\n", 3},
      {"experiment = cs\njust words\n", 2},
      {"experiment = cs\n[cs.mdp]\nwarm_start = maybe\n", 3},
  };
  for (const auto& c : cases) {
    try {
      ParseConfigText(c.text);
      ADD_FAILURE() << "accepted: " << c.text;
    } catch (const ConfigError& e) {
      EXPECT_EQ(e.line(), c.line) << e.what();
      EXPECT_EQ(std::string(e.what()).rfind("line " + std::to_string(c.line) + ":", 0), 0u);
    }
  }
  EXPECT_THROW(ParseConfigText("seed = 3\n"), ConfigError);
}

TEST(Config, RoundTripIsIdempotent) {
  RunConfig cfg = ParseConfigText(
      "experiment = gravity\nmode = sweep\nalpha_grid = lin:0.01:0.2:7\n"
      "[gravity]\nnoise_fraction = 0.013\n[gravity.mdp]\ntau1 = 1.2\n");
  cfg.cs.snr_db = 41.3;
  cfg.gravity.gravitational_constant = 6.6743e-11;
  const std::string text = SerializeConfig(cfg);
  const RunConfig again = ParseConfigText(text);
  EXPECT_EQ(SerializeConfig(again), text);
  EXPECT_EQ(again.cs.snr_db, 41.3);
  EXPECT_EQ(again.gravity.gravitational_constant, 6.6743e-11);
  EXPECT_EQ(again.alpha_grid, "lin:0.01:0.2:7");
  // Every schema key is serialized exactly once.
  const std::vector<std::string> keys = ConfigKeys();
  EXPECT_EQ(std::set<std::string>(keys.begin(), keys.end()).size(), keys.size());
  std::istringstream lines(text);
  std::size_t assignments = 0;
  for (std::string line; std::getline(lines, line);) {
    if (line.find(" = ") != std::string::npos) ++assignments;
  }
  EXPECT_EQ(assignments, keys.size());
}

TEST(Config, SetConfigValueIsStrict) {
  RunConfig cfg;
  SetConfigValue(cfg, "cs.snr_db", "35");
  EXPECT_EQ(cfg.cs.snr_db, 35.0);
  EXPECT_TRUE(cfg.explicit_keys.count("cs.snr_db"));
  EXPECT_THROW(SetConfigValue(cfg, "cs.snr", "35"), ConfigError);
  EXPECT_THROW(SetConfigValue(cfg, "seed", "-1"), ConfigError);
  EXPECT_THROW(SetConfigValue(cfg, "format", "xml"), ConfigError);
}

TEST(Config, RateStudyNeedsGravity) {
  EXPECT_THROW(ParseConfigText("experiment = cs\nmode = rate-study\n"), ConfigError);
  EXPECT_THROW(ParseConfigText("experiment = scalar-oracle\nmode = noise-study\n"),
               ConfigError);
}

TEST(Format, DoublesRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, 2.7421e-7, -1e300, 5e-324, 123456789.0}) {
    EXPECT_EQ(ParseDouble(FormatDouble(v)), v);
  }
  EXPECT_EQ(ParseDouble("+2.5"), 2.5);
  EXPECT_THROW(ParseDouble("2.5x"), ConfigError);
}

TEST(Output, CsvAndJsonShapes) {
  Table t;
  t.columns = {"a", "b", "c"};
  t.AddRow({0.1, std::int64_t{3}, std::string("x,y")});
  t.AddRow({std::numeric_limits<double>::quiet_NaN(), std::int64_t{-1}, std::string("z")});
  EXPECT_EQ(t.ToCsv(), "a,b,c\n0.1,3,\"x,y\"\nnan,-1,z\n");
  const nlohmann::json j = t.ToJson();
  ASSERT_EQ(j.size(), 2u);
  EXPECT_EQ(j[0]["a"], 0.1);
  EXPECT_EQ(j[1]["a"], "nan");
  EXPECT_THROW(t.AddRow({1.0}), InvalidInput);
}

TEST(Output, PlotShapes) {
  std::vector<SweepRecord> rows(20);
  for (int i = 0; i < 20; ++i) {
    rows[i].alpha = 0.01 * (i + 1);
    rows[i].discrepancy = 0.1 * i;
  }
  MdpConfig mdp;
  const Table d = SweepPlot(PlotKind::kDiscrepancyVsAlpha, rows, 0.2, mdp);
  EXPECT_EQ(d.columns, (std::vector<std::string>{"alpha", "discrepancy", "tau1_delta",
                                                 "tau2_delta", "c_delta"}));
  EXPECT_EQ(d.rows.size(), 20u);
  EXPECT_EQ(std::get<double>(d.rows[5][4]), 0.8);

  const Table s = SignalOverlay(Vector::Ones(200), Vector::Zero(200));
  EXPECT_EQ(s.columns, (std::vector<std::string>{"index", "x_true", "x_recovered"}));
  EXPECT_EQ(s.rows.size(), 200u);

  const Vector g = Vector::Ones(50);
  const Table p = GravityProfile(g, g, g, g);
  EXPECT_EQ(p.columns, (std::vector<std::string>{"station", "g_clean", "g_observed",
                                                 "g_reconstructed"}));
  EXPECT_EQ(p.rows.size(), 50u);

  StudyRecord rec;
  rec.experiment = "gravity";
  EXPECT_EQ(StudyPlot(PlotKind::kAlphaVsSnr, {rec}).columns.front(), "noise_fraction");
}

TEST(Output, EmptyPlotInputIsRejected) {
  MdpConfig mdp;
  EXPECT_THROW(SweepPlot(PlotKind::kRerrorVsAlpha, {}, 0.1, mdp), InvalidInput);
  EXPECT_THROW(StudyPlot(PlotKind::kDeltaVsSnr, {}), InvalidInput);
  EXPECT_THROW(SignalOverlay(Vector(), Vector()), InvalidInput);
}

TEST(Cli, CsAlgorithm1Smoke) {
  TempDir dir;
  std::string out;
  ASSERT_EQ(Cli("run --experiment cs --mode algorithm1 --snr-db 60 --seed 7 --out " +
                    dir.str(), &out),
            0)
      << out;
  for (const char* f : {"study.csv", "trace.csv", "manifest.json"}) {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  }
  const auto study = CsvLines(dir / "study.csv");
  ASSERT_EQ(study.size(), 2u);
  EXPECT_NE(study[1].find("accepted"), std::string::npos);
  const auto trace = CsvLines(dir / "trace.csv");
  EXPECT_EQ(trace[0], "step,phase,alpha,discrepancy,penalty,m,alpha_min,alpha_max");
  const nlohmann::json m = nlohmann::json::parse(ReadFile(dir / "manifest.json"));
  EXPECT_EQ(m["schema_version"], kManifestSchemaVersion);
  EXPECT_EQ(m["exit_code"], 0);
  EXPECT_EQ(m["summary"]["outcome"], "accepted");
  const auto defaulted = m["defaulted_keys"].get<std::vector<std::string>>();
  EXPECT_NE(std::find(defaulted.begin(), defaulted.end(), "cs.mdp.tau2"), defaulted.end());
  EXPECT_EQ(std::find(defaulted.begin(), defaulted.end(), "seed"), defaulted.end());
}

TEST(Cli, GravitySweepHasTwentyRows) {
  TempDir dir;
  std::string out;
  ASSERT_EQ(Cli("run --experiment gravity --mode sweep --alpha-grid log:1e-4:1:20 --format csv"
                " --out " + dir.str(), &out),
            0)
      << out;
  const auto sweep = CsvLines(dir / "sweep.csv");
  ASSERT_EQ(sweep.size(), 21u);
  for (const char* col : {"alpha", "discrepancy", "relative_error", "m"}) {
    EXPECT_NE(("," + sweep[0] + ",").find(std::string(",") + col + ","), std::string::npos)
        << col;
  }
  EXPECT_EQ(CsvLines(dir / "plot_discrepancy-vs-alpha.csv").size(), 21u);
  EXPECT_FALSE(fs::exists(dir / "sweep.json"));
}

TEST(Cli, CheckModePrintsATable) {
  TempDir dir;
  std::string out;
  EXPECT_EQ(Cli("run --experiment cs --mode check --out " + dir.str(), &out), 0) << out;
  for (const char* name : {"cs-jacobian-fd", "soft-threshold-prox", "cs-adjoint",
                           "cs-path-monotonicity"}) {
    EXPECT_NE(out.find(name), std::string::npos) << name;
  }
  EXPECT_EQ(out.find("FAIL"), std::string::npos) << out;
}

TEST(Cli, ConfigFileWithFlagOverride) {
  TempDir dir;
  WriteFile(dir / "run.cfg", "experiment = scalar-oracle\n[scalar-oracle]\ndelta = 0.1\n");
  std::string out;
  ASSERT_EQ(Cli("run --config " + dir / "run.cfg" + " --seed 5 --out " + dir / "o", &out), 0)
      << out;
  const RunConfig cfg = ConfigFromManifest(dir / "o/manifest.json");
  EXPECT_EQ(cfg.seed, 5u);
  EXPECT_EQ(cfg.scalar.delta, 0.1);
}

TEST(Cli, ExitCodes) {
  TempDir dir;
  std::string out;
  EXPECT_EQ(Cli("run --experiment cs --mode sideways", &out), kExitConfig) << out;
  EXPECT_EQ(Cli("run --mode check --out " + dir / "check", &out), kExitOk) << out;
  EXPECT_EQ(Cli("bogus", &out), kExitConfig) << out;
  WriteFile(dir / "bad.cfg", "experiment = cs\n[cs.mdp]\ntau2 = 0.5\n");
  EXPECT_EQ(Cli("run --config " + dir / "bad.cfg", &out), kExitConfig);
  EXPECT_NE(out.find("tau2"), std::string::npos) << out;

  WriteFile(dir / "cap.cfg",
            "experiment = scalar-oracle\n[scalar-oracle.mdp]\nalpha0 = 1e-3\n"
            "max_grow_steps = 1\n");
  EXPECT_EQ(Cli("run --config " + dir / "cap.cfg" + " --out " + dir / "cap", &out), kExitSearch)
      << out;
  const nlohmann::json m = nlohmann::json::parse(ReadFile(dir / "cap/manifest.json"));
  EXPECT_EQ(m["exit_code"], kExitSearch);
  EXPECT_EQ(m["summary"]["outcome"], "step-cap");

  WriteFile(dir / "diverge.cfg",
            "experiment = cs\n[cs.solver]\nstep_policy = fixed\nfixed_lambda = 1e-4\n");
  EXPECT_EQ(Cli("run --config " + dir / "diverge.cfg" + " --out " + dir / "div", &out),
            kExitSolver)
      << out;
}

TEST(Cli, ReplayIsBitIdentical) {
  TempDir dir;
  std::string out;
  ASSERT_EQ(Cli("run --experiment cs --mode upper-bound --seed 3 --out " + dir / "a", &out), 0)
      << out;
  EXPECT_EQ(Cli("replay " + dir / "a/manifest.json" + " --out " + dir / "b" + " --verify", &out),
            0)
      << out;
  EXPECT_NE(out.find("replay identical"), std::string::npos) << out;
  EXPECT_TRUE(DifferingOutputs(dir / "a/manifest.json", dir / "a", dir / "b").empty());

  // A tampered output is detected.
  WriteFile(dir / "b/study.csv", ReadFile(dir / "b/study.csv") + "\n");
  EXPECT_EQ(DifferingOutputs(dir / "a/manifest.json", dir / "a", dir / "b"),
            std::vector<std::string>{"study.csv"});
}

TEST(Runner, InProcessRunWritesTheManifestLast) {
  TempDir dir;
  RunConfig cfg = ParseConfigText("experiment = gravity\nmode = algorithm1\n");
  cfg.out = dir.str();
  std::ostringstream log;
  const RunReport r = morozov::Run(cfg, log);
  ASSERT_FALSE(r.files.empty());
  EXPECT_EQ(r.files.back(), "manifest.json");
  EXPECT_EQ(r.manifest["files"].back(), "manifest.json");
  EXPECT_TRUE(fs::exists(dir / "plot_gravity-profile.csv"));
  EXPECT_EQ(CsvLines(dir / "plot_gravity-profile.csv").size(), 51u);
}

}  // namespace
}  // namespace morozov
