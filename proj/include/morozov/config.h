#ifndef MOROZOV_CONFIG_H_
#define MOROZOV_CONFIG_H_

#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "morozov/experiments.h"

namespace morozov {

enum class Experiment { kCs, kGravity, kScalarOracle };
enum class RunMode {
  kAlgorithm1,
  kUpperBound,
  kSweep,
  kNoiseStudy,
  kRateStudy,
  kCheck
};
enum class OutputFormat { kCsv, kJson, kBoth };

std::string ToString(Experiment e);
std::string ToString(RunMode m);
std::string ToString(OutputFormat f);
std::string ToString(WarmStartPolicy p);
Experiment ParseExperiment(const std::string& s);
RunMode ParseRunMode(const std::string& s);
OutputFormat ParseOutputFormat(const std::string& s);
WarmStartPolicy ParseWarmStartPolicy(const std::string& s);

// Malformed configuration text or flag value. `line` is 0 when the problem
// is not tied to a line (e.g. a cross-field constraint).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what
                                    : what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

struct RunConfig {
  Experiment experiment = Experiment::kCs;
  RunMode mode = RunMode::kAlgorithm1;
  std::uint64_t seed = 1;
  std::string out = "out";
  OutputFormat format = OutputFormat::kBoth;
  // Worker threads; 0 means one per available core.
  int jobs = 0;
  std::string alpha_grid = "log:1e-4:1:20";
  WarmStartPolicy sweep_warm_start = WarmStartPolicy::kWarm;
  // SNRs (cs) or noise fractions (gravity) for the studies; empty selects
  // the experiment's default list.
  std::vector<double> levels;
  int seeds_per_level = 5;

  CsConfig cs;
  GravityConfig gravity;
  ScalarOracleConfig scalar;

  // Keys given explicitly ("section.key" or "key"); everything else is a
  // default.
  std::set<std::string> explicit_keys;

  // Study levels after substituting the per-experiment default.
  std::vector<double> ResolvedLevels() const;
  // Throws ConfigError naming the violated constraint.
  void Validate() const;
};

// Line-oriented format:
//   # comment
//   key = value
//   [section]            e.g. [cs], [gravity.mdp], [scalar-oracle.solver]
//   key = value
// Lists are comma separated. Unknown sections or keys, malformed values and
// duplicates are errors carrying the line number; `experiment` is required.
RunConfig ParseConfigText(const std::string& text);
RunConfig ParseConfigFile(const std::string& path);

// Writes every key, defaults included, in a form ParseConfigText accepts.
std::string SerializeConfig(const RunConfig& cfg);

// Every schema key ("section.key" or "key") in serialization order.
std::vector<std::string> ConfigKeys();

// Sets one key from its textual value, as a config file line would.
void SetConfigValue(RunConfig& cfg, const std::string& key,
                    const std::string& value);

// Round-trip decimal formatting shared by config and output files.
std::string FormatDouble(double v);
double ParseDouble(const std::string& s);

}  // namespace morozov

#endif  // MOROZOV_CONFIG_H_
