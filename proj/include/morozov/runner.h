#ifndef MOROZOV_RUNNER_H_
#define MOROZOV_RUNNER_H_

#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "morozov/config.h"

namespace morozov {

inline constexpr const char* kArtifactVersion = "1.0.0";
inline constexpr int kManifestSchemaVersion = 1;

// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitUnexpected = 1,  // I/O failure or an unexpected exception
  kExitConfig = 2,      // invalid configuration or flags
  kExitSearch = 3,      // alpha search ended without acceptance
  kExitSolver = 4,      // inner solver diverged or left the operator domain
  kExitCheck = 5        // an invariant check failed
};

struct RunReport {
  int exit_code = kExitOk;
  std::string message;
  // Output file names relative to the output directory, manifest last.
  std::vector<std::string> files;
  nlohmann::json manifest;
};

// Runs the configured experiment and mode, writes its tables and
// manifest.json into cfg.out, and logs a short summary to `log`.
RunReport Run(const RunConfig& cfg, std::ostream& log);

// Recovers the configuration embedded in a manifest.
RunConfig ConfigFromManifest(const std::string& manifest_path);

// Names of files listed in `manifest_path` other than the manifest itself
// whose bytes differ between the two output directories.
std::vector<std::string> DifferingOutputs(const std::string& manifest_path,
                                          const std::string& dir_a,
                                          const std::string& dir_b);

}  // namespace morozov

#endif  // MOROZOV_RUNNER_H_
