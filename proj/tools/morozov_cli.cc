#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "morozov/config.h"
#include "morozov/runner.h"

namespace {

struct RunFlags {
  std::string config;
  std::optional<std::string> experiment;
  std::optional<std::string> mode;
  std::optional<std::string> seed;
  std::optional<std::string> snr_db;
  std::optional<std::string> alpha_grid;
  std::optional<std::string> out;
  std::optional<std::string> format;
  std::optional<std::string> jobs;
};

morozov::RunConfig Resolve(const RunFlags& flags) {
  morozov::RunConfig cfg;
  if (!flags.config.empty()) cfg = morozov::ParseConfigFile(flags.config);
  const auto apply = [&cfg](const char* key, const std::optional<std::string>& v) {
    if (v) morozov::SetConfigValue(cfg, key, *v);
  };
  apply("experiment", flags.experiment);
  apply("mode", flags.mode);
  apply("seed", flags.seed);
  apply("cs.snr_db", flags.snr_db);
  apply("alpha_grid", flags.alpha_grid);
  apply("out", flags.out);
  apply("format", flags.format);
  apply("jobs", flags.jobs);
  cfg.Validate();
  return cfg;
}

int Execute(const morozov::RunConfig& cfg) {
  const morozov::RunReport report = morozov::Run(cfg, std::cout);
  if (report.exit_code != morozov::kExitOk) {
    std::cerr << "error (exit " << report.exit_code << "): " << report.message
              << "\n";
  }
  return report.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tikhonov regularization with a discrepancy-principle choice of alpha"};
  app.require_subcommand(1);

  RunFlags flags;
  CLI::App* run = app.add_subcommand("run", "Run an experiment");
  run->add_option("--config", flags.config, "Configuration file");
  run->add_option("--experiment", flags.experiment, "cs, gravity or scalar-oracle");
  run->add_option("--mode", flags.mode,
                  "algorithm1, upper-bound, sweep, noise-study, rate-study or check");
  run->add_option("--seed", flags.seed, "Base seed (unsigned 64-bit)");
  run->add_option("--snr-db", flags.snr_db, "CS noise level in dB");
  run->add_option("--alpha-grid", flags.alpha_grid,
                  "lin:a:b:n, log:a:b:n or list:v1,v2,...");
  run->add_option("--out", flags.out, "Output directory");
  run->add_option("--format", flags.format, "csv, json or both");
  run->add_option("--jobs", flags.jobs, "Worker threads (0 = all cores)");

  std::string manifest;
  std::optional<std::string> replay_out;
  bool verify = false;
  CLI::App* replay = app.add_subcommand("replay", "Rerun from a manifest");
  replay->add_option("manifest", manifest, "Path to manifest.json")->required();
  replay->add_option("--out", replay_out, "Output directory for the rerun");
  replay->add_flag("--verify", verify,
                   "Compare the rerun's files byte for byte with the originals");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? morozov::kExitOk : morozov::kExitConfig;
  }

  try {
    if (*run) return Execute(Resolve(flags));

    morozov::RunConfig cfg = morozov::ConfigFromManifest(manifest);
    const std::string original = std::filesystem::path(manifest).parent_path().string();
    if (replay_out) {
      morozov::SetConfigValue(cfg, "out", *replay_out);
    } else if (verify) {
      std::cerr << "error: --verify needs --out for the rerun\n";
      return morozov::kExitConfig;
    }
    const int code = Execute(cfg);
    if (code != morozov::kExitOk || !verify) return code;
    const auto differing = morozov::DifferingOutputs(
        manifest, original.empty() ? "." : original, cfg.out);
    for (const auto& name : differing) std::cout << "differs: " << name << "\n";
    std::cout << (differing.empty() ? "replay identical\n" : "replay differs\n");
    return differing.empty() ? morozov::kExitOk : morozov::kExitCheck;
  } catch (const morozov::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return morozov::kExitConfig;
  } catch (const morozov::InvalidInput& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return morozov::kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return morozov::kExitUnexpected;
  }
}
