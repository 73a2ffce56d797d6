#include "morozov/config.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

namespace morozov {

namespace {

std::string Trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

template <typename Int>
Int ParseInteger(const std::string& s) {
  Int v{};
  const char* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || s.empty()) {
    throw ConfigError("expected an integer, got '" + s + "'");
  }
  return v;
}

bool ParseBool(const std::string& s) {
  if (s == "true") return true;
  if (s == "false") return false;
  throw ConfigError("expected true or false, got '" + s + "'");
}

std::vector<double> ParseList(const std::string& s) {
  std::vector<double> out;
  if (Trim(s).empty()) return out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(ParseDouble(Trim(item)));
  return out;
}

std::string FormatList(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i > 0) out += ",";
    out += FormatDouble(v[i]);
  }
  return out;
}

struct Field {
  std::string name;  // "section.key" or "key"
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <typename T, typename Access>
Field Make(std::string name, Access access) {
  Field f;
  f.name = std::move(name);
  f.set = [access](RunConfig& c, const std::string& v) {
    T& target = access(c);
    if constexpr (std::is_same_v<T, double>) {
      target = ParseDouble(v);
    } else if constexpr (std::is_same_v<T, bool>) {
      target = ParseBool(v);
    } else if constexpr (std::is_same_v<T, std::string>) {
      target = v;
    } else if constexpr (std::is_same_v<T, std::vector<double>>) {
      target = ParseList(v);
    } else {
      target = ParseInteger<T>(v);
    }
  };
  f.get = [access](const RunConfig& c) {
    const T& value = access(const_cast<RunConfig&>(c));
    if constexpr (std::is_same_v<T, double>) {
      return FormatDouble(value);
    } else if constexpr (std::is_same_v<T, bool>) {
      return std::string(value ? "true" : "false");
    } else if constexpr (std::is_same_v<T, std::string>) {
      return value;
    } else if constexpr (std::is_same_v<T, std::vector<double>>) {
      return FormatList(value);
    } else {
      return std::to_string(value);
    }
  };
  return f;
}

template <typename E, typename Access, typename Parse>
Field MakeEnum(std::string name, Access access, Parse parse) {
  Field f;
  f.name = std::move(name);
  f.set = [access, parse](RunConfig& c, const std::string& v) {
    try {
      access(c) = parse(v);
    } catch (const InvalidInput& e) {
      throw ConfigError(e.what());
    }
  };
  f.get = [access](const RunConfig& c) {
    return ToString(access(const_cast<RunConfig&>(c)));
  };
  return f;
}

template <typename Access>
void AddMdp(std::vector<Field>& fields, const std::string& section,
            Access mdp) {
  const std::string p = section + ".mdp.";
  fields.push_back(Make<double>(p + "tau1", [mdp](RunConfig& c) -> double& { return mdp(c).tau1; }));
  fields.push_back(Make<double>(p + "tau2", [mdp](RunConfig& c) -> double& { return mdp(c).tau2; }));
  fields.push_back(Make<double>(p + "gamma", [mdp](RunConfig& c) -> double& { return mdp(c).gamma; }));
  fields.push_back(Make<double>(p + "q", [mdp](RunConfig& c) -> double& { return mdp(c).q; }));
  fields.push_back(Make<double>(p + "alpha0", [mdp](RunConfig& c) -> double& { return mdp(c).alpha0; }));
  fields.push_back(Make<int>(p + "max_search_steps", [mdp](RunConfig& c) -> int& { return mdp(c).max_search_steps; }));
  fields.push_back(Make<int>(p + "max_grow_steps", [mdp](RunConfig& c) -> int& { return mdp(c).max_grow_steps; }));
  fields.push_back(Make<double>(p + "bracket_rel_tol", [mdp](RunConfig& c) -> double& { return mdp(c).bracket_rel_tol; }));
  fields.push_back(Make<bool>(p + "warm_start", [mdp](RunConfig& c) -> bool& { return mdp(c).warm_start; }));
}

template <typename Access>
void AddSolver(std::vector<Field>& fields, const std::string& section,
               Access s) {
  const std::string p = section + ".solver.";
  fields.push_back(Make<int>(p + "max_iterations", [s](RunConfig& c) -> int& { return s(c).max_iterations; }));
  fields.push_back(Make<double>(p + "tolerance", [s](RunConfig& c) -> double& { return s(c).tolerance; }));
  fields.push_back(Make<int>(p + "stall_window", [s](RunConfig& c) -> int& { return s(c).stall_window; }));
  fields.push_back(Make<double>(p + "stall_tolerance", [s](RunConfig& c) -> double& { return s(c).stall_tolerance; }));
  fields.push_back(MakeEnum<StepPolicy>(p + "step_policy", [s](RunConfig& c) -> StepPolicy& { return s(c).step_policy; }, ParseStepPolicy));
  fields.push_back(Make<double>(p + "fixed_lambda", [s](RunConfig& c) -> double& { return s(c).fixed_lambda; }));
  fields.push_back(Make<double>(p + "lambda_safety", [s](RunConfig& c) -> double& { return s(c).lambda_safety; }));
  fields.push_back(Make<int>(p + "lambda_refresh", [s](RunConfig& c) -> int& { return s(c).lambda_refresh; }));
  fields.push_back(Make<int>(p + "max_lambda_increases", [s](RunConfig& c) -> int& { return s(c).max_lambda_increases; }));
  fields.push_back(Make<double>(p + "omega0", [s](RunConfig& c) -> double& { return s(c).omega0; }));
  fields.push_back(Make<double>(p + "frobenius_floor", [s](RunConfig& c) -> double& { return s(c).frobenius_floor; }));
  fields.push_back(MakeEnum<ThresholdRule>(p + "threshold_rule", [s](RunConfig& c) -> ThresholdRule& { return s(c).threshold_rule; }, ParseThresholdRule));
  fields.push_back(Make<double>(p + "threshold", [s](RunConfig& c) -> double& { return s(c).threshold; }));
  fields.push_back(Make<int>(p + "max_step_halvings", [s](RunConfig& c) -> int& { return s(c).max_step_halvings; }));
}

const std::vector<Field>& Schema() {
  static const std::vector<Field> fields = [] {
    std::vector<Field> f;
    f.push_back(MakeEnum<Experiment>("experiment", [](RunConfig& c) -> Experiment& { return c.experiment; }, ParseExperiment));
    f.push_back(MakeEnum<RunMode>("mode", [](RunConfig& c) -> RunMode& { return c.mode; }, ParseRunMode));
    f.push_back(Make<std::uint64_t>("seed", [](RunConfig& c) -> std::uint64_t& { return c.seed; }));
    f.push_back(Make<std::string>("out", [](RunConfig& c) -> std::string& { return c.out; }));
    f.push_back(MakeEnum<OutputFormat>("format", [](RunConfig& c) -> OutputFormat& { return c.format; }, ParseOutputFormat));
    f.push_back(Make<int>("jobs", [](RunConfig& c) -> int& { return c.jobs; }));
    f.push_back(Make<std::string>("alpha_grid", [](RunConfig& c) -> std::string& { return c.alpha_grid; }));
    f.push_back(MakeEnum<WarmStartPolicy>("sweep_warm_start", [](RunConfig& c) -> WarmStartPolicy& { return c.sweep_warm_start; }, ParseWarmStartPolicy));
    f.push_back(Make<std::vector<double>>("levels", [](RunConfig& c) -> std::vector<double>& { return c.levels; }));
    f.push_back(Make<int>("seeds_per_level", [](RunConfig& c) -> int& { return c.seeds_per_level; }));

    f.push_back(Make<int>("cs.n", [](RunConfig& c) -> int& { return c.cs.n; }));
    f.push_back(Make<int>("cs.m", [](RunConfig& c) -> int& { return c.cs.m; }));
    f.push_back(Make<int>("cs.p", [](RunConfig& c) -> int& { return c.cs.p; }));
    f.push_back(Make<double>("cs.snr_db", [](RunConfig& c) -> double& { return c.cs.snr_db; }));
    f.push_back(Make<double>("cs.matrix_scale", [](RunConfig& c) -> double& { return c.cs.matrix_scale; }));
    f.push_back(Make<int>("cs.pre_power", [](RunConfig& c) -> int& { return c.cs.pre_power; }));
    f.push_back(Make<int>("cs.post_power", [](RunConfig& c) -> int& { return c.cs.post_power; }));
    f.push_back(Make<double>("cs.amplitude_min", [](RunConfig& c) -> double& { return c.cs.amplitude.min_magnitude; }));
    f.push_back(Make<double>("cs.amplitude_max", [](RunConfig& c) -> double& { return c.cs.amplitude.max_magnitude; }));
    f.push_back(Make<double>("cs.upper_bound_step", [](RunConfig& c) -> double& { return c.cs.upper_bound_step; }));
    f.push_back(Make<int>("cs.upper_bound_max_steps", [](RunConfig& c) -> int& { return c.cs.upper_bound_max_steps; }));
    AddMdp(f, "cs", [](RunConfig& c) -> MdpConfig& { return c.cs.mdp; });
    AddSolver(f, "cs", [](RunConfig& c) -> SolverConfig& { return c.cs.solver; });

    f.push_back(Make<int>("gravity.station_count", [](RunConfig& c) -> int& { return c.gravity.station_count; }));
    f.push_back(Make<double>("gravity.station_min", [](RunConfig& c) -> double& { return c.gravity.station_min; }));
    f.push_back(Make<double>("gravity.station_max", [](RunConfig& c) -> double& { return c.gravity.station_max; }));
    f.push_back(Make<std::vector<double>>("gravity.true_params", [](RunConfig& c) -> std::vector<double>& { return c.gravity.true_params; }));
    f.push_back(Make<std::vector<double>>("gravity.init_params", [](RunConfig& c) -> std::vector<double>& { return c.gravity.init_params; }));
    f.push_back(Make<std::vector<double>>("gravity.radii", [](RunConfig& c) -> std::vector<double>& { return c.gravity.radii; }));
    f.push_back(Make<std::vector<double>>("gravity.density_contrast", [](RunConfig& c) -> std::vector<double>& { return c.gravity.density_contrast; }));
    f.push_back(Make<double>("gravity.gravitational_constant", [](RunConfig& c) -> double& { return c.gravity.gravitational_constant; }));
    f.push_back(Make<double>("gravity.noise_fraction", [](RunConfig& c) -> double& { return c.gravity.noise_fraction; }));
    f.push_back(Make<double>("gravity.penalty_length_scale", [](RunConfig& c) -> double& { return c.gravity.penalty_length_scale; }));
    f.push_back(Make<double>("gravity.data_unit", [](RunConfig& c) -> double& { return c.gravity.data_unit; }));
    f.push_back(MakeEnum<PenaltyReference>("gravity.penalty_reference", [](RunConfig& c) -> PenaltyReference& { return c.gravity.penalty_reference; }, ParsePenaltyReference));
    f.push_back(Make<double>("gravity.upper_bound_step", [](RunConfig& c) -> double& { return c.gravity.upper_bound_step; }));
    f.push_back(Make<int>("gravity.upper_bound_max_steps", [](RunConfig& c) -> int& { return c.gravity.upper_bound_max_steps; }));
    AddMdp(f, "gravity", [](RunConfig& c) -> MdpConfig& { return c.gravity.mdp; });
    AddSolver(f, "gravity", [](RunConfig& c) -> SolverConfig& { return c.gravity.solver; });

    f.push_back(Make<double>("scalar-oracle.delta", [](RunConfig& c) -> double& { return c.scalar.delta; }));
    AddMdp(f, "scalar-oracle", [](RunConfig& c) -> MdpConfig& { return c.scalar.mdp; });
    return f;
  }();
  return fields;
}

const Field* FindField(const std::string& name) {
  for (const auto& f : Schema()) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

bool KnownSection(const std::string& section) {
  const std::string prefix = section + ".";
  return std::any_of(Schema().begin(), Schema().end(), [&](const Field& f) {
    return f.name.compare(0, prefix.size(), prefix) == 0 &&
           f.name.find('.', prefix.size()) == std::string::npos;
  });
}

}  // namespace

std::string FormatDouble(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw InvalidInput("FormatDouble: conversion failed");
  return std::string(buf, ptr);
}

double ParseDouble(const std::string& s) {
  double v = 0.0;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  if (begin != end && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end || begin == end) {
    throw ConfigError("expected a number, got '" + s + "'");
  }
  return v;
}

std::string ToString(Experiment e) {
  switch (e) {
    case Experiment::kCs: return "cs";
    case Experiment::kGravity: return "gravity";
    case Experiment::kScalarOracle: return "scalar-oracle";
  }
  return "unknown";
}

std::string ToString(RunMode m) {
  switch (m) {
    case RunMode::kAlgorithm1: return "algorithm1";
    case RunMode::kUpperBound: return "upper-bound";
    case RunMode::kSweep: return "sweep";
    case RunMode::kNoiseStudy: return "noise-study";
    case RunMode::kRateStudy: return "rate-study";
    case RunMode::kCheck: return "check";
  }
  return "unknown";
}

std::string ToString(OutputFormat f) {
  switch (f) {
    case OutputFormat::kCsv: return "csv";
    case OutputFormat::kJson: return "json";
    case OutputFormat::kBoth: return "both";
  }
  return "unknown";
}

std::string ToString(WarmStartPolicy p) {
  return p == WarmStartPolicy::kWarm ? "warm" : "cold";
}

Experiment ParseExperiment(const std::string& s) {
  for (auto e : {Experiment::kCs, Experiment::kGravity, Experiment::kScalarOracle}) {
    if (ToString(e) == s) return e;
  }
  throw InvalidInput("unknown experiment '" + s + "' (cs, gravity, scalar-oracle)");
}

RunMode ParseRunMode(const std::string& s) {
  for (auto m : {RunMode::kAlgorithm1, RunMode::kUpperBound, RunMode::kSweep,
                 RunMode::kNoiseStudy, RunMode::kRateStudy, RunMode::kCheck}) {
    if (ToString(m) == s) return m;
  }
  throw InvalidInput("unknown mode '" + s +
                     "' (algorithm1, upper-bound, sweep, noise-study, "
                     "rate-study, check)");
}

OutputFormat ParseOutputFormat(const std::string& s) {
  for (auto f : {OutputFormat::kCsv, OutputFormat::kJson, OutputFormat::kBoth}) {
    if (ToString(f) == s) return f;
  }
  throw InvalidInput("unknown format '" + s + "' (csv, json, both)");
}

WarmStartPolicy ParseWarmStartPolicy(const std::string& s) {
  if (s == "warm") return WarmStartPolicy::kWarm;
  if (s == "cold") return WarmStartPolicy::kCold;
  throw InvalidInput("unknown warm-start policy '" + s + "' (warm, cold)");
}

std::vector<double> RunConfig::ResolvedLevels() const {
  if (!levels.empty()) return levels;
  if (experiment == Experiment::kGravity) {
    return {0.02, 0.01, 0.005, 0.0025, 0.00125};
  }
  return {30, 35, 40, 45, 50, 55, 60};
}

void RunConfig::Validate() const {
  if (jobs < 0) throw ConfigError("jobs must be >= 0");
  if (seeds_per_level < 1) throw ConfigError("seeds_per_level must be >= 1");
  if (out.empty()) throw ConfigError("out must not be empty");
  try {
    switch (experiment) {
      case Experiment::kCs: cs.Validate(); break;
      case Experiment::kGravity: gravity.Validate(); break;
      case Experiment::kScalarOracle: scalar.Validate(); break;
    }
    if (mode == RunMode::kSweep) ParseAlphaGrid(alpha_grid);
  } catch (const InvalidInput& e) {
    throw ConfigError(e.what());
  }
  if (mode == RunMode::kRateStudy && experiment != Experiment::kGravity) {
    throw ConfigError("mode rate-study requires experiment gravity");
  }
  if (mode == RunMode::kNoiseStudy && experiment == Experiment::kScalarOracle) {
    throw ConfigError("mode noise-study requires experiment cs or gravity");
  }
}

std::vector<std::string> ConfigKeys() {
  std::vector<std::string> keys;
  for (const auto& f : Schema()) keys.push_back(f.name);
  return keys;
}

void SetConfigValue(RunConfig& cfg, const std::string& key,
                    const std::string& value) {
  const Field* field = FindField(key);
  if (!field) throw ConfigError("unknown key '" + key + "'");
  field->set(cfg, value);
  cfg.explicit_keys.insert(key);
}

RunConfig ParseConfigText(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = Trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("unterminated section header", line_no);
      section = Trim(line.substr(1, line.size() - 2));
      if (!KnownSection(section)) {
        throw ConfigError("unknown section [" + section + "]", line_no);
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("expected 'key = value'", line_no);
    }
    const std::string key = Trim(line.substr(0, eq));
    const std::string value = Trim(line.substr(eq + 1));
    const std::string name = section.empty() ? key : section + "." + key;
    if (!FindField(name)) throw ConfigError("unknown key '" + name + "'", line_no);
    if (cfg.explicit_keys.count(name)) {
      throw ConfigError("duplicate key '" + name + "'", line_no);
    }
    try {
      SetConfigValue(cfg, name, value);
    } catch (const ConfigError& e) {
      throw ConfigError(name + ": " + e.what(), line_no);
    }
  }
  if (!cfg.explicit_keys.count("experiment")) {
    throw ConfigError("missing required key 'experiment'");
  }
  cfg.Validate();
  return cfg;
}

RunConfig ParseConfigFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return ParseConfigText(buf.str());
}

std::string SerializeConfig(const RunConfig& cfg) {
  std::string out;
  std::string section;
  for (const auto& f : Schema()) {
    const auto dot = f.name.rfind('.');
    const std::string s = dot == std::string::npos ? "" : f.name.substr(0, dot);
    const std::string key = dot == std::string::npos ? f.name : f.name.substr(dot + 1);
    if (s != section) {
      out += "\n[" + s + "]\n";
      section = s;
    }
    out += key + " = " + f.get(cfg) + "\n";
  }
  return out;
}

}  // namespace morozov
