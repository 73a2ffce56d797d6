#include "morozov/output.h"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "morozov/config.h"

namespace morozov {

namespace {

std::string CsvField(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string CellText(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return FormatDouble(*d);
  if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  return CsvField(std::get<std::string>(c));
}

nlohmann::json CellJson(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) {
    // JSON has no inf/nan; keep them readable as strings.
    if (!std::isfinite(*d)) return FormatDouble(*d);
    return *d;
  }
  if (const auto* i = std::get_if<std::int64_t>(&c)) return *i;
  return std::get<std::string>(c);
}

std::string LevelColumn(const std::vector<StudyRecord>& records) {
  return records.front().experiment == "gravity" ? "noise_fraction" : "snr_db";
}

}  // namespace

void Table::AddRow(std::vector<Cell> row) {
  if (row.size() != columns.size()) {
    throw InvalidInput("Table::AddRow: row width does not match header");
  }
  rows.push_back(std::move(row));
}

std::string Table::ToCsv() const {
  std::string out;
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (j > 0) out += ',';
    out += CsvField(columns[j]);
  }
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j > 0) out += ',';
      out += CellText(row[j]);
    }
    out += '\n';
  }
  return out;
}

nlohmann::json Table::ToJson() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& row : rows) {
    nlohmann::json obj = nlohmann::json::object();
    for (std::size_t j = 0; j < row.size(); ++j) obj[columns[j]] = CellJson(row[j]);
    arr.push_back(std::move(obj));
  }
  return arr;
}

Table StudyTable(const std::vector<StudyRecord>& records) {
  Table t;
  t.columns = {"experiment", "mode",        "level",          "seed",
               "delta",      "c_delta",     "alpha",          "discrepancy",
               "relative_error", "bregman_distance", "outcome", "solver_status",
               "solver_iterations"};
  for (const auto& r : records) {
    t.AddRow({r.experiment, r.mode, r.level, std::to_string(r.seed), r.delta,
              r.c_delta, r.alpha, r.discrepancy, r.relative_error,
              r.bregman_distance, r.outcome, r.solver_status,
              std::int64_t{r.solver_iterations}});
  }
  return t;
}

Table SweepTable(const std::vector<SweepRecord>& rows) {
  Table t;
  t.columns = {"alpha",  "discrepancy", "penalty", "m", "relative_error",
               "status", "optimality_residual", "iterations", "error"};
  for (const auto& r : rows) {
    t.AddRow({r.alpha, r.discrepancy, r.penalty, r.functional,
              r.relative_error, ToString(r.status), r.optimality_residual,
              std::int64_t{r.iterations}, r.error});
  }
  return t;
}

Table TraceTable(const AlphaSearchTrace& trace) {
  Table t;
  t.columns = {"step",    "phase", "alpha",     "discrepancy",
               "penalty", "m",     "alpha_min", "alpha_max"};
  for (const auto& s : trace.steps) {
    t.AddRow({std::int64_t{s.step}, ToString(s.phase), s.alpha, s.discrepancy,
              s.penalty, s.functional, s.alpha_min, s.alpha_max});
  }
  return t;
}

std::string ToString(PlotKind kind) {
  switch (kind) {
    case PlotKind::kDeltaVsSnr: return "delta-vs-snr";
    case PlotKind::kAlphaVsSnr: return "alpha-vs-snr";
    case PlotKind::kRerrorVsSnr: return "rerror-vs-snr";
    case PlotKind::kDiscrepancyVsAlpha: return "discrepancy-vs-alpha";
    case PlotKind::kRerrorVsAlpha: return "rerror-vs-alpha";
    case PlotKind::kSignalOverlay: return "signal-overlay";
    case PlotKind::kGravityProfile: return "gravity-profile";
  }
  return "unknown";
}

Table StudyPlot(PlotKind kind, const std::vector<StudyRecord>& records) {
  if (records.empty()) throw InvalidInput("StudyPlot: no records");
  Table t;
  const std::string level = LevelColumn(records);
  switch (kind) {
    case PlotKind::kDeltaVsSnr:
      t.columns = {level, "delta", "c_delta"};
      for (const auto& r : records) t.AddRow({r.level, r.delta, r.c_delta});
      break;
    case PlotKind::kAlphaVsSnr:
      t.columns = {level, "alpha"};
      for (const auto& r : records) t.AddRow({r.level, r.alpha});
      break;
    case PlotKind::kRerrorVsSnr:
      t.columns = {level, "relative_error"};
      for (const auto& r : records) t.AddRow({r.level, r.relative_error});
      break;
    default:
      throw InvalidInput("StudyPlot: " + ToString(kind) + " is not a study plot");
  }
  return t;
}

Table SweepPlot(PlotKind kind, const std::vector<SweepRecord>& rows,
                double delta, const MdpConfig& mdp) {
  if (rows.empty()) throw InvalidInput("SweepPlot: no rows");
  Table t;
  switch (kind) {
    case PlotKind::kDiscrepancyVsAlpha:
      t.columns = {"alpha", "discrepancy", "tau1_delta", "tau2_delta", "c_delta"};
      for (const auto& r : rows) {
        t.AddRow({r.alpha, r.discrepancy, mdp.tau1 * delta, mdp.tau2 * delta,
                  mdp.c() * delta});
      }
      break;
    case PlotKind::kRerrorVsAlpha:
      t.columns = {"alpha", "relative_error"};
      for (const auto& r : rows) t.AddRow({r.alpha, r.relative_error});
      break;
    default:
      throw InvalidInput("SweepPlot: " + ToString(kind) + " is not a sweep plot");
  }
  return t;
}

Table SignalOverlay(const Vector& x_true, const Vector& x_recovered) {
  if (x_true.size() == 0) throw InvalidInput("SignalOverlay: empty signal");
  RequireSize(x_recovered, x_true.size(), "SignalOverlay");
  Table t;
  t.columns = {"index", "x_true", "x_recovered"};
  for (Eigen::Index i = 0; i < x_true.size(); ++i) {
    t.AddRow({std::int64_t{i}, x_true[i], x_recovered[i]});
  }
  return t;
}

Table GravityProfile(const Vector& stations, const Vector& g_clean,
                     const Vector& g_observed, const Vector& g_reconstructed) {
  if (stations.size() == 0) throw InvalidInput("GravityProfile: no stations");
  RequireSize(g_clean, stations.size(), "GravityProfile");
  RequireSize(g_observed, stations.size(), "GravityProfile");
  RequireSize(g_reconstructed, stations.size(), "GravityProfile");
  Table t;
  t.columns = {"station", "g_clean", "g_observed", "g_reconstructed"};
  for (Eigen::Index i = 0; i < stations.size(); ++i) {
    t.AddRow({stations[i], g_clean[i], g_observed[i], g_reconstructed[i]});
  }
  return t;
}

void WriteFile(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << contents;
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace morozov
