#ifndef MOROZOV_OUTPUT_H_
#define MOROZOV_OUTPUT_H_

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "morozov/experiments.h"

namespace morozov {

using Cell = std::variant<double, std::int64_t, std::string>;

// A rectangular table written as CSV (header row, doubles in shortest
// round-trip form) or as a JSON array of objects.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void AddRow(std::vector<Cell> row);
  std::string ToCsv() const;
  nlohmann::json ToJson() const;
};

Table StudyTable(const std::vector<StudyRecord>& records);
Table SweepTable(const std::vector<SweepRecord>& rows);
// step, phase, alpha, discrepancy, penalty, m, alpha_min, alpha_max
Table TraceTable(const AlphaSearchTrace& trace);

enum class PlotKind {
  kDeltaVsSnr,
  kAlphaVsSnr,
  kRerrorVsSnr,
  kDiscrepancyVsAlpha,
  kRerrorVsAlpha,
  kSignalOverlay,
  kGravityProfile
};
std::string ToString(PlotKind kind);

// Plot-data tables. Each throws InvalidInput on empty input.
//   delta-vs-snr:          level, delta, c_delta
//   alpha-vs-snr:          level, alpha
//   rerror-vs-snr:         level, relative_error
//   discrepancy-vs-alpha:  alpha, discrepancy, tau1_delta, tau2_delta, c_delta
//   rerror-vs-alpha:       alpha, relative_error
//   signal-overlay:        index, x_true, x_recovered
//   gravity-profile:       station, g_clean, g_observed, g_reconstructed
// The level column is named snr_db or noise_fraction after the experiment.
Table StudyPlot(PlotKind kind, const std::vector<StudyRecord>& records);
Table SweepPlot(PlotKind kind, const std::vector<SweepRecord>& rows,
                double delta, const MdpConfig& mdp);
Table SignalOverlay(const Vector& x_true, const Vector& x_recovered);
Table GravityProfile(const Vector& stations, const Vector& g_clean,
                     const Vector& g_observed, const Vector& g_reconstructed);

// Writes `contents` to `path`; throws std::runtime_error on failure.
void WriteFile(const std::string& path, const std::string& contents);
std::string ReadFile(const std::string& path);

}  // namespace morozov

#endif  // MOROZOV_OUTPUT_H_
