#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "nsvs/metrics.hpp"
#include "nsvs/scenario.hpp"

namespace nsvs {

struct RunResult {
  std::vector<TelemetryRecord> log;  // one record per step, undecimated
  SummaryMetrics summary;
  /// Set when the run stopped early on divergence, a non-finite state or the
  /// feature leaving the depth range. `log` holds everything up to that point.
  std::optional<std::string> aborted;
  double wall_seconds = 0.0;
};

/// Per-step intent; receives the step index and its time.
using IntentFn = std::function<VecX(std::int64_t step, double t)>;

/// Runs the scenario headless with its scripted intent schedule.
RunResult run_scenario(const Scenario& s);

/// Runs the scenario with intents supplied by `intent` instead of the schedule.
RunResult run_scenario(const Scenario& s, const IntentFn& intent);

struct IntentComparison {
  double max_image_divergence = 0.0;  // px, max over t of |x_on - x_off|
  double max_joint_divergence = 0.0;  // rad, max over t and joints
  VecX joint_divergence;              // rad, per joint max over t
  std::optional<std::string> aborted;
};

/// Paired runs with the intent schedule on and with d = 0 throughout.
IntentComparison compare_intent_off(const Scenario& s);

struct AblationRow {
  std::uint64_t seed = 0;
  double adaptive_error = 0.0;  // |e| at the probe time, px
  double fixed_error = 0.0;
  std::optional<std::string> aborted;

  bool adaptive_not_worse() const { return !aborted && adaptive_error <= fixed_error; }
};

struct AblationResult {
  double probe_time = 2.0;
  std::vector<AblationRow> rows;
  int wins = 0;  // rows where adaptation is not worse
};

/// Adaptive vs fixed-estimate runs for seeds first_seed .. first_seed+seeds-1,
/// spread over `jobs` worker threads. Rows come back in seed order.
AblationResult ablation_sweep(const Scenario& base, int seeds, int jobs,
                              std::uint64_t first_seed = 0, double probe_time = 2.0);

/// Telemetry CSV: '#' comment lines with units, then one header row and every
/// `decimation`-th record. Numbers are printed with 17 significant digits.
void write_telemetry_csv(std::ostream& out, const std::vector<TelemetryRecord>& log,
                         int decimation = 1);
void write_telemetry_csv(const std::filesystem::path& path,
                         const std::vector<TelemetryRecord>& log, int decimation = 1);

std::vector<std::string> telemetry_columns(int dof);

/// One record in telemetry_columns order; flags become 0.0 / 1.0.
std::vector<double> telemetry_row(const TelemetryRecord& rec);

nlohmann::json summary_to_json(const RunResult& run);

/// Writes telemetry.csv, summary.json and effective_config.json into `dir`.
void write_run_outputs(const std::filesystem::path& dir, const Scenario& s, const RunResult& run);

}  // namespace nsvs
