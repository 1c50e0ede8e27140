#pragma once

#include <optional>
#include <vector>

#include "nsvs/simulator.hpp"

namespace nsvs {

struct SummaryMetrics {
  double threshold_px = 5.0;
  /// First t after which |e| stays below the threshold for the rest of the
  /// log; empty if the log never settles.
  std::optional<double> convergence_time;
  double steady_state_mean = 0.0;  // mean |e| over the last 10% of samples
  double steady_state_max = 0.0;
  double final_error = 0.0;
  double max_error = 0.0;
  double max_null_residual = 0.0;  // over steps with an undamped J^+
  int v_violations = 0;            // steps with V increase > 1e-4 V(0)
  int clamp_events = 0;
  int j_damped_events = 0;
  int js_damped_events = 0;
  int samples = 0;
};

/// Relative per-step slack on V used when counting monotonicity violations.
inline constexpr double kLyapunovSlack = 1e-4;

SummaryMetrics summarize(const std::vector<TelemetryRecord>& log, double threshold_px = 5.0);

/// |e| at the first record with t >= time (last record if none).
double error_at(const std::vector<TelemetryRecord>& log, double time);

}  // namespace nsvs
