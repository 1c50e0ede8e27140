#include "nsvs/metrics.hpp"

#include <algorithm>

namespace nsvs {

SummaryMetrics summarize(const std::vector<TelemetryRecord>& log, double threshold_px) {
  SummaryMetrics m;
  m.threshold_px = threshold_px;
  m.samples = static_cast<int>(log.size());
  if (log.empty()) return m;

  // Walk backwards to find where the error last rose above the threshold.
  std::optional<std::size_t> settled;
  for (std::size_t i = log.size(); i-- > 0;) {
    if (log[i].e.norm() >= threshold_px) break;
    settled = i;
  }
  if (settled) m.convergence_time = log[*settled].t;

  const std::size_t tail = std::max<std::size_t>(1, log.size() / 10);
  double sum = 0.0;
  for (std::size_t i = log.size() - tail; i < log.size(); ++i) {
    const double err = log[i].e.norm();
    sum += err;
    m.steady_state_max = std::max(m.steady_state_max, err);
  }
  m.steady_state_mean = sum / static_cast<double>(tail);
  m.final_error = log.back().e.norm();

  const double slack = kLyapunovSlack * log.front().V;
  for (std::size_t i = 0; i < log.size(); ++i) {
    const auto& rec = log[i];
    m.max_error = std::max(m.max_error, rec.e.norm());
    if (!rec.j_damped) m.max_null_residual = std::max(m.max_null_residual, rec.null_residual);
    m.clamp_events += rec.z_clamped;
    m.j_damped_events += rec.j_damped;
    m.js_damped_events += rec.js_damped;
    if (i > 0 && rec.V - log[i - 1].V > slack) ++m.v_violations;
  }
  return m;
}

double error_at(const std::vector<TelemetryRecord>& log, double time) {
  for (const auto& rec : log) {
    if (rec.t >= time - 1e-9) return rec.e.norm();
  }
  return log.empty() ? 0.0 : log.back().e.norm();
}

}  // namespace nsvs
