#include "nsvs/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <thread>

#include "nsvs/errors.hpp"

namespace nsvs {

using nlohmann::json;

RunResult run_scenario(const Scenario& s) {
  const int n = s.robot.dof();
  const IntentSchedule& schedule = s.intent;
  return run_scenario(s, [&](std::int64_t, double t) { return schedule.at(t, n); });
}

RunResult run_scenario(const Scenario& s, const IntentFn& intent) {
  const auto start = std::chrono::steady_clock::now();
  RunResult result;
  Simulator sim(make_setup(s));
  const std::int64_t steps = s.sim.step_count();
  result.log.reserve(static_cast<std::size_t>(steps));
  try {
    for (std::int64_t k = 0; k < steps; ++k) {
      result.log.push_back(sim.step(intent(k, sim.time())));
    }
  } catch (const DivergenceError& e) {
    result.aborted = std::string("divergence: ") + e.what();
  } catch (const IntegrityError& e) {
    result.aborted = std::string("integrity: ") + e.what();
  } catch (const BehindCameraError& e) {
    result.aborted = std::string("behind camera: ") + e.what();
  }
  result.summary = summarize(result.log, s.convergence_threshold);
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

IntentComparison compare_intent_off(const Scenario& s) {
  Scenario off = s;
  off.intent.segments.clear();
  const RunResult on_run = run_scenario(s);
  const RunResult off_run = run_scenario(off);

  IntentComparison cmp;
  cmp.joint_divergence = VecX::Zero(s.robot.dof());
  if (on_run.aborted) cmp.aborted = on_run.aborted;
  else if (off_run.aborted) cmp.aborted = off_run.aborted;

  const std::size_t count = std::min(on_run.log.size(), off_run.log.size());
  for (std::size_t i = 0; i < count; ++i) {
    const auto& a = on_run.log[i];
    const auto& b = off_run.log[i];
    cmp.max_image_divergence = std::max(cmp.max_image_divergence, (a.x - b.x).norm());
    cmp.joint_divergence = cmp.joint_divergence.cwiseMax((a.q - b.q).cwiseAbs());
  }
  cmp.max_joint_divergence = cmp.joint_divergence.maxCoeff();
  return cmp;
}

AblationResult ablation_sweep(const Scenario& base, int seeds, int jobs, std::uint64_t first_seed,
                              double probe_time) {
  AblationResult result;
  result.probe_time = probe_time;
  result.rows.resize(static_cast<std::size_t>(std::max(seeds, 0)));

  // Only the first probe_time seconds matter.
  Scenario trimmed = base;
  trimmed.sim.duration = std::min(base.sim.duration, probe_time + 2.0 * base.sim.dt);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < result.rows.size(); i = next++) {
      AblationRow& row = result.rows[i];
      row.seed = first_seed + i;
      Scenario adaptive = trimmed;
      adaptive.sim.seed = row.seed;
      adaptive.gains.adaptation_enabled = true;
      Scenario fixed = adaptive;
      fixed.gains.adaptation_enabled = false;

      const RunResult a = run_scenario(adaptive);
      const RunResult f = run_scenario(fixed);
      row.adaptive_error = error_at(a.log, probe_time);
      row.fixed_error = error_at(f.log, probe_time);
      row.aborted = a.aborted ? a.aborted : f.aborted;
    }
  };

  const int threads = std::clamp(jobs, 1, std::max(seeds, 1));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  result.wins = static_cast<int>(
      std::count_if(result.rows.begin(), result.rows.end(),
                    [](const AblationRow& r) { return r.adaptive_not_worse(); }));
  return result;
}

std::vector<std::string> telemetry_columns(int dof) {
  std::vector<std::string> cols{"t"};
  auto indexed = [&](const std::string& name, int count) {
    for (int i = 1; i <= count; ++i) cols.push_back(name + std::to_string(i));
  };
  indexed("q", dof);
  cols.insert(cols.end(), {"r_x", "r_y", "r_z", "x_u", "x_v", "x_d_u", "x_d_v", "e_u", "e_v"});
  indexed("d", dof);
  indexed("u", dof);
  indexed("u_T", dof);
  indexed("u_N", dof);
  cols.insert(cols.end(), {"z_hat", "z_true", "V", "null_residual", "sigma_min", "z_clamped",
                           "j_damped", "js_damped"});
  return cols;
}

std::vector<double> telemetry_row(const TelemetryRecord& rec) {
  std::vector<double> row;
  row.reserve(static_cast<std::size_t>(14 + 5 * rec.q.size()));
  auto vec = [&](const auto& v) { row.insert(row.end(), v.data(), v.data() + v.size()); };
  row.push_back(rec.t);
  vec(rec.q);
  vec(rec.r);
  vec(rec.x);
  vec(rec.x_d);
  vec(rec.e);
  vec(rec.d);
  vec(rec.u);
  vec(rec.u_T);
  vec(rec.u_N);
  row.insert(row.end(), {rec.z_hat, rec.z_true, rec.V, rec.null_residual, rec.sigma_min,
                         double(rec.z_clamped), double(rec.j_damped), double(rec.js_damped)});
  return row;
}

void write_telemetry_csv(std::ostream& out, const std::vector<TelemetryRecord>& log,
                         int decimation) {
  const int dof = log.empty() ? 0 : static_cast<int>(log.front().q.size());
  out << "# t: s; q, u_T, u_N, u: rad and rad/s; r: m (robot base frame); x, x_d, e: px\n"
      << "# d: rad/s (human intent); z_hat, z_true: projective depth (camera units)\n"
      << "# V: Lyapunov value; null_residual: |N (c_d u - d)|; sigma_min: smallest singular value of J\n"
      << "# z_clamped, j_damped, js_damped: 0/1 safeguard flags\n";
  const auto cols = telemetry_columns(dof);
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';

  char buf[32];
  const std::size_t stride = static_cast<std::size_t>(std::max(decimation, 1));
  for (std::size_t k = 0; k < log.size(); k += stride) {
    const auto row = telemetry_row(log[k]);
    for (std::size_t i = 0; i < row.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", row[i]);
      if (i) out << ',';
      out << buf;
    }
    out << '\n';
  }
}

void write_telemetry_csv(const std::filesystem::path& path,
                         const std::vector<TelemetryRecord>& log, int decimation) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_telemetry_csv(out, log, decimation);
}

json summary_to_json(const RunResult& run) {
  const SummaryMetrics& m = run.summary;
  json j;
  j["convergence_threshold_px"] = m.threshold_px;
  j["convergence_time_s"] = m.convergence_time ? json(*m.convergence_time) : json(nullptr);
  j["steady_state_mean_px"] = m.steady_state_mean;
  j["steady_state_max_px"] = m.steady_state_max;
  j["final_error_px"] = m.final_error;
  j["max_error_px"] = m.max_error;
  j["error_at_2s_px"] = run.log.empty() ? json(nullptr) : json(error_at(run.log, 2.0));
  j["max_null_residual"] = m.max_null_residual;
  j["v_violations"] = m.v_violations;
  j["v_slack_relative"] = kLyapunovSlack;
  j["clamp_events"] = m.clamp_events;
  j["j_damped_events"] = m.j_damped_events;
  j["js_damped_events"] = m.js_damped_events;
  j["samples"] = m.samples;
  j["aborted"] = run.aborted ? json(*run.aborted) : json(nullptr);
  return j;
}

void write_run_outputs(const std::filesystem::path& dir, const Scenario& s, const RunResult& run) {
  std::filesystem::create_directories(dir);
  write_telemetry_csv(dir / "telemetry.csv", run.log, s.sim.decimation);
  std::ofstream(dir / "summary.json") << summary_to_json(run).dump(2) << '\n';
  std::ofstream(dir / "effective_config.json") << scenario_to_json(s).dump(2) << '\n';
}

}  // namespace nsvs
