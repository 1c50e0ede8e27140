// nsvs: run, sweep and serve visual-servoing scenarios.

#include <CLI11.hpp>

#include <atomic>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <thread>

#include "nsvs/errors.hpp"
#include "nsvs/harness.hpp"
#include "nsvs/server.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitDivergence = 3;

std::atomic<bool> g_interrupted{false};

void on_signal(int) { g_interrupted = true; }

struct RunArgs {
  std::string scenario;
  std::string out;
  std::optional<double> duration;
  std::optional<double> hz;
  std::optional<std::uint64_t> seed;
  bool no_adapt = false;
  std::optional<std::string> integrator;
  bool compare_intent_off = false;
};

struct ServeArgs {
  std::string scenario;
  std::string bind = "127.0.0.1:8765";
  int decimation = 1;
  double ttl = 0.5;
  std::string static_dir;
  std::string session_id = "session";
};

struct AblateArgs {
  std::string scenario;
  int seeds = 20;
  int jobs = 1;
  std::uint64_t first_seed = 0;
  double at = 2.0;
  std::string out;
};

nsvs::Scenario load_with_overrides(const RunArgs& a) {
  nsvs::Scenario s = nsvs::load_scenario(a.scenario);
  if (a.duration) s.sim.duration = *a.duration;
  if (a.hz) s.sim.dt = 1.0 / *a.hz;
  if (a.seed) s.sim.seed = *a.seed;
  if (a.no_adapt) s.gains.adaptation_enabled = false;
  if (a.integrator) s.sim.integrator = nsvs::integrator_from_string(*a.integrator);
  nsvs::validate_scenario(s);
  return s;
}

void print_summary(const nsvs::Scenario& s, const nsvs::RunResult& run) {
  const auto& m = run.summary;
  std::printf("scenario            %s (seed %llu, %s, dt %.6g s)\n", s.name.c_str(),
              static_cast<unsigned long long>(s.sim.seed), nsvs::to_string(s.sim.integrator).c_str(),
              s.sim.dt);
  std::printf("steps               %d in %.3f s wall\n", m.samples, run.wall_seconds);
  if (m.convergence_time) {
    std::printf("convergence time    %.4f s (threshold %.3g px)\n", *m.convergence_time, m.threshold_px);
  } else {
    std::printf("convergence time    never settled (threshold %.3g px)\n", m.threshold_px);
  }
  std::printf("steady-state error  mean %.6g px, max %.6g px (last 10%%)\n", m.steady_state_mean,
              m.steady_state_max);
  std::printf("error at 2 s        %.6g px\n", nsvs::error_at(run.log, 2.0));
  std::printf("max null residual   %.3g\n", m.max_null_residual);
  std::printf("V violations        %d\n", m.v_violations);
  std::printf("safeguards          %d depth clamps, %d J damped, %d Js damped\n", m.clamp_events,
              m.j_damped_events, m.js_damped_events);
}

int cmd_run(const RunArgs& a) {
  const nsvs::Scenario s = load_with_overrides(a);
  const nsvs::RunResult run = nsvs::run_scenario(s);
  const std::filesystem::path out = a.out.empty() ? std::filesystem::path("out") / s.name
                                                    : std::filesystem::path(a.out);
  nsvs::write_run_outputs(out, s, run);
  print_summary(s, run);

  if (a.compare_intent_off) {
    const nsvs::IntentComparison cmp = nsvs::compare_intent_off(s);
    std::printf("intent on vs off    max image divergence %.6g px, max joint divergence %.6g rad\n",
                cmp.max_image_divergence, cmp.max_joint_divergence);
    nlohmann::json summary = nsvs::summary_to_json(run);
    summary["intent_comparison"] = {{"max_image_divergence_px", cmp.max_image_divergence},
                                    {"max_joint_divergence_rad", cmp.max_joint_divergence},
                                    {"aborted", cmp.aborted ? nlohmann::json(*cmp.aborted) : nullptr}};
    std::ofstream(out / "summary.json") << summary.dump(2) << '\n';
    if (cmp.aborted) {
      std::fprintf(stderr, "paired run stopped: %s\n", cmp.aborted->c_str());
      return kExitDivergence;
    }
  }
  std::printf("outputs             %s\n", out.string().c_str());
  if (run.aborted) {
    std::fprintf(stderr, "run stopped: %s\n", run.aborted->c_str());
    return kExitDivergence;
  }
  return kExitOk;
}

int cmd_ablate(const AblateArgs& a) {
  const nsvs::Scenario s = nsvs::load_scenario(a.scenario);
  const nsvs::AblationResult r = nsvs::ablation_sweep(s, a.seeds, a.jobs, a.first_seed, a.at);
  std::printf("%6s %14s %14s %s\n", "seed", "adaptive_px", "fixed_px", "ok");
  for (const auto& row : r.rows) {
    std::printf("%6llu %14.6g %14.6g %s%s\n", static_cast<unsigned long long>(row.seed),
                row.adaptive_error, row.fixed_error, row.adaptive_not_worse() ? "yes" : "no",
                row.aborted ? (" (" + *row.aborted + ")").c_str() : "");
  }
  std::printf("%d/%zu seeds: adaptive error at %.3g s <= fixed-estimate error\n", r.wins,
              r.rows.size(), r.probe_time);
  if (!a.out.empty()) {
    std::ofstream csv(a.out);
    csv << "# error norms at t = " << r.probe_time << " s, px\nseed,adaptive_error,fixed_error,aborted\n";
    for (const auto& row : r.rows) {
      char line[128];
      std::snprintf(line, sizeof line, "%llu,%.17g,%.17g,%d\n",
                    static_cast<unsigned long long>(row.seed), row.adaptive_error, row.fixed_error,
                    row.aborted ? 1 : 0);
      csv << line;
    }
  }
  return kExitOk;
}

int cmd_serve(const ServeArgs& a) {
  const nsvs::Scenario s = nsvs::load_scenario(a.scenario);
  nsvs::ServerOptions opts;
  const auto colon = a.bind.rfind(':');
  if (colon == std::string::npos) throw nsvs::ConfigError("--bind expects HOST:PORT");
  opts.host = a.bind.substr(0, colon);
  opts.port = std::stoi(a.bind.substr(colon + 1));
  opts.static_dir = a.static_dir;

  nsvs::SessionConfig cfg;
  cfg.session_id = a.session_id;
  cfg.decimation = a.decimation;
  cfg.intent_ttl = a.ttl;

  nsvs::SessionServer server(nsvs::SessionCore(s, cfg), opts);
  const int port = server.start();
  std::printf("serving %s on http://%s:%d (decimation %d, intent ttl %.3g s)\n", s.name.c_str(),
              opts.host.c_str(), port, a.decimation, a.ttl);
  std::fflush(stdout);

  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  while (!g_interrupted) std::this_thread::sleep_for(std::chrono::milliseconds(100));
  server.stop();
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive visual servoing with null-space human intervention"};
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Run a scenario headless and write telemetry");
  run_cmd->add_option("scenario", run.scenario, "Scenario file, or task1 / task2")->required();
  run_cmd->add_option("--out", run.out, "Output directory (default out/<name>)");
  run_cmd->add_option("--duration", run.duration, "Simulated seconds");
  run_cmd->add_option("--hz", run.hz, "Control rate")->check(CLI::PositiveNumber);
  run_cmd->add_option("--seed", run.seed, "Seed for the initial estimate");
  run_cmd->add_flag("--no-adapt", run.no_adapt, "Freeze the parameter estimates");
  run_cmd->add_option("--integrator", run.integrator, "euler or rk4")
      ->check(CLI::IsMember({"euler", "rk4"}));
  run_cmd->add_flag("--compare-intent-off", run.compare_intent_off,
                    "Also run with d = 0 and report the image-trajectory divergence");

  ServeArgs serve;
  auto* serve_cmd = app.add_subcommand("serve", "Run a live session over HTTP");
  serve_cmd->add_option("scenario", serve.scenario, "Scenario file, or task1 / task2")->required();
  serve_cmd->add_option("--bind", serve.bind, "HOST:PORT")->capture_default_str();
  serve_cmd->add_option("--decimation", serve.decimation, "Broadcast every K-th step")->capture_default_str()
      ->check(CLI::PositiveNumber);
  serve_cmd->add_option("--ttl", serve.ttl, "Intent expiry in seconds, 0 disables")->capture_default_str();
  serve_cmd->add_option("--static", serve.static_dir, "Directory served at /");
  serve_cmd->add_option("--session-id", serve.session_id, "Session id stamped on messages")->capture_default_str();

  AblateArgs ablate;
  auto* ablate_cmd = app.add_subcommand("ablate", "Adaptive vs fixed estimates over many seeds");
  ablate_cmd->add_option("scenario", ablate.scenario, "Scenario file, or task1 / task2")->required();
  ablate_cmd->add_option("--seeds", ablate.seeds, "Number of seeds")->capture_default_str()->check(CLI::PositiveNumber);
  ablate_cmd->add_option("--jobs", ablate.jobs, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  ablate_cmd->add_option("--first-seed", ablate.first_seed, "First seed")->capture_default_str();
  ablate_cmd->add_option("--at", ablate.at, "Probe time in seconds")->capture_default_str();
  ablate_cmd->add_option("--out", ablate.out, "Write the table as CSV");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) return cmd_run(run);
    if (*ablate_cmd) return cmd_ablate(ablate);
    if (*serve_cmd) return cmd_serve(serve);
  } catch (const nsvs::ValidationError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return kExitValidation;
  } catch (const nsvs::ConfigError& e) {
    std::fprintf(stderr, "invalid configuration: %s\n", e.what());
    return kExitValidation;
  } catch (const nsvs::DivergenceError& e) {
    std::fprintf(stderr, "divergence: %s\n", e.what());
    return kExitDivergence;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return kExitOk;
}
