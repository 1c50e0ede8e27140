#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "nsvs/harness.hpp"

using namespace nsvs;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Scenario short_task1(double duration = 2.0) {
  Scenario s = task1_preset();
  s.sim.duration = duration;
  return s;
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("telemetry csv layout") {
  const RunResult run = run_scenario(short_task1(1.0));
  std::stringstream out;
  write_telemetry_csv(out, run.log, 3);

  std::string line;
  int comments = 0;
  while (std::getline(out, line) && line.rfind('#', 0) == 0) ++comments;
  CHECK(comments >= 1);

  const auto cols = telemetry_columns(6);
  std::string header;
  for (std::size_t i = 0; i < cols.size(); ++i) header += (i ? "," : "") + cols[i];
  CHECK(line == header);
  CHECK(cols.front() == "t");
  CHECK(cols.back() == "js_damped");

  int rows = 0;
  while (std::getline(out, line)) {
    ++rows;
    CHECK(std::count(line.begin(), line.end(), ',') + 1 == static_cast<long>(cols.size()));
  }
  CHECK(rows == 10);  // 30 steps, every third
}

TEST_CASE("csv values round-trip") {
  const RunResult run = run_scenario(short_task1(0.2));
  std::stringstream out;
  write_telemetry_csv(out, run.log);
  std::string line;
  while (std::getline(out, line) && line.rfind('#', 0) == 0) {}
  std::getline(out, line);  // first data row
  std::getline(out, line);  // second
  const double t = std::stod(line.substr(0, line.find(',')));
  CHECK(t == run.log[1].t);
  const auto q1_start = line.find(',') + 1;
  const double q1 = std::stod(line.substr(q1_start, line.find(',', q1_start) - q1_start));
  CHECK(q1 == run.log[1].q[0]);
}

TEST_CASE("run outputs") {
  const auto dir = std::filesystem::temp_directory_path() / "nsvs_harness_test";
  std::filesystem::remove_all(dir);
  const Scenario s = short_task1();
  write_run_outputs(dir, s, run_scenario(s));
  CHECK(std::filesystem::exists(dir / "telemetry.csv"));

  const auto summary = nlohmann::json::parse(slurp(dir / "summary.json"));
  CHECK(summary.at("convergence_threshold_px") == 5.0);
  CHECK(summary.at("aborted").is_null());

  const Scenario echo = parse_scenario(dir / "effective_config.json");
  CHECK(scenario_to_json(echo) == scenario_to_json(s));

  // Same inputs, same bytes.
  const std::string first = slurp(dir / "telemetry.csv");
  write_run_outputs(dir, s, run_scenario(s));
  CHECK(slurp(dir / "telemetry.csv") == first);
  std::filesystem::remove_all(dir);
}

TEST_CASE("divergence stops the run and keeps the log") {
  Scenario s = short_task1();
  s.sim.max_joint_rate = 0.05;
  const RunResult run = run_scenario(s);
  REQUIRE(run.aborted);
  CHECK(run.aborted->find("divergence") == 0);
  CHECK(run.log.size() < static_cast<std::size_t>(s.sim.step_count()));
}

TEST_CASE("intent on/off comparison") {
  Scenario s = task2_preset();
  s.sim.duration = 30.0;
  const IntentComparison cmp = compare_intent_off(s);
  CHECK_FALSE(cmp.aborted);
  CHECK(cmp.max_image_divergence < 1e-3);
  CHECK(cmp.joint_divergence[2] > 0.1);

  s.intent.segments.clear();
  const IntentComparison none = compare_intent_off(s);
  CHECK(none.max_image_divergence == 0.0);
  CHECK(none.max_joint_divergence == 0.0);
}

TEST_CASE("ablation sweep is independent of the worker count") {
  const Scenario s = task1_preset();
  const AblationResult serial = ablation_sweep(s, 4, 1, 10);
  const AblationResult parallel = ablation_sweep(s, 4, 3, 10);
  REQUIRE(serial.rows.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(serial.rows[i].seed == 10 + i);
    CHECK(serial.rows[i].adaptive_error == parallel.rows[i].adaptive_error);
    CHECK(serial.rows[i].fixed_error == parallel.rows[i].fixed_error);
  }
  CHECK(serial.wins == parallel.wins);
}

TEST_CASE("adaptation beats a fixed estimate on the task-1 preset") {
  const Scenario s = task1_preset();
  Scenario fixed = s;
  fixed.gains.adaptation_enabled = false;
  CHECK(error_at(run_scenario(s).log, 2.0) <= error_at(run_scenario(fixed).log, 2.0));
}

TEST_CASE("task-1 preset settles below a pixel") {
  const RunResult run = run_scenario(task1_preset());
  CHECK_FALSE(run.aborted);
  CHECK(run.summary.steady_state_mean < 1.0);
}

}
