#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "nsvs/errors.hpp"
#include "nsvs/harness.hpp"
#include "nsvs/scenario.hpp"

using namespace nsvs;
using nlohmann::json;

namespace {

std::vector<std::string> issue_paths(const json& doc) {
  try {
    scenario_from_json(doc);
  } catch (const ValidationError& e) {
    std::vector<std::string> paths;
    for (const auto& issue : e.issues()) paths.push_back(issue.path);
    return paths;
  }
  return {};
}

bool has(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

json minimal() {
  return json::parse(R"({"robot": {"preset": "ur5"}, "target": {"type": "setpoint", "point": [720, 540]}})");
}

}  // namespace

TEST_SUITE("scenario") {

TEST_CASE("minimal file takes the default gains and timing") {
  const Scenario s = scenario_from_json(minimal());
  CHECK(s.sim.dt == 1.0 / 30.0);
  CHECK(s.gains.kp == Vec2(2, 2));
  CHECK(s.gains.cd == 1.0);
  CHECK(s.gains.lz == Vec4::Constant(0.001));
  CHECK(s.gains.lk == VecX::Constant(9, 0.001));
  CHECK(s.robot.dof() == 6);
  CHECK(s.initial_q == ur5_home_pose());
  CHECK(s.convergence_threshold == 5.0);
  CHECK(std::get<SetpointTarget>(s.target).point == Vec2(720, 540));
  CHECK(s.intent.segments.empty());
}

TEST_CASE("per-row layout sizes the default gain") {
  json doc = minimal();
  doc["parameterization"] = "per_row";
  CHECK(scenario_from_json(doc).gains.lk.size() == 12);
  doc["gains"] = {{"lk", std::vector<double>(9, 0.001)}};
  CHECK(has(issue_paths(doc), "gains.lk"));
}

TEST_CASE("invalid values name their field") {
  json doc = minimal();
  doc["gains"] = {{"cd", -1.0}};
  CHECK(issue_paths(doc) == std::vector<std::string>{"gains.cd"});

  doc = minimal();
  doc["gains"] = {{"kp", {2.0, 0.0}}, {"lz", 0.0}};
  const auto paths = issue_paths(doc);
  CHECK(has(paths, "gains.kp"));
  CHECK(has(paths, "gains.lz"));

  doc = minimal();
  doc["sim"] = {{"dt", 0.0}, {"integrator", "midpoint"}};
  CHECK(has(issue_paths(doc), "sim.integrator"));
  doc["sim"] = {{"dt", 0.0}};
  CHECK(has(issue_paths(doc), "sim.dt"));

  doc = minimal();
  doc["initial_q"] = {0, 0, 0};
  CHECK(has(issue_paths(doc), "initial_q"));

  doc = minimal();
  doc["intent"] = {{{"t_start", 1.0}, {"t_end", 0.5}, {"d", {0, 0, 0, 0, 0, 0}}}};
  CHECK(has(issue_paths(doc), "intent[0].t_end"));
}

TEST_CASE("unknown keys are rejected with their path") {
  json doc = minimal();
  doc["gains"] = {{"kpp", 2.0}};
  doc["extra"] = 1;
  doc["target"]["radius"] = 100;  // only valid for circles
  const auto paths = issue_paths(doc);
  CHECK(has(paths, "gains.kpp"));
  CHECK(has(paths, "extra"));
  CHECK(has(paths, "target.radius"));
}

TEST_CASE("parse and value problems are reported together") {
  json doc = minimal();
  doc["bogus"] = true;
  doc["gains"] = {{"cd", -1.0}};
  doc["sim"] = {{"integrator", "leapfrog"}};
  const auto paths = issue_paths(doc);
  CHECK(has(paths, "bogus"));
  CHECK(has(paths, "gains.cd"));
  CHECK(has(paths, "sim.integrator"));
  CHECK(std::count(paths.begin(), paths.end(), "gains.cd") == 1);
}

TEST_CASE("schema version") {
  json doc = minimal();
  doc["schema_version"] = 2;
  CHECK(has(issue_paths(doc), "schema_version"));
  doc["schema_version"] = kScenarioSchemaVersion;
  CHECK(issue_paths(doc).empty());
}

TEST_CASE("semantic checks") {
  SUBCASE("non-redundant robot") {
    json doc = minimal();
    doc["robot"] = {{"preset", "planar3r"}};
    CHECK(has(issue_paths(doc), "robot.dh"));
  }
  SUBCASE("feature behind the camera") {
    Scenario s = task1_preset();
    s.camera.P.row(2) *= -1.0;
    CHECK_THROWS_AS(validate_scenario(s), ValidationError);
    try {
      validate_scenario(s);
    } catch (const ValidationError& e) {
      CHECK(e.issues().front().path == "camera.P");
    }
  }
  SUBCASE("singular start") {
    // A planar chain never moves out of its plane, so its position Jacobian
    // is rank deficient everywhere.
    json doc = minimal();
    doc["robot"] = json::parse(R"({"dh": [{"a": 0.2}, {"a": 0.2}, {"a": 0.2}, {"a": 0.2}]})");
    doc["initial_q"] = {0.1, 0.2, 0.3, 0.4};
    doc["camera"] = {{"P", {{500, 0, 0, 720}, {0, 500, 0, 540}, {0, 0, 0.1, 3}}}};
    CHECK(has(issue_paths(doc), "initial_q"));
  }
}

TEST_CASE("custom robot") {
  json doc = minimal();
  doc["robot"] = json::parse(R"({"name": "chain4", "dh": [
      {"a": 0.3}, {"a": 0.3}, {"a": 0.3, "alpha": 1.0}, {"a": 0.2}]})");
  CHECK(has(issue_paths(doc), "initial_q"));
  doc["initial_q"] = {0.1, 0.2, 0.3, 0.4};
  doc["camera"] = {{"P", {{500, 0, 0, 720}, {0, 500, 0, 540}, {0, 0, 0.1, 3}}}};
  doc["intent"] = {{{"t_start", 0}, {"t_end", 1}, {"d", {0, 1, 0, 0}}}};
  const Scenario s = scenario_from_json(doc);
  CHECK(s.robot.dof() == 4);
  CHECK(s.robot.name == "chain4");
  CHECK(s.robot.joints[2].alpha == 1.0);
}

TEST_CASE("circle target") {
  json doc = minimal();
  doc["target"] = {{"type", "circle"}, {"center", {720, 540}}, {"radius", 100},
                   {"rate", std::numbers::pi / 15}, {"t0", 2.0}};
  const Scenario s = scenario_from_json(doc);
  CHECK((desired_pixel(s.target, 2.0) - Vec2(820, 540)).norm() < 1e-12);
  CHECK((desired_pixel(s.target, 9.5) - Vec2(720, 640)).norm() < 1e-12);
  CHECK((desired_pixel(s.target, 17.0) - Vec2(620, 540)).norm() < 1e-12);
}

TEST_CASE("effective config round-trips exactly") {
  for (Scenario s : {task1_preset(), task2_preset()}) {
    s.gains.lk[3] = 0.1 / 3.0;
    s.sim.seed = 12345678901234567ULL;
    const json echo = scenario_to_json(s);
    const Scenario back = scenario_from_json(json::parse(echo.dump(2)));
    CHECK(scenario_to_json(back) == echo);
    CHECK(back.sim.dt == s.sim.dt);
    CHECK(back.camera.P == s.camera.P);
    CHECK(back.gains.lk == s.gains.lk);

    Scenario short_a = s, short_b = back;
    short_a.sim.duration = short_b.sim.duration = 1.0;
    const auto a = run_scenario(short_a).log;
    const auto b = run_scenario(short_b).log;
    REQUIRE(a.size() == b.size());
    CHECK(a.back().q == b.back().q);
    CHECK(a.back().V == b.back().V);
  }
}

TEST_CASE("explicit and truth initial estimates round-trip") {
  Scenario s = task1_preset();
  s.theta_init.mode = ThetaInit::Mode::explicit_values;
  s.theta_init.theta_z = Vec4(1, 2, 3, 4);
  s.theta_init.theta_k = VecX::LinSpaced(9, 1, 9);
  Scenario back = scenario_from_json(scenario_to_json(s));
  CHECK(initial_estimate(back).theta_k == s.theta_init.theta_k);

  s.theta_init.mode = ThetaInit::Mode::truth;
  back = scenario_from_json(scenario_to_json(s));
  CHECK(initial_estimate(back).theta_z == true_params(s.camera).theta_z);
}

TEST_CASE("random initial estimate") {
  Scenario s = task1_preset();
  const TrueParams truth = true_params(s.camera);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    s.sim.seed = seed;
    const EstimatorState est = initial_estimate(s);
    CHECK(initial_estimate(s).theta_k == est.theta_k);
    for (Eigen::Index i = 0; i < 4; ++i) {
      if (truth.theta_z[i] == 0.0) continue;
      const double f = est.theta_z[i] / truth.theta_z[i];
      CHECK(f >= 0.5);
      CHECK(f <= 2.0);
    }
    for (Eigen::Index i = 0; i < 9; ++i) {
      if (truth.theta_k[i] == 0.0) continue;
      const double f = est.theta_k[i] / truth.theta_k[i];
      CHECK(f >= 0.5);
      CHECK(f <= 2.0);
    }
  }
  s.sim.seed = 1;
  const VecX a = initial_estimate(s).theta_k;
  s.sim.seed = 2;
  CHECK(initial_estimate(s).theta_k != a);
}

TEST_CASE("files") {
  const auto dir = std::filesystem::temp_directory_path() / "nsvs_scenario_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream(dir / "ok.json") << minimal().dump();
    std::ofstream(dir / "broken.json") << "{\"robot\": ";
  }
  CHECK(parse_scenario(dir / "ok.json").robot.dof() == 6);
  CHECK_THROWS_AS(parse_scenario(dir / "broken.json"), ValidationError);
  CHECK_THROWS_AS(parse_scenario(dir / "missing.json"), ValidationError);
  CHECK(load_scenario("task2").name == "task2");
  std::filesystem::remove_all(dir);
}

TEST_CASE("presets validate") {
  CHECK_NOTHROW(validate_scenario(task1_preset()));
  CHECK_NOTHROW(validate_scenario(task2_preset()));
  const Scenario t2 = task2_preset();
  CHECK(t2.gains.kp == Vec2(5, 5));
  CHECK(t2.gains.cd == 0.5);
  const auto& c = std::get<CircleTarget>(t2.target);
  CHECK(c.radius == 100.0);
  CHECK(c.rate == std::numbers::pi / 15.0);
}

}
