#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "nsvs/errors.hpp"
#include "nsvs/harness.hpp"
#include "nsvs/session.hpp"

namespace py = pybind11;
using namespace nsvs;
using nlohmann::json;

namespace {

// Scenarios cross the boundary as JSON text in the effective-config form.
Scenario scenario_arg(const std::string& text) { return scenario_from_json(json::parse(text)); }

py::dict run_dict(const RunResult& run) {
  const int dof = run.log.empty() ? 0 : static_cast<int>(run.log.front().q.size());
  const auto cols = telemetry_columns(dof);
  py::array_t<double> data({run.log.size(), cols.size()});
  auto view = data.mutable_unchecked<2>();
  for (std::size_t k = 0; k < run.log.size(); ++k) {
    const auto row = telemetry_row(run.log[k]);
    for (std::size_t c = 0; c < row.size(); ++c) view(k, c) = row[c];
  }
  py::dict out;
  out["columns"] = cols;
  out["data"] = data;
  out["summary"] = summary_to_json(run).dump();
  out["wall_seconds"] = run.wall_seconds;
  return out;
}

}  // namespace

PYBIND11_MODULE(_nsvs, m) {
  m.doc() = "Adaptive visual servoing simulator (native core)";

  static py::exception<ValidationError> validation_error(m, "ValidationError", PyExc_ValueError);
  static py::exception<ConfigError> config_error(m, "ConfigError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ValidationError& e) {
      PyErr_SetString(validation_error.ptr(), e.what());
    } catch (const ConfigError& e) {
      PyErr_SetString(config_error.ptr(), e.what());
    } catch (const json::exception& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });

  m.def("load_scenario", [](const std::string& name_or_path) {
    return scenario_to_json(load_scenario(name_or_path)).dump();
  });
  m.def("normalize_scenario", [](const std::string& text) {
    return scenario_to_json(scenario_arg(text)).dump();
  });

  m.def("run", [](const std::string& text, const py::object& intent) {
    const Scenario s = scenario_arg(text);
    RunResult run;
    if (!intent.is_none()) {
      run = run_scenario(s, [&](std::int64_t step, double t) { return intent(step, t).cast<VecX>(); });
    } else {
      py::gil_scoped_release release;
      run = run_scenario(s);
    }
    return run_dict(run);
  }, py::arg("scenario"), py::arg("intent") = py::none());

  m.def("compare_intent_off", [](const std::string& text) {
    const Scenario s = scenario_arg(text);
    py::gil_scoped_release release;
    const IntentComparison c = compare_intent_off(s);
    py::gil_scoped_acquire acquire;
    py::dict out;
    out["max_image_divergence"] = c.max_image_divergence;
    out["max_joint_divergence"] = c.max_joint_divergence;
    out["joint_divergence"] = c.joint_divergence;
    out["aborted"] = c.aborted;
    return out;
  });

  m.def("ablation", [](const std::string& text, int seeds, int jobs, std::uint64_t first_seed, double at) {
    const Scenario s = scenario_arg(text);
    AblationResult r;
    {
      py::gil_scoped_release release;
      r = ablation_sweep(s, seeds, jobs, first_seed, at);
    }
    py::list rows;
    for (const auto& row : r.rows) {
      rows.append(py::make_tuple(row.seed, row.adaptive_error, row.fixed_error, row.aborted));
    }
    return rows;
  }, py::arg("scenario"), py::arg("seeds"), py::arg("jobs") = 1, py::arg("first_seed") = 0,
     py::arg("at") = 2.0);

  m.def("forward_kinematics", [](const std::string& robot, const VecX& q) {
    return forward_kinematics(robot_preset(robot), q);
  });
  m.def("jacobian", [](const std::string& robot, const VecX& q) {
    return jacobian(robot_preset(robot), q);
  });
  m.def("pseudo_inverse", [](const MatX& J, double threshold) {
    const PseudoInverse p = pseudo_inverse(J, threshold);
    return py::make_tuple(p.pinv, p.damped);
  }, py::arg("J"), py::arg("damping_threshold") = 1e-6);
  m.def("null_projector", &null_projector);

  m.def("project", [](const Projection34& P, const Vec3& r) {
    CameraModel cam;
    cam.P = P;
    const Projection p = project(cam, r);
    return py::make_tuple(p.x, p.z);
  });
  m.def("image_jacobian", [](const Projection34& P, const Vec3& r) {
    CameraModel cam;
    cam.P = P;
    return true_image_jacobian(cam, r);
  });

  py::class_<SessionCore>(m, "SessionCore")
      .def(py::init([](const std::string& text, const std::string& session_id, int decimation, double ttl) {
             SessionConfig cfg;
             cfg.session_id = session_id;
             cfg.decimation = decimation;
             cfg.intent_ttl = ttl;
             return std::make_unique<SessionCore>(scenario_arg(text), cfg);
           }),
           py::arg("scenario"), py::arg("session_id") = "session", py::arg("decimation") = 1,
           py::arg("intent_ttl") = 0.5)
      .def("handle", [](SessionCore& s, const std::string& text) { return s.handle_text(text).dump(); })
      .def("tick", [](SessionCore& s) -> std::optional<std::string> {
        if (auto msg = s.tick()) return msg->dump();
        return std::nullopt;
      })
      .def("robot_description", [](const SessionCore& s) { return s.robot_description().dump(); })
      .def_property_readonly("time", &SessionCore::time)
      .def_property_readonly("step", &SessionCore::step)
      .def_property_readonly("paused", &SessionCore::paused);
}
