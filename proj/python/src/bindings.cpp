// Python extension. Configs and structured results cross the boundary as JSON
// text; the pure-Python wrapper turns them into dicts and numpy arrays.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "lipfield/checks.hpp"
#include "lipfield/damage_update.hpp"
#include "lipfield/driver.hpp"
#include "lipfield/errors.hpp"
#include "lipfield/lipschitz.hpp"
#include "lipfield/materials.hpp"
#include "lipfield/scenario.hpp"

namespace py = pybind11;
using nlohmann::json;
using namespace lipfield;

namespace {

py::array_t<double> to_array(const std::vector<double>& v) {
  return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
}

json records_json(const std::vector<StepRecord>& records) {
  json cols = {{"step", json::array()},         {"load", json::array()},
               {"mean_strain", json::array()},  {"mean_stress", json::array()},
               {"alternations", json::array()}, {"free_elements", json::array()},
               {"kkt_violation", json::array()}, {"max_damage", json::array()}};
  for (const auto& r : records) {
    cols["step"].push_back(r.step);
    cols["load"].push_back(r.load);
    cols["mean_strain"].push_back(r.mean_strain);
    cols["mean_stress"].push_back(r.mean_stress);
    cols["alternations"].push_back(r.alternations);
    cols["free_elements"].push_back(r.free_elements);
    cols["kkt_violation"].push_back(r.kkt_violation);
    cols["max_damage"].push_back(r.max_damage);
  }
  return cols;
}

std::string run_bar(const std::string& config_text) {
  const ScenarioConfig c = scenario_from_json(json::parse(config_text));
  const BarProblem p = c.problem();
  const RunResult r = run_scenario(p);
  json snaps = json::array();
  for (const auto& s : r.snapshots) {
    snaps.push_back({{"step", s.step},
                     {"strain", s.strain},
                     {"plastic_strain", s.plastic_strain},
                     {"cumulative_plastic", s.cumulative_plastic},
                     {"damage", s.damage}});
  }
  const auto centroids = p.mesh.centroids();
  return json{{"resolved_config", to_json(c)},
              {"curve", records_json(r.records)},
              {"snapshots", snaps},
              {"centroids", std::vector<double>(centroids.begin(), centroids.end())},
              {"final_damage", r.final_state.damage},
              {"peak_stress", r.peak_stress},
              {"external_work", external_work(r.records, p.mesh.length())},
              {"total_alternations", r.total_alternations},
              {"max_kkt_violation", r.max_kkt_violation},
              {"lipschitz_feasible", r.lipschitz_feasible},
              {"irreversible", r.irreversible}}
      .dump();
}

std::string run_pointwise(const std::string& config_text) {
  const PointwiseConfig c = pointwise_from_json(json::parse(config_text));
  const auto records = run_material_point(c.model, c.targets, c.substeps, c.solver);
  json cols = {{"step", json::array()},          {"strain", json::array()},
               {"stress", json::array()},        {"damage", json::array()},
               {"plastic_strain", json::array()}, {"cumulative_plastic", json::array()},
               {"kkt_violation", json::array()}};
  for (const auto& r : records) {
    cols["step"].push_back(r.step);
    cols["strain"].push_back(r.strain);
    cols["stress"].push_back(r.stress);
    cols["damage"].push_back(r.damage);
    cols["plastic_strain"].push_back(r.plastic_strain);
    cols["cumulative_plastic"].push_back(r.cumulative_plastic);
    cols["kkt_violation"].push_back(r.kkt_violation);
  }
  return json{{"resolved_config", to_json(c)}, {"curve", cols}}.dump();
}

MaterialModel parse_model(const std::string& model_text, double length) {
  return model_from_json(json::parse(model_text), length, "model");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Lip-field softening bar solver";

  auto base = py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);
  py::register_exception<NonConvergence>(m, "NonConvergence", PyExc_RuntimeError);
  py::register_exception<SingularSystem>(m, "SingularSystem", PyExc_RuntimeError);
  py::register_exception<StepFailure>(m, "StepFailure", PyExc_RuntimeError);
  (void)base;

  m.def("run_bar_json", &run_bar, py::arg("config"), py::call_guard<py::gil_scoped_release>());
  m.def("run_pointwise_json", &run_pointwise, py::arg("config"),
        py::call_guard<py::gil_scoped_release>());
  m.def("bar_preset_names", &bar_preset_names);
  m.def("pointwise_preset_names", &pointwise_preset_names);
  m.def("preset_json", [](const std::string& name) {
    return load_config_source("preset:" + name).dump();
  });
  m.def("resolve_bar_json", [](const std::string& text) {
    return to_json(scenario_from_json(json::parse(text))).dump();
  });
  m.def("resolve_pointwise_json", [](const std::string& text) {
    return to_json(pointwise_from_json(json::parse(text))).dump();
  });

  m.def("lip_constant", [](const std::vector<double>& d, double length) {
    return lip_constant(Mesh1D(length, static_cast<int>(d.size())), d);
  }, py::arg("d"), py::arg("bar_length") = 1.0);
  m.def("is_lip", [](const std::vector<double>& d, double l, double length, double tol) {
    return is_lip(Mesh1D(length, static_cast<int>(d.size())), d, l, tol);
  }, py::arg("d"), py::arg("l"), py::arg("bar_length") = 1.0, py::arg("tol") = 0.0);
  m.def("lower_projection", [](const std::vector<double>& d, double l, double length) {
    return to_array(lower_projection(Mesh1D(length, static_cast<int>(d.size())), d, l));
  }, py::arg("d"), py::arg("l"), py::arg("bar_length") = 1.0);
  m.def("upper_projection", [](const std::vector<double>& d, double l, double length) {
    return to_array(upper_projection(Mesh1D(length, static_cast<int>(d.size())), d, l));
  }, py::arg("d"), py::arg("l"), py::arg("bar_length") = 1.0);

  m.def("return_map", [](const std::string& model, double eps, double ep_n, double p_n, double d) {
    const ReturnMapResult r = return_map(parse_model(model, 0.0), eps, ep_n, p_n, d);
    py::dict out;
    out["plastic_strain"] = r.plastic_strain;
    out["cumulative_plastic"] = r.cumulative_plastic;
    out["stress"] = r.stress;
    out["tangent"] = r.tangent;
    out["plastic"] = r.plastic;
    return out;
  }, py::arg("model"), py::arg("strain"), py::arg("plastic_strain_n"),
     py::arg("cumulative_plastic_n"), py::arg("damage"));

  m.def("solve_damage",
        [](const std::string& model, std::vector<double> strain, std::vector<double> ep,
           std::vector<double> p, std::vector<double> d_n, double l, double length) {
          const int n = static_cast<int>(strain.size());
          DamageProblem prob{Mesh1D(length, n), parse_model(model, l), std::move(strain),
                             std::move(ep), std::move(p), std::move(d_n), l};
          const DamageSolution s = solve_damage(prob);
          py::dict out;
          out["d"] = to_array(s.d);
          out["trial"] = to_array(s.trial);
          out["lower"] = to_array(s.bounds.lower);
          out["upper"] = to_array(s.bounds.upper);
          out["objective"] = s.objective;
          out["kkt_residual"] = s.kkt_residual;
          out["free_count"] = s.free_count;
          out["iterations"] = s.iterations;
          return out;
        },
        py::arg("model"), py::arg("strain"), py::arg("plastic_strain"),
        py::arg("cumulative_plastic"), py::arg("d_n"), py::arg("l"), py::arg("bar_length") = 1.0);

  m.def("run_checks_json", [](std::uint64_t seed, bool quick) {
    checks::CheckOptions o;
    o.seed = seed;
    if (quick) {
      o.fields = o.problems = 40;
      o.oracle_problems = 8;
      o.points = 200;
    }
    return checks::report(o, checks::run_all(o)).dump();
  }, py::arg("seed") = 20240611, py::arg("quick") = true, py::call_guard<py::gil_scoped_release>());
}
