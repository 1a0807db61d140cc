#include "lipfield/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include "lipfield/errors.hpp"

namespace lipfield {

using nlohmann::json;

namespace {

// Walks one JSON object, remembers which keys were consumed and rejects the rest.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    if (!j_.contains(key)) throw ConfigError(at(key) + ": missing required key");
    return j_.at(key);
  }

  double number(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_number()) throw ConfigError(at(key) + ": expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(at(key) + ": not finite");
    return x;
  }
  double number(const std::string& key, double fallback) {
    return has(key) ? number(key) : (seen_.insert(key), fallback);
  }

  int integer(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_number_integer()) throw ConfigError(at(key) + ": expected an integer");
    return v.get<int>();
  }
  int integer(const std::string& key, int fallback) {
    return has(key) ? integer(key) : (seen_.insert(key), fallback);
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_boolean()) throw ConfigError(at(key) + ": expected true or false");
    return v.get<bool>();
  }

  std::string string(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_string()) throw ConfigError(at(key) + ": expected a string");
    return v.get<std::string>();
  }
  std::string string(const std::string& key, const std::string& fallback) {
    return has(key) ? string(key) : fallback;
  }

  std::vector<double> numbers(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_array()) throw ConfigError(at(key) + ": expected an array of numbers");
    std::vector<double> out;
    for (const auto& x : v) {
      if (!x.is_number()) throw ConfigError(at(key) + ": expected an array of numbers");
      out.push_back(x.get<double>());
    }
    return out;
  }

  std::vector<int> integers(const std::string& key) {
    const json& v = raw(key);
    if (v.is_number_integer()) return {v.get<int>()};
    if (!v.is_array()) throw ConfigError(at(key) + ": expected an integer or an array");
    std::vector<int> out;
    for (const auto& x : v) {
      if (!x.is_number_integer()) throw ConfigError(at(key) + ": expected integers");
      out.push_back(x.get<int>());
    }
    return out;
  }

  ObjectReader child(const std::string& key) { return ObjectReader(raw(key), at(key)); }

  std::string at(const std::string& key) const { return path_ + "." + key; }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) throw ConfigError(at(key) + ": unknown key");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

// Runs `fn` and re-labels library validation errors as configuration errors.
template <class Fn>
auto checked(const std::string& where, Fn&& fn) {
  try {
    return fn();
  } catch (const InvalidArgument& e) {
    throw ConfigError(where + ": " + e.what());
  } catch (const DomainError& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

const char* model_kind_name(ModelKind k) {
  switch (k) {
    case ModelKind::SofteningElasticity: return "softening_elasticity";
    case ModelKind::SofteningElastoHardeningPlasticity:
      return "softening_elasto_hardening_plasticity";
    case ModelKind::SofteningPlasticity: return "softening_plasticity";
  }
  return "";
}

SofteningFunction softening_from_json(ObjectReader r, double yc, double length) {
  const std::string kind = r.string("kind");
  SofteningFunction h;
  if (kind == "h1") {
    h = SofteningFunction::h1();
  } else if (kind == "h2") {
    if (r.has("lambda") == r.has("toughness")) {
      throw ConfigError(r.at("lambda") + ": give exactly one of lambda or toughness");
    }
    if (r.has("lambda")) {
      h = SofteningFunction::h2(r.number("lambda"));
    } else {
      const double gc = r.number("toughness");
      if (!(length > 0.0)) {
        throw ConfigError(r.at("toughness") + ": needs an enabled regularization length");
      }
      h = SofteningFunction::h2(
          checked(r.at("toughness"), [&] { return lambda_from_toughness(yc, length, gc); }));
    }
  } else {
    throw ConfigError(r.at("kind") + ": unknown softening '" + kind + "' (h1 or h2)");
  }
  r.finish();
  return h;
}

json solver_to_json(const SolverOptions& s) {
  return json{
      {"alternation_tol", s.alternation_tol},
      {"kkt_tol", s.kkt_tol},
      {"max_alternations", s.max_alternations},
      {"trigger", s.trigger},
      {"snapback_max_outer", s.snapback_max_outer},
      {"snapback_tol", s.snapback_tol},
      {"snapback_acceleration", s.snapback_acceleration},
      {"equilibrium",
       {{"correction_tol", s.equilibrium.correction_tol},
        {"residual_tol", s.equilibrium.residual_tol},
        {"max_iterations", s.equilibrium.max_iterations},
        {"max_line_search_cuts", s.equilibrium.max_line_search_cuts}}},
      {"damage",
       {{"bound_tol", s.damage.bound_tol},
        {"xtol", s.damage.xtol},
        {"max_root_iterations", s.damage.max_root_iterations},
        {"max_iterations", s.damage.max_iterations}}},
  };
}

SolverOptions solver_from_json(const json* j, const std::string& path) {
  SolverOptions s;
  if (!j) return s;
  ObjectReader r(*j, path);
  auto positive = [&](const std::string& key, double v) {
    if (!(v > 0.0)) throw ConfigError(r.at(key) + ": must be positive");
    return v;
  };
  auto at_least = [&](const std::string& key, int v, int lo) {
    if (v < lo) throw ConfigError(r.at(key) + ": must be >= " + std::to_string(lo));
    return v;
  };
  s.alternation_tol = positive("alternation_tol", r.number("alternation_tol", s.alternation_tol));
  s.kkt_tol = positive("kkt_tol", r.number("kkt_tol", s.kkt_tol));
  s.max_alternations =
      at_least("max_alternations", r.integer("max_alternations", s.max_alternations), 1);
  s.trigger = r.number("trigger", s.trigger);
  if (s.trigger < 0.0) throw ConfigError(r.at("trigger") + ": must be >= 0");
  s.snapback_max_outer =
      at_least("snapback_max_outer", r.integer("snapback_max_outer", s.snapback_max_outer), 2);
  s.snapback_tol = positive("snapback_tol", r.number("snapback_tol", s.snapback_tol));
  s.snapback_acceleration = at_least(
      "snapback_acceleration", r.integer("snapback_acceleration", s.snapback_acceleration), 0);
  if (r.has("equilibrium")) {
    ObjectReader e = r.child("equilibrium");
    auto& q = s.equilibrium;
    q.correction_tol = e.number("correction_tol", q.correction_tol);
    q.residual_tol = e.number("residual_tol", q.residual_tol);
    q.max_iterations = e.integer("max_iterations", q.max_iterations);
    q.max_line_search_cuts = e.integer("max_line_search_cuts", q.max_line_search_cuts);
    if (!(q.correction_tol > 0.0 && q.residual_tol > 0.0) || q.max_iterations < 1 ||
        q.max_line_search_cuts < 0) {
      throw ConfigError(r.at("equilibrium") + ": tolerances must be positive, caps >= 1");
    }
    e.finish();
  }
  if (r.has("damage")) {
    ObjectReader d = r.child("damage");
    auto& q = s.damage;
    q.bound_tol = d.number("bound_tol", q.bound_tol);
    q.xtol = d.number("xtol", q.xtol);
    q.max_root_iterations = d.integer("max_root_iterations", q.max_root_iterations);
    q.max_iterations = d.integer("max_iterations", q.max_iterations);
    if (!(q.bound_tol > 0.0 && q.xtol > 0.0) || q.max_root_iterations < 1 ||
        q.max_iterations < 1) {
      throw ConfigError(r.at("damage") + ": tolerances must be positive, caps >= 1");
    }
    d.finish();
  }
  r.finish();
  return s;
}

}  // namespace

json model_to_json(const MaterialModel& m) {
  json j{{"kind", model_kind_name(m.kind)}, {"E", m.E}};
  if (m.kind != ModelKind::SofteningPlasticity) {
    j["Yc"] = m.Yc;
    j["softening"] = m.softening.kind == SofteningKind::H2
                         ? json{{"kind", "h2"}, {"lambda", m.softening.lambda}}
                         : json{{"kind", "h1"}};
  }
  if (m.has_plasticity()) {
    j["sigma_y"] = m.sigma_y;
    j["k"] = m.k;
  }
  return j;
}

MaterialModel model_from_json(const json& j, double length, const std::string& where) {
  ObjectReader r(j, where);
  const std::string kind = r.string("kind");
  MaterialModel m;
  // The factories validate, so their errors are relabeled here too.
  checked(where, [&] {
    if (kind == "softening_elasticity") {
      const double e = r.number("E"), yc = r.number("Yc");
      m = MaterialModel::softening_elasticity(e, yc, softening_from_json(r.child("softening"), yc,
                                                                         length));
    } else if (kind == "softening_elasto_hardening_plasticity") {
      const double e = r.number("E"), yc = r.number("Yc");
      const double sy = r.number("sigma_y"), k = r.number("k");
      m = MaterialModel::softening_elasto_hardening_plasticity(
          e, sy, k, yc, softening_from_json(r.child("softening"), yc, length));
    } else if (kind == "softening_plasticity") {
      m = MaterialModel::softening_plasticity(r.number("E"), r.number("sigma_y"), r.number("k"));
    } else {
      throw ConfigError(r.at("kind") + ": unknown model '" + kind + "'");
    }
    return 0;
  });
  r.finish();
  return m;
}

BarProblem ScenarioConfig::problem() const {
  BarProblem p;
  p.mesh = build_uniform_mesh(bar_length, element_count);
  p.model = model;
  p.length = length;
  p.load = load;
  p.solver = solver;
  p.snapshot_steps = snapshot_steps;
  return p;
}

ScenarioConfig scenario_from_json(const json& j) {
  ObjectReader r(j, "$");
  ScenarioConfig c;
  c.name = r.string("name", c.name);
  if (c.name.empty() || c.name.find_first_of("/\\") != std::string::npos) {
    throw ConfigError("$.name: must be a non-empty file-name-safe string");
  }

  ObjectReader mesh = r.child("mesh");
  c.bar_length = mesh.number("L");
  c.element_count = mesh.integer("N");
  mesh.finish();
  checked(mesh.at("N"), [&] { return build_uniform_mesh(c.bar_length, c.element_count); });

  if (r.has("regularization")) {
    ObjectReader reg = r.child("regularization");
    if (reg.boolean("enabled", true)) {
      c.length = reg.number("length");
      if (!(c.length > 0.0)) throw ConfigError(reg.at("length") + ": must be positive");
    } else if (reg.has("length")) {
      throw ConfigError(reg.at("length") + ": not allowed when regularization is disabled");
    }
    reg.finish();
  }

  c.model = model_from_json(r.raw("model"), c.length, "$.model");

  ObjectReader load = r.child("load");
  const std::string kind = load.string("kind");
  if (kind == "imposed_displacement") {
    c.load.kind = LoadProgram::Kind::ImposedDisplacement;
    c.load.peaks = load.numbers("peaks");
    c.load.steps_per_segment = load.integers("steps_per_segment");
  } else if (kind == "snapback") {
    c.load.kind = LoadProgram::Kind::SnapBackControlled;
    c.load.strain_increment = load.number("strain_increment");
    c.load.max_steps = load.integer("max_steps");
    c.load.stop_stress_ratio = load.number("stop_stress_ratio", c.load.stop_stress_ratio);
  } else {
    throw ConfigError(load.at("kind") + ": unknown load kind '" + kind +
                      "' (imposed_displacement or snapback)");
  }
  c.load.body_force_amplitude = load.number("body_force_amplitude", 0.0);
  load.finish();
  checked("$.load", [&] {
    c.load.validate();
    return 0;
  });

  if (r.has("output")) {
    ObjectReader out = r.child("output");
    if (out.has("snapshot_steps")) c.snapshot_steps = out.integers("snapshot_steps");
    out.finish();
    for (int s : c.snapshot_steps) {
      if (s < 0) throw ConfigError("$.output.snapshot_steps: steps must be >= 0");
    }
  }

  c.solver = solver_from_json(r.has("solver") ? &r.raw("solver") : nullptr, "$.solver");
  r.finish();
  return c;
}

json to_json(const ScenarioConfig& c) {
  json load;
  if (c.load.kind == LoadProgram::Kind::ImposedDisplacement) {
    load = {{"kind", "imposed_displacement"},
            {"peaks", c.load.peaks},
            {"steps_per_segment", c.load.steps_per_segment}};
  } else {
    load = {{"kind", "snapback"},
            {"strain_increment", c.load.strain_increment},
            {"max_steps", c.load.max_steps},
            {"stop_stress_ratio", c.load.stop_stress_ratio}};
  }
  load["body_force_amplitude"] = c.load.body_force_amplitude;
  return json{
      {"name", c.name},
      {"model", model_to_json(c.model)},
      {"mesh", {{"L", c.bar_length}, {"N", c.element_count}}},
      {"regularization", c.length > 0.0 ? json{{"enabled", true}, {"length", c.length}}
                                        : json{{"enabled", false}}},
      {"load", load},
      {"output", {{"snapshot_steps", c.snapshot_steps}}},
      {"solver", solver_to_json(c.solver)},
  };
}

PointwiseConfig pointwise_from_json(const json& j) {
  ObjectReader r(j, "$");
  PointwiseConfig c;
  c.name = r.string("name", c.name);
  c.model = model_from_json(r.raw("model"), 0.0, "$.model");

  ObjectReader hist = r.child("history");
  const std::string unit = hist.string("unit", "strain");
  double scale = 1.0;
  if (unit == "eps_c") {
    if (c.model.kind == ModelKind::SofteningPlasticity) {
      throw ConfigError(hist.at("unit") + ": eps_c needs a model with Yc");
    }
    scale = std::sqrt(2.0 * c.model.Yc / c.model.E);
  } else if (unit == "eps_y") {
    if (!c.model.has_plasticity()) {
      throw ConfigError(hist.at("unit") + ": eps_y needs a plasticity model");
    }
    scale = c.model.sigma_y / c.model.E;
  } else if (unit != "strain") {
    throw ConfigError(hist.at("unit") + ": unknown unit '" + unit + "' (strain, eps_c, eps_y)");
  }
  const json& targets = hist.raw("targets");
  if (!targets.is_array() || targets.empty()) {
    throw ConfigError(hist.at("targets") + ": expected a non-empty array");
  }
  for (const auto& t : targets) {
    if (t.is_null() || (t.is_string() && t.get<std::string>() == "e")) {
      c.targets.push_back(std::nullopt);
    } else if (t.is_number()) {
      c.targets.push_back(t.get<double>() * scale);
    } else {
      throw ConfigError(hist.at("targets") + ": entries are numbers, null or \"e\"");
    }
  }
  c.substeps = hist.integer("substeps", c.substeps);
  if (c.substeps < 1) throw ConfigError(hist.at("substeps") + ": must be >= 1");
  hist.finish();
  c.solver = solver_from_json(r.has("solver") ? &r.raw("solver") : nullptr, "$.solver");
  r.finish();
  return c;
}

json to_json(const PointwiseConfig& c) {
  json targets = json::array();
  for (const auto& t : c.targets) targets.push_back(t ? json(*t) : json(nullptr));
  return json{
      {"name", c.name},
      {"model", model_to_json(c.model)},
      {"history", {{"unit", "strain"}, {"targets", targets}, {"substeps", c.substeps}}},
      {"solver", solver_to_json(c.solver)},
  };
}

void apply_override(json& j, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override '" + assignment + "' is not of the form path=value");
  }
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;

  json* node = &j;
  std::size_t start = 0;
  for (;;) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? dot : dot - start);
    if (key.empty()) throw ConfigError("override '" + assignment + "' has an empty path segment");
    if (!node->is_object()) throw ConfigError("override '" + assignment + "' crosses a non-object");
    if (dot == std::string::npos) {
      (*node)[key] = value;
      return;
    }
    node = &(*node)[key];
    if (node->is_null()) *node = json::object();
    start = dot + 1;
  }
}

json load_config_source(const std::string& source) {
  static const std::string prefix = "preset:";
  if (source.rfind(prefix, 0) == 0) {
    const std::string name = source.substr(prefix.size());
    for (const auto& n : bar_preset_names()) {
      if (n == name) return bar_preset(name);
    }
    for (const auto& n : pointwise_preset_names()) {
      if (n == name) return pointwise_preset(name);
    }
    throw ConfigError("unknown preset '" + name + "'");
  }
  std::ifstream in(source);
  if (!in) throw ConfigError("cannot open config '" + source + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(source + ": " + e.what());
  }
}

std::string format_number(double v) {
  if (v == 0.0) v = 0.0;  // drops the sign of -0
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_curve_csv(std::ostream& out, const RunResult& result) {
  out << "step,u_d,mean_strain,mean_stress,alt_iters,free_elements,work_increment\n";
  for (const auto& r : result.records) {
    out << r.step << ',' << format_number(r.load) << ',' << format_number(r.mean_strain) << ','
        << format_number(r.mean_stress) << ',' << r.alternations << ',' << r.free_elements << ','
        << format_number(r.work_increment) << '\n';
  }
}

void write_profile_csv(std::ostream& out, const Mesh1D& mesh, const RunResult& result) {
  out << "step,element_index,x_centroid,strain,eps_p,p,d\n";
  const auto xs = mesh.centroids();
  for (const auto& s : result.snapshots) {
    for (int e = 0; e < mesh.element_count(); ++e) {
      out << s.step << ',' << e << ',' << format_number(xs[e]) << ','
          << format_number(s.strain[e]) << ',' << format_number(s.plastic_strain[e]) << ','
          << format_number(s.cumulative_plastic[e]) << ',' << format_number(s.damage[e]) << '\n';
    }
  }
}

void write_pointwise_csv(std::ostream& out, const std::vector<PointRecord>& records) {
  out << "step,strain,stress,d,eps_p,p\n";
  for (const auto& r : records) {
    out << r.step << ',' << format_number(r.strain) << ',' << format_number(r.stress) << ','
        << format_number(r.damage) << ',' << format_number(r.plastic_strain) << ','
        << format_number(r.cumulative_plastic) << '\n';
  }
}

}  // namespace lipfield
