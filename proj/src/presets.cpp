// Canned scenarios for the bar and material-point figures.

#include <cmath>

#include "lipfield/errors.hpp"
#include "lipfield/scenario.hpp"

namespace lipfield {

using nlohmann::json;

namespace {

json elastic_h2(double lambda) {
  return {{"kind", "softening_elasticity"},
          {"E", 1.0},
          {"Yc", 1.0},
          {"softening", {{"kind", "h2"}, {"lambda", lambda}}}};
}

json softening_plasticity() {
  return {{"kind", "softening_plasticity"}, {"E", 1.0}, {"sigma_y", 1.0 / 16.0}, {"k", 4.0}};
}

json regularization(double l) {
  return l > 0.0 ? json{{"enabled", true}, {"length", l}} : json{{"enabled", false}};
}

json imposed(double peak, int steps, double body_force = 0.0) {
  return {{"kind", "imposed_displacement"},
          {"peaks", {peak}},
          {"steps_per_segment", {steps}},
          {"body_force_amplitude", body_force}};
}

json snapback(double increment, int max_steps) {
  return {{"kind", "snapback"}, {"strain_increment", increment}, {"max_steps", max_steps}};
}

json bar(const std::string& name, json model, int n, double l, json load,
         std::vector<int> snapshots) {
  return {{"name", name},
          {"model", std::move(model)},
          {"mesh", {{"L", 1.0}, {"N", n}}},
          {"regularization", regularization(l)},
          {"load", std::move(load)},
          {"output", {{"snapshot_steps", std::move(snapshots)}}}};
}

json elastic_coh(const std::string& name, double l, int n) {
  // Gc = 2 fixed, so lambda = 2 Yc l / Gc = l.
  json model = {{"kind", "softening_elasticity"},
                {"E", 1.0},
                {"Yc", 1.0},
                {"softening", {{"kind", "h2"}, {"toughness", 2.0}}}};
  return bar(name, model, n, l, snapback(0.4, 20000), {});
}

json combined_point(const std::string& name, double ratio) {
  // E = sigma_y = 1 gives eps_y = 1, so eps_c = sqrt(2 Yc) = ratio.
  const double yc = ratio * ratio / 2.0;
  return {{"name", name},
          {"model",
           {{"kind", "softening_elasto_hardening_plasticity"},
            {"E", 1.0},
            {"Yc", yc},
            {"sigma_y", 1.0},
            {"k", 1.0},
            {"softening", {{"kind", "h1"}}}}},
          {"history",
           {{"unit", "eps_y"}, {"targets", {2.0, "e", 4.0, "e", 5.0, "e"}}, {"substeps", 200}}}};
}

}  // namespace

std::vector<std::string> bar_preset_names() {
  return {"elas_soft_l05",     "elas_soft_l05_local",  "elas_soft_snap",
          "elas_soft_snap_local", "elas_soft_coh_l04", "elas_soft_coh_l02",
          "elas_soft_coh_l01", "plas_comb",            "plas_soft",
          "plas_soft_extforce", "plas_soft_extforce_local"};
}

std::vector<std::string> pointwise_preset_names() {
  return {"soft_elas", "soft_plas", "soft_comb_r0707", "soft_comb_r1", "soft_comb_r2"};
}

json bar_preset(const std::string& name) {
  const std::vector<int> l05_marks = {60, 80, 100, 150, 200, 250};
  const std::vector<int> plas_marks = {40, 60, 80, 100, 150, 200};
  if (name == "elas_soft_l05") {
    return bar(name, elastic_h2(0.3), 128, 0.5, imposed(5.0, 250), l05_marks);
  }
  if (name == "elas_soft_l05_local") {
    return bar(name, elastic_h2(0.3), 128, 0.0, imposed(5.0, 250), l05_marks);
  }
  if (name == "elas_soft_snap") {
    return bar(name, elastic_h2(0.3), 201, 0.1, snapback(0.2, 20000), {100, 300, 600, 900});
  }
  if (name == "elas_soft_snap_local") {
    return bar(name, elastic_h2(0.3), 201, 0.0, snapback(0.2, 20000), {50, 100, 150});
  }
  if (name == "elas_soft_coh_l04") return elastic_coh(name, 0.4, 51);
  if (name == "elas_soft_coh_l02") return elastic_coh(name, 0.2, 101);
  if (name == "elas_soft_coh_l01") return elastic_coh(name, 0.1, 201);
  if (name == "plas_comb") {
    json model = {{"kind", "softening_elasto_hardening_plasticity"},
                  {"E", 2.0},
                  {"Yc", 1.0},
                  {"sigma_y", 1.0},
                  {"k", 1.0},
                  {"softening", {{"kind", "h2"}, {"lambda", 1.0 / 3.0}}}};
    return bar(name, model, 64, 0.5, imposed(4.0, 200), plas_marks);
  }
  if (name == "plas_soft") {
    return bar(name, softening_plasticity(), 64, 0.5, imposed(0.5, 200), plas_marks);
  }
  if (name == "plas_soft_extforce" || name == "plas_soft_extforce_local") {
    const double l = name == "plas_soft_extforce" ? 0.25 : 0.0;
    return bar(name, softening_plasticity(), 255, l, imposed(0.3, 150, 0.1),
               {10, 20, 30, 40, 60, 90, 150});
  }
  throw ConfigError("unknown bar preset '" + name + "'");
}

json pointwise_preset(const std::string& name) {
  if (name == "soft_elas") {
    return {{"name", name},
            {"model",
             {{"kind", "softening_elasticity"},
              {"E", 1.0},
              {"Yc", 1.0},
              {"softening", {{"kind", "h1"}}}}},
            {"history", {{"unit", "eps_c"}, {"targets", {2.0, 0.0, 4.0}}, {"substeps", 200}}}};
  }
  if (name == "soft_plas") {
    return {{"name", name},
            {"model",
             {{"kind", "softening_plasticity"}, {"E", 1.0}, {"sigma_y", 1.0}, {"k", 4.0}}},
            {"history", {{"unit", "eps_y"}, {"targets", {1.5, "e", 5.0}}, {"substeps", 200}}}};
  }
  if (name == "soft_comb_r0707") return combined_point(name, 1.0 / std::sqrt(2.0));
  if (name == "soft_comb_r1") return combined_point(name, 1.0);
  if (name == "soft_comb_r2") return combined_point(name, 2.0);
  throw ConfigError("unknown pointwise preset '" + name + "'");
}

}  // namespace lipfield
