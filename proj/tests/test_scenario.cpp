#include <sstream>

#include <doctest.h>

#include "lipfield/errors.hpp"
#include "lipfield/scenario.hpp"

using namespace lipfield;
using nlohmann::json;

namespace {

json small_bar() {
  return json::parse(R"({
    "name": "small",
    "model": {"kind": "softening_elasticity", "E": 1.0, "Yc": 1.0,
              "softening": {"kind": "h2", "lambda": 0.3}},
    "mesh": {"L": 1.0, "N": 16},
    "regularization": {"enabled": true, "length": 0.25},
    "load": {"kind": "imposed_displacement", "peaks": [2.0], "steps_per_segment": 40},
    "output": {"snapshot_steps": [20, 40]}
  })");
}

std::string error_of(const json& j) {
  try {
    scenario_from_json(j);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("every preset resolves and round-trips") {
  for (const auto& name : bar_preset_names()) {
    CAPTURE(name);
    const ScenarioConfig c = scenario_from_json(bar_preset(name));
    const json once = to_json(c);
    CHECK(to_json(scenario_from_json(once)) == once);
    CHECK(c.problem().mesh.element_count() == c.element_count);
  }
  for (const auto& name : pointwise_preset_names()) {
    CAPTURE(name);
    const json once = to_json(pointwise_from_json(pointwise_preset(name)));
    CHECK(to_json(pointwise_from_json(once)) == once);
  }
  CHECK_THROWS_AS(load_config_source("preset:nope"), ConfigError);
  CHECK_THROWS_AS(load_config_source("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("toughness sets lambda through the regularization length") {
  json j = small_bar();
  j["model"]["softening"] = {{"kind", "h2"}, {"toughness", 2.0}};
  CHECK(scenario_from_json(j).model.softening.lambda == doctest::Approx(0.25));
  j["regularization"] = {{"enabled", false}};
  CHECK(error_of(j).find("toughness") != std::string::npos);
}

TEST_CASE("schema errors name the offending key") {
  json j = small_bar();
  j["mesh"]["M"] = 3;
  CHECK(error_of(j).find("mesh.M") != std::string::npos);

  j = small_bar();
  j["mesh"]["N"] = "sixteen";
  CHECK(error_of(j).find("mesh.N") != std::string::npos);

  j = small_bar();
  j["mesh"]["N"] = 0;
  CHECK(error_of(j).find("mesh.N") != std::string::npos);

  j = small_bar();
  j["model"]["softening"]["lambda"] = 0.7;
  CHECK_FALSE(error_of(j).empty());

  j = small_bar();
  j["model"]["kind"] = "rubber";
  CHECK(error_of(j).find("model.kind") != std::string::npos);

  j = small_bar();
  j.erase("load");
  CHECK(error_of(j).find("load") != std::string::npos);

  j = small_bar();
  j["load"]["steps_per_segment"] = -1;
  CHECK_FALSE(error_of(j).empty());
}

TEST_CASE("overrides") {
  json j = small_bar();
  apply_override(j, "mesh.N=32");
  apply_override(j, "name=renamed");
  apply_override(j, "load.peaks=[1.0,0.5]");
  const ScenarioConfig c = scenario_from_json(j);
  CHECK(c.element_count == 32);
  CHECK(c.name == "renamed");
  CHECK(c.load.peaks == std::vector<double>{1.0, 0.5});
  CHECK_THROWS_AS(apply_override(j, "no_equals_sign"), ConfigError);
}

TEST_CASE("pointwise history units") {
  json j = pointwise_preset("soft_elas");
  const PointwiseConfig c = pointwise_from_json(j);
  REQUIRE(c.targets.size() == 3);
  CHECK(*c.targets[0] == doctest::Approx(2.0 * std::sqrt(2.0)));
  j["model"] = {{"kind", "softening_plasticity"}, {"E", 1.0}, {"sigma_y", 1.0}, {"k", 1.0}};
  CHECK_THROWS_AS(pointwise_from_json(j), ConfigError);
  j = pointwise_preset("soft_plas");
  j["history"]["targets"] = {1.0, "x"};
  CHECK_THROWS_AS(pointwise_from_json(j), ConfigError);
}

TEST_CASE("CSV output is deterministic") {
  const ScenarioConfig c = scenario_from_json(small_bar());
  auto render = [&] {
    const RunResult r = run_scenario(c.problem());
    std::ostringstream curve, profile;
    write_curve_csv(curve, r);
    write_profile_csv(profile, c.problem().mesh, r);
    return curve.str() + profile.str();
  };
  const std::string a = render();
  CHECK(a == render());
  CHECK(a.rfind("step,", 0) == 0);
  CHECK(format_number(-0.0) == "0");
  CHECK(format_number(0.1) == "0.10000000000000001");

  const auto pts = run_material_point(c.model, std::vector<StrainTarget>{2.0}, 10);
  std::ostringstream p;
  write_pointwise_csv(p, pts);
  CHECK(p.str().rfind("step,strain,stress,d,eps_p,p\n", 0) == 0);
}
