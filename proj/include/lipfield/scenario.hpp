#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "lipfield/driver.hpp"

namespace lipfield {

/// Declarative bar experiment. Every field is explicit once resolved.
struct ScenarioConfig {
  std::string name = "scenario";
  MaterialModel model;
  double bar_length = 1.0;
  int element_count = 1;
  double length = 0.0;  ///< regularization length, 0 when disabled
  LoadProgram load;
  SolverOptions solver;
  std::vector<int> snapshot_steps;

  BarProblem problem() const;
};

/// Single material point driven through a strain history.
struct PointwiseConfig {
  std::string name = "pointwise";
  MaterialModel model;
  std::vector<StrainTarget> targets;  ///< absolute strains; nullopt unloads to zero stress
  int substeps = 100;
  SolverOptions solver;
};

/**
 * Strict JSON reader: unknown keys, wrong types and out-of-range values raise
 * ConfigError naming the offending path. Missing optional keys take the
 * defaults that `to_json` writes back out.
 */
ScenarioConfig scenario_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ScenarioConfig& config);

PointwiseConfig pointwise_from_json(const nlohmann::json& j);
nlohmann::json to_json(const PointwiseConfig& config);

nlohmann::json model_to_json(const MaterialModel& model);
MaterialModel model_from_json(const nlohmann::json& j, double regularization_length,
                              const std::string& where = "model");

/// Applies "a.b.c=value" overrides (value parsed as JSON, or as a bare string).
void apply_override(nlohmann::json& j, const std::string& assignment);

/// Reads a file, or a canned preset when `source` is "preset:NAME".
nlohmann::json load_config_source(const std::string& source);

std::vector<std::string> bar_preset_names();
std::vector<std::string> pointwise_preset_names();
nlohmann::json bar_preset(const std::string& name);
nlohmann::json pointwise_preset(const std::string& name);

// CSV output: header row, 17 significant digits, '\n' line ends.
void write_curve_csv(std::ostream& out, const RunResult& result);
void write_profile_csv(std::ostream& out, const Mesh1D& mesh, const RunResult& result);
void write_pointwise_csv(std::ostream& out, const std::vector<PointRecord>& records);

/// Shortest-form-independent formatting used by every CSV writer.
std::string format_number(double v);

}  // namespace lipfield
