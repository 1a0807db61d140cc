// lipfield: command-line front end for the 1-D Lip-field bar solver.
//
// Exit codes: 0 success, 1 failed self-check, 2 configuration error,
// 3 solver failure (the step index is printed).

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "lipfield/checks.hpp"
#include "lipfield/errors.hpp"
#include "lipfield/scenario.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace lipfield;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;

json load_with_overrides(const std::string& source, const std::vector<std::string>& overrides) {
  json j = load_config_source(source);
  for (const auto& o : overrides) apply_override(j, o);
  return j;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
}

struct BarOutcome {
  std::string name;
  double peak = 0.0;
  double work = 0.0;
  bool failed_to_break = false;
  long alternations = 0;
  double kkt = 0.0;
  std::size_t steps = 0;
};

// Runs one resolved scenario and writes its three files into `dir`.
BarOutcome run_bar(const ScenarioConfig& config, const fs::path& dir) {
  const BarProblem problem = config.problem();
  const RunResult result = run_scenario(problem);

  std::ostringstream curve, profile;
  write_curve_csv(curve, result);
  write_profile_csv(profile, problem.mesh, result);
  fs::create_directories(dir);
  write_file(dir / "resolved_config.json", to_json(config).dump(2) + "\n");
  write_file(dir / "curve.csv", curve.str());
  write_file(dir / "profile.csv", profile.str());

  BarOutcome o;
  o.name = config.name;
  o.peak = result.peak_stress;
  o.work = external_work(result.records, problem.mesh.length());
  o.failed_to_break = std::abs(result.records.back().mean_stress) > 0.01 * result.peak_stress;
  o.alternations = result.total_alternations;
  o.kkt = result.max_kkt_violation;
  o.steps = result.records.size() - 1;
  return o;
}

void print_summary(const BarOutcome& o, const fs::path& dir) {
  std::cout << o.name << ": steps " << o.steps << ", peak stress " << format_number(o.peak)
            << ", " << (o.failed_to_break ? "external work (not broken) " : "dissipated energy ")
            << format_number(o.work) << ", alternations " << o.alternations << ", max KKT "
            << format_number(o.kkt) << "\n  wrote " << dir.string() << "\n";
}

int cmd_bar(const std::string& source, const std::vector<std::string>& overrides,
            const std::string& out_root) {
  ScenarioConfig config;
  try {
    config = scenario_from_json(load_with_overrides(source, overrides));
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  const fs::path dir = fs::path(out_root) / config.name;
  try {
    print_summary(run_bar(config, dir), dir);
  } catch (const StepFailure& e) {
    std::cerr << "solver failure at step " << e.step() << ": " << e.what() << "\n";
    return kExitSolver;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitOk;
}

int cmd_sweep(std::vector<std::string> sources, const std::vector<std::string>& overrides,
              const std::string& out_root) {
  // A source ending in ".list" holds one config source per line.
  std::vector<std::string> expanded;
  for (const auto& s : sources) {
    if (fs::path(s).extension() == ".list") {
      std::ifstream in(s);
      if (!in) {
        std::cerr << "config error: cannot open " << s << "\n";
        return kExitConfig;
      }
      for (std::string line; std::getline(in, line);) {
        line.erase(0, line.find_first_not_of(" \t"));
        line.erase(line.find_last_not_of(" \t\r") + 1);
        if (!line.empty() && line[0] != '#') expanded.push_back(line);
      }
    } else {
      expanded.push_back(s);
    }
  }

  std::vector<ScenarioConfig> configs;
  for (const auto& s : expanded) {
    try {
      configs.push_back(scenario_from_json(load_with_overrides(s, overrides)));
    } catch (const ConfigError& e) {
      std::cerr << "config error in " << s << ": " << e.what() << "\n";
      return kExitConfig;
    }
  }

  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("LIPFIELD_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1) threads = std::min<unsigned>(threads, static_cast<unsigned>(cap));
  }
  threads = std::min<unsigned>(threads, static_cast<unsigned>(configs.size()));

  std::vector<BarOutcome> outcomes(configs.size());
  std::vector<std::string> errors(configs.size());
  std::vector<int> codes(configs.size(), kExitOk);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < configs.size();) {
      try {
        outcomes[i] = run_bar(configs[i], fs::path(out_root) / configs[i].name);
      } catch (const StepFailure& e) {
        codes[i] = kExitSolver;
        errors[i] = "solver failure at step " + std::to_string(e.step()) + ": " + e.what();
      } catch (const std::exception& e) {
        codes[i] = kExitConfig;
        errors[i] = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  int code = kExitOk;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    if (codes[i] == kExitOk) {
      print_summary(outcomes[i], fs::path(out_root) / configs[i].name);
    } else {
      std::cerr << configs[i].name << ": " << errors[i] << "\n";
      code = std::max(code, codes[i]);
    }
  }
  return code;
}

struct PointwiseArgs {
  std::string preset;
  std::string config;
  std::string model = "softening_elasticity";
  double E = 1.0, Yc = 1.0, sigma_y = 1.0, k = 0.0;
  std::string softening = "h1";
  double lambda = 0.3;
  std::string peaks;
  std::string unit = "strain";
  int substeps = 100;
  std::string out;
};

json pointwise_json(const PointwiseArgs& a) {
  if (!a.preset.empty()) return load_config_source("preset:" + a.preset);
  if (!a.config.empty()) return load_config_source(a.config);
  if (a.peaks.empty()) throw ConfigError("--peaks is required without --preset or --config");
  json model{{"kind", a.model}, {"E", a.E}};
  if (a.model != "softening_plasticity") {
    model["Yc"] = a.Yc;
    model["softening"] = a.softening == "h2" ? json{{"kind", "h2"}, {"lambda", a.lambda}}
                                             : json{{"kind", a.softening}};
  }
  if (a.model != "softening_elasticity") {
    model["sigma_y"] = a.sigma_y;
    model["k"] = a.k;
  }
  json targets = json::array();
  std::stringstream ss(a.peaks);
  for (std::string item; std::getline(ss, item, ',');) {
    item.erase(0, item.find_first_not_of(' '));
    item.erase(item.find_last_not_of(' ') + 1);
    if (item == "e") {
      targets.push_back(nullptr);
      continue;
    }
    try {
      std::size_t used = 0;
      targets.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("--peaks entry '" + item + "' is neither a number nor 'e'");
    }
  }
  return {{"name", "pointwise"},
          {"model", model},
          {"history", {{"unit", a.unit}, {"targets", targets}, {"substeps", a.substeps}}}};
}

int cmd_pointwise(const PointwiseArgs& a, const std::vector<std::string>& overrides) {
  PointwiseConfig config;
  try {
    json j = pointwise_json(a);
    for (const auto& o : overrides) apply_override(j, o);
    config = pointwise_from_json(j);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  std::vector<PointRecord> records;
  try {
    records = run_material_point(config.model, config.targets, config.substeps, config.solver);
  } catch (const StepFailure& e) {
    std::cerr << "solver failure at step " << e.step() << ": " << e.what() << "\n";
    return kExitSolver;
  }
  std::ostringstream csv;
  write_pointwise_csv(csv, records);
  if (a.out.empty()) {
    std::cout << csv.str();
  } else {
    const fs::path dir(a.out);
    fs::create_directories(dir);
    write_file(dir / (config.name + ".csv"), csv.str());
    write_file(dir / (config.name + "_resolved_config.json"), to_json(config).dump(2) + "\n");
    std::cerr << "wrote " << (dir / (config.name + ".csv")).string() << "\n";
  }
  return kExitOk;
}

int cmd_check(std::uint64_t seed, const std::vector<int>& sizes, bool corrupt, bool quick) {
  checks::CheckOptions o;
  o.seed = seed;
  if (!sizes.empty()) o.sizes = sizes;
  for (int n : o.sizes) {
    if (n < 1) {
      std::cerr << "config error: sizes must be positive\n";
      return kExitConfig;
    }
  }
  o.corrupt = corrupt;
  if (quick) {
    o.fields = o.problems = 40;
    o.oracle_problems = 8;
    o.points = 200;
  }
  const auto results = checks::run_all(o);
  const json rep = checks::report(o, results);
  std::cout << rep.dump(2) << "\n";
  if (!rep["passed"].get<bool>()) {
    for (const auto& r : results) {
      if (!r.passed) {
        std::cerr << "FAILED " << r.name << " (worst " << r.worst << ", tolerance "
                  << r.tolerance << ")\n  counterexample: " << r.counterexample << "\n";
      }
    }
    return kExitCheckFailed;
  }
  return kExitOk;
}

int cmd_presets(const std::string& name) {
  if (name.empty()) {
    std::cout << "bar presets:\n";
    for (const auto& n : bar_preset_names()) std::cout << "  " << n << "\n";
    std::cout << "pointwise presets:\n";
    for (const auto& n : pointwise_preset_names()) std::cout << "  " << n << "\n";
    return kExitOk;
  }
  try {
    const json j = load_config_source("preset:" + name);
    const bool pointwise = j.contains("history");
    std::cout << (pointwise ? to_json(pointwise_from_json(j)) : to_json(scenario_from_json(j)))
                     .dump(2)
              << "\n";
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lip-field regularized softening bar solver"};
  app.require_subcommand(1);
  std::vector<std::string> overrides;
  std::string out_root = "out";

  auto* bar = app.add_subcommand("bar", "Run one bar scenario (JSON file or preset:NAME)");
  std::string bar_source;
  bar->add_option("config", bar_source, "Config path or preset:NAME")->required();
  bar->add_option("--set", overrides, "Override a config value, e.g. mesh.N=64");
  bar->add_option("--out", out_root, "Output root; files go to OUT/<name>/");

  auto* sweep = app.add_subcommand("sweep", "Run several scenarios, in parallel");
  std::vector<std::string> sweep_sources;
  sweep->add_option("configs", sweep_sources, "Config paths, preset:NAME or *.list files")
      ->required();
  sweep->add_option("--set", overrides, "Override applied to every config");
  sweep->add_option("--out", out_root, "Output root");

  auto* point = app.add_subcommand("pointwise", "Single material point strain history");
  PointwiseArgs pa;
  point->add_option("--preset", pa.preset, "Pointwise preset name");
  point->add_option("--config", pa.config, "Pointwise JSON config");
  point->add_option("--model", pa.model, "softening_elasticity | softening_elasto_hardening_plasticity | softening_plasticity");
  point->add_option("--E", pa.E, "Young modulus");
  point->add_option("--Yc", pa.Yc, "Critical energy density");
  point->add_option("--sigma-y", pa.sigma_y, "Yield stress");
  point->add_option("--k", pa.k, "Hardening parameter");
  point->add_option("--softening", pa.softening, "h1 | h2");
  point->add_option("--lambda", pa.lambda, "h2 parameter");
  point->add_option("--peaks", pa.peaks, "Comma-separated strain targets, 'e' unloads to zero stress");
  point->add_option("--unit", pa.unit, "strain | eps_c | eps_y");
  point->add_option("--substeps", pa.substeps, "Steps per segment");
  point->add_option("--set", overrides, "Override a config value");
  point->add_option("--out", pa.out, "Output directory (CSV to stdout when omitted)");

  auto* check = app.add_subcommand("check", "Property and oracle self-checks");
  std::uint64_t seed = checks::CheckOptions{}.seed;
  std::vector<int> sizes;
  bool corrupt = false, quick = false;
  check->add_option("--seed", seed, "Random seed");
  check->add_option("--sizes", sizes, "Element counts for random fields")->delimiter(',');
  check->add_flag("--corrupt", corrupt, "Negative control: every tolerance set to -1");
  check->add_flag("--quick", quick, "Fewer random cases");

  auto* presets = app.add_subcommand("presets", "List presets, or print one resolved");
  std::string preset_name;
  presets->add_option("name", preset_name, "Preset to print");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*bar) return cmd_bar(bar_source, overrides, out_root);
    if (*sweep) return cmd_sweep(sweep_sources, overrides, out_root);
    if (*point) return cmd_pointwise(pa, overrides);
    if (*check) return cmd_check(seed, sizes, corrupt, quick);
    if (*presets) return cmd_presets(preset_name);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitOk;
}
