#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "lipfield/damage_update.hpp"

namespace lipfield::checks {

struct CheckResult {
  std::string name;
  bool passed = true;
  int cases = 0;
  int skipped = 0;       ///< cases excluded by the check's own rule (e.g. branch boundaries)
  double worst = 0.0;    ///< largest observed violation, in the check's units
  double tolerance = 0.0;
  std::string counterexample;  ///< first failing case, empty when passed
};

struct CheckOptions {
  std::uint64_t seed = 20240611;
  std::vector<int> sizes = {1, 2, 3, 5, 16, 64, 512};
  int fields = 200;            ///< random fields per projection property
  int problems = 200;          ///< random damage problems for the bounds checks
  int oracle_problems = 50;    ///< N <= 4 brute-force comparisons
  int points = 1000;           ///< random material points per model
  /// Negative control: every tolerance is replaced by -1 so any check fails.
  bool corrupt = false;
};

/// All-pairs definitions of the projections, O(N^2).
DamageField all_pairs_lower(const Mesh1D& mesh, std::span<const double> d, double l);
DamageField all_pairs_upper(const Mesh1D& mesh, std::span<const double> d, double l);

/// Random Lip-feasible field in [0, top], from a mix of shapes.
DamageField random_lip_field(std::mt19937_64& rng, const Mesh1D& mesh, double l, double top);
DamageField random_field(std::mt19937_64& rng, int n);

/// Random damage problem over any of the three models with realistic strains.
DamageProblem random_damage_problem(std::mt19937_64& rng, int n, double l);

/// Oracle-friendly instance: h/l a multiple of 1/40 and d_n on the 1/40 grid.
DamageProblem random_grid_problem(std::mt19937_64& rng, int n);

CheckResult check_projection_oracle(const CheckOptions& o);
CheckResult check_projection_lipschitz(const CheckOptions& o);
CheckResult check_projection_idempotence(const CheckOptions& o);
CheckResult check_projection_sandwich(const CheckOptions& o);
CheckResult check_projection_monotonicity(const CheckOptions& o);
CheckResult check_projection_fixed_points(const CheckOptions& o);
CheckResult check_bounds_chain(const CheckOptions& o);
CheckResult check_clipping_improvement(const CheckOptions& o);
CheckResult check_bounds_theorem(const CheckOptions& o);
/// solve_damage output is feasible to 1e-8 and its KKT residual is <= 1e-6.
CheckResult check_damage_optimality(const CheckOptions& o);
CheckResult check_oracle_equivalence(const CheckOptions& o);
CheckResult check_dual_derivatives(const CheckOptions& o, ModelKind kind);
CheckResult check_tangents(const CheckOptions& o, ModelKind kind);

/// Every check above, in a fixed order.
std::vector<CheckResult> run_all(const CheckOptions& o);

nlohmann::json report(const CheckOptions& o, const std::vector<CheckResult>& results);

}  // namespace lipfield::checks
