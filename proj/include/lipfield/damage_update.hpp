#pragma once

#include <span>
#include <vector>

#include "lipfield/lipschitz.hpp"
#include "lipfield/materials.hpp"
#include "lipfield/mesh.hpp"

namespace lipfield {

/// Damage half-step input: strains and plastic internals frozen per element.
/// A non-positive `length` disables the Lipschitz constraint (local model).
struct DamageProblem {
  Mesh1D mesh;
  MaterialModel model;
  std::vector<double> strain;
  std::vector<double> plastic_strain;
  std::vector<double> cumulative_plastic;
  DamageField d_n;
  double length = 0.0;

  bool regularized() const noexcept { return length > 0.0; }
  PointState point(int i, double d) const {
    return {strain[i], plastic_strain[i], cumulative_plastic[i], d};
  }
  void validate() const;
};

struct DamageOptions {
  double bound_tol = kBoundTolerance;
  double xtol = 1e-15;                ///< absolute tolerance on damage roots
  int max_root_iterations = 200;      ///< per scalar root search
  int max_iterations = 10000;         ///< total root iterations per free interval
};

struct DamageSolution {
  DamageField d;
  DamageField trial;
  BoundsResult bounds;
  double objective = 0.0;
  double kkt_residual = 0.0;
  int free_count = 0;
  int iterations = 0;
};

/// Minimizer of d -> f(eps, eps_p, p, d) over [d_n, d_max].
double local_trial(const MaterialModel& model, double strain, double plastic_strain,
                   double cumulative_plastic, double d_n, const DamageOptions& options = {});

/// sum_i h f_i(d_i).
double damage_objective(const DamageProblem& problem, std::span<const double> d);

/**
 * Constrained damage update: pointwise trial, projection bounds, then the
 * exact chain-constrained minimization on each maximal run of free elements
 * (boxed by the bounds and by the frozen neighbors). Outside the free set the
 * result is the trial value.
 */
DamageSolution solve_damage(const DamageProblem& problem, const DamageOptions& options = {});

/**
 * Natural KKT residual ||d - P_C(d - mu/s)||_inf of the damage half-step,
 * where C = {d_n <= d <= d_max, Lip(d) <= 1/l} (box only when unregularized)
 * and s is the model energy scale. Zero iff d solves the problem.
 */
/// Euclidean projection of z onto {d_n <= d <= d_max} intersected with the
/// Lip set (box only for the local model).
DamageField project_feasible(const DamageProblem& problem, std::span<const double> z,
                             const DamageOptions& options = {});

double damage_kkt_residual(const DamageProblem& problem, std::span<const double> d,
                           const DamageOptions& options = {});

/**
 * Validation oracle, independent of the solver: exhaustive search over the
 * tensor grid {k/(grid_steps-1)} (top point replaced by d_max) filtered by
 * irreversibility and the Lipschitz constraint, then repeated local grid
 * zooms around the incumbent and a coordinate pass. Only evaluates
 * potential_density. Requires N <= 6 and grid_steps <= 41.
 */
DamageField brute_force_oracle(const DamageProblem& problem, int grid_steps);

/// Objective gap guaranteed for the coarse grid of brute_force_oracle when
/// h/l is a multiple of the grid spacing and d_n lies on the grid.
double oracle_resolution_bound(const DamageProblem& problem, int grid_steps);

/// Bar-level KKT audit: damage residual above plus every element's plastic
/// KKT violation.
double kkt_audit(const DamageProblem& problem, std::span<const double> d,
                 std::span<const double> plastic_strain_n,
                 std::span<const double> cumulative_plastic_n, double tol = 1e-12);

}  // namespace lipfield
