#pragma once

#include <optional>
#include <span>
#include <vector>

#include "lipfield/damage_update.hpp"
#include "lipfield/equilibrium.hpp"
#include "lipfield/lipschitz.hpp"
#include "lipfield/materials.hpp"
#include "lipfield/mesh.hpp"

namespace lipfield {

struct SolverOptions {
  EquilibriumOptions equilibrium;
  DamageOptions damage;
  double alternation_tol = 1e-6;  ///< max |d^{k+1} - d^k|
  double kkt_tol = 1e-7;          ///< damage KKT residual at the final equilibrium
  int max_alternations = 5000;
  double trigger = 1e-3;          ///< extra damage on the middle element of the initial guess
  int snapback_max_outer = 40;    ///< equilibrium solves per control search
  double snapback_tol = 1e-9;     ///< relative tolerance on the strain-increment control
  int snapback_acceleration = 5;  ///< Anderson depth for controlled steps; 0 disables
};

struct LoadProgram {
  enum class Kind { ImposedDisplacement, SnapBackControlled };

  Kind kind = Kind::ImposedDisplacement;
  /// ImposedDisplacement: end displacements visited piecewise linearly from 0.
  std::vector<double> peaks;
  /// One entry per segment, or a single entry used for every segment.
  std::vector<int> steps_per_segment;
  /// SnapBackControlled: max element strain increment per step.
  double strain_increment = 0.0;
  int max_steps = 0;
  /// SnapBackControlled stops once past the peak with mean stress <= ratio * peak.
  double stop_stress_ratio = 0.01;
  double body_force_amplitude = 0.0;

  void validate() const;
  /// End displacement at every step of an ImposedDisplacement program.
  std::vector<double> displacement_path() const;
};

/// Values start + (end - start) j / steps for j = 1..steps.
std::vector<double> linear_segment(double start, double end, int steps);

struct BarProblem {
  Mesh1D mesh{1.0, 1};
  MaterialModel model;
  double length = 0.0;  ///< regularization length; <= 0 runs the local model
  LoadProgram load;
  SolverOptions solver;
  std::vector<int> snapshot_steps;

  bool regularized() const noexcept { return length > 0.0; }
};

struct StepRecord {
  int step = 0;
  double load = 0.0;
  double mean_strain = 0.0;
  double mean_stress = 0.0;
  int alternations = 0;
  int free_elements = 0;
  double work_increment = 0.0;
  double kkt_violation = 0.0;
  double max_damage = 0.0;
};

struct ProfileSnapshot {
  int step = 0;
  std::vector<double> strain;
  std::vector<double> plastic_strain;
  std::vector<double> cumulative_plastic;
  std::vector<double> damage;
};

struct StepOutcome {
  BarState state;
  StepRecord record;
  /// Incremental potential after every half-step, starting with the first
  /// equilibrium at the (triggered) guess.
  std::vector<double> potential_trace;
};

/// Raises the middle element (index N/2) of a copy of `d` by `delta`, clipped
/// to d_max. Only ever used as a starting guess.
DamageField apply_trigger(std::span<const double> d, double delta);

/// One imposed-displacement step by alternate minimization.
StepOutcome run_step(const BarProblem& problem, const BarState& state_n, double target_load);

/// One step whose end displacement is chosen so that the largest element
/// strain increment equals `strain_increment`. The load may decrease.
StepOutcome run_snapback(const BarProblem& problem, const BarState& state_n,
                         double strain_increment);

/// Signed trapezoidal work of the mean-stress / mean-strain path times L.
double external_work(std::span<const StepRecord> records, double length);

/// external_work for a run driven to failure; throws PreconditionError when
/// the final mean stress exceeds 1% of the peak.
double dissipated_energy(std::span<const StepRecord> records, double length);

struct RunResult {
  std::vector<StepRecord> records;  ///< records[0] is the unloaded initial state
  std::vector<ProfileSnapshot> snapshots;
  BarState final_state;
  double peak_stress = 0.0;
  long total_alternations = 0;
  double max_kkt_violation = 0.0;
  bool lipschitz_feasible = true;   ///< every step
  bool irreversible = true;         ///< d_{n+1} >= d_n at every step
};

/// Deterministic run of a full load program. Solver failures are rethrown as
/// StepFailure carrying the step index.
RunResult run_scenario(const BarProblem& problem);

/// Strain target of a pointwise history; nullopt means "unload to zero stress".
using StrainTarget = std::optional<double>;

struct PointRecord {
  int step = 0;
  double strain = 0.0;
  double stress = 0.0;
  double damage = 0.0;
  double plastic_strain = 0.0;
  double cumulative_plastic = 0.0;
  double kkt_violation = 0.0;
};

/// Single material point driven through a piecewise-linear strain history,
/// with the same alternate minimization as a one-element bar.
std::vector<PointRecord> run_material_point(const MaterialModel& model,
                                            std::span<const StrainTarget> targets, int substeps,
                                            const SolverOptions& options = {});

}  // namespace lipfield
