#pragma once

#include <optional>

namespace lipfield {

/// Damage is capped just below 1 so that (1-d)^2 > 0 and the bar stiffness
/// stays positive definite.
inline constexpr double kDamageMax = 1.0 - 1e-9;

enum class ModelKind {
  SofteningElasticity,
  SofteningElastoHardeningPlasticity,
  SofteningPlasticity,
};

enum class SofteningKind {
  H1,         ///< h(d) = 2d + 3d^2
  H2,         ///< h(d) = (2d - d^2) / (1 - d + lambda d^2)^2, cohesive-like
  Quadratic,  ///< g(d) = d^2, yield-stress softening
};

struct SofteningFunction {
  SofteningKind kind = SofteningKind::H1;
  double lambda = 0.0;  // H2 only

  static SofteningFunction h1() { return {SofteningKind::H1, 0.0}; }
  static SofteningFunction h2(double lambda) { return {SofteningKind::H2, lambda}; }
  static SofteningFunction quadratic() { return {SofteningKind::Quadratic, 0.0}; }
};

struct SofteningValue {
  double value;
  double slope;
};

/// Value and first derivative of the softening function at d in [0, 1].
SofteningValue softening_h(const SofteningFunction& h, double d);
double softening_curvature(const SofteningFunction& h, double d);

/// Cohesive link lambda = 2 Yc l / Gc. Throws InvalidArgument when the result
/// exceeds 1/2 (h2 would no longer be convex).
double lambda_from_toughness(double critical_energy, double length, double toughness);

/**
 * One of the three incremental potentials.
 *
 * SofteningElasticity:                (1-d)^2 E eps^2/2 + Yc h(d)
 * SofteningElastoHardeningPlasticity: (1-d)^2 [E (eps-eps_p)^2/2 + sy (p + k p^2/2)] + Yc h(d)
 * SofteningPlasticity:                E (eps-eps_p)^2/2 + (1-d)^2 sy (p + k p^2/2) + sy d^2
 */
struct MaterialModel {
  ModelKind kind = ModelKind::SofteningElasticity;
  double E = 1.0;
  double Yc = 1.0;       // elasticity-based damage only
  double sigma_y = 1.0;  // plasticity models only
  double k = 0.0;        // plasticity models only
  SofteningFunction softening = SofteningFunction::h1();

  static MaterialModel softening_elasticity(double E, double Yc, SofteningFunction h);
  static MaterialModel softening_elasto_hardening_plasticity(double E, double sigma_y, double k,
                                                             double Yc, SofteningFunction h);
  static MaterialModel softening_plasticity(double E, double sigma_y, double k);

  bool has_plasticity() const noexcept { return kind != ModelKind::SofteningElasticity; }

  /// Throws InvalidArgument if a parameter is outside its admissible set.
  void validate() const;

  /// Natural scales used to nondimensionalize KKT residuals.
  double energy_scale() const noexcept {
    return kind == ModelKind::SofteningPlasticity ? sigma_y : Yc;
  }
  double stress_scale() const noexcept;
};

struct PointState {
  double strain = 0.0;
  double plastic_strain = 0.0;
  double cumulative_plastic = 0.0;
  double damage = 0.0;
};

struct Duals {
  double stress;
  double damage_driving;               ///< mu = df/dd
  std::optional<double> yield_stress;  ///< R = df/dp, plasticity models only
};

struct ReturnMapResult {
  double plastic_strain;
  double cumulative_plastic;
  double stress;
  double tangent;
  bool plastic;
};

struct KktReport {
  double lambda_lower = 0.0;    ///< multiplier of d >= d_n
  double lambda_upper = 0.0;    ///< multiplier of d <= 1
  double lambda_plastic = 0.0;  ///< multiplier of p - p_n >= |eps_p - eps_p,n|
  double max_violation = 0.0;
};

double potential_density(const MaterialModel& model, const PointState& state);
Duals duals(const MaterialModel& model, const PointState& state);

/// d^2 f / dd^2 at fixed (eps, eps_p, p). Strictly positive for valid models.
double damage_curvature(const MaterialModel& model, const PointState& state);

/// Closed-form local update at frozen damage from the step-n internals.
ReturnMapResult return_map(const MaterialModel& model, double strain, double plastic_strain_n,
                           double cumulative_plastic_n, double damage);

/// Damage natural residual |d - clamp(d - mu/s, d_n, d_max)| plus bound violations.
double local_kkt_residual(const MaterialModel& model, const PointState& state, double d_n);

/**
 * Pointwise KKT audit of a converged state against the step-n state.
 *
 * Damage conditions are measured by the natural residual
 * |d - clamp(d - mu/s, d_n, d_max)| with s = energy_scale(); plasticity
 * conditions (|sigma| <= R, |sigma| = R and sign agreement when plastic,
 * p - p_n = |dep|) are scaled by stress_scale(). `tol` only decides whether the
 * point is on the plastic branch. Inside a bar the Lipschitz constraint adds
 * its own multipliers; see kkt_audit in damage_update.hpp.
 */
KktReport kkt_check(const MaterialModel& model, const PointState& state,
                    const PointState& state_n, double tol);

/// Plasticity part of kkt_check alone (0 for SofteningElasticity).
double plastic_kkt_violation(const MaterialModel& model, const PointState& state,
                             const PointState& state_n, double tol);

}  // namespace lipfield
