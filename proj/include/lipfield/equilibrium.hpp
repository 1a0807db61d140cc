#pragma once

#include <span>
#include <vector>

#include "lipfield/materials.hpp"
#include "lipfield/mesh.hpp"

namespace lipfield {

/// Converged (or trial) bar configuration at one load level.
struct BarState {
  std::vector<double> u;  ///< N+1 nodal displacements, u[0] = 0, u[N] = load
  std::vector<double> plastic_strain;
  std::vector<double> cumulative_plastic;
  std::vector<double> damage;
  std::vector<double> stress;
  std::vector<double> tangent;
  std::vector<double> body_force;  ///< per element
  double load = 0.0;
  int newton_iterations = 0;

  static BarState zero(const Mesh1D& mesh);
  double strain(const Mesh1D& mesh, int e) const { return (u[e + 1] - u[e]) / mesh.element_size(); }
  std::vector<double> strains(const Mesh1D& mesh) const;
};

/// Symmetric tridiagonal system over the N+1 nodes. sub[i] couples i and i-1,
/// super[i] couples i and i+1; sub[0] and super[N] are zero.
struct TridiagonalSystem {
  std::vector<double> sub;
  std::vector<double> main;
  std::vector<double> super;
  std::vector<double> rhs;
};

struct Assembly {
  TridiagonalSystem raw;     ///< element stiffnesses before Dirichlet elimination
  TridiagonalSystem system;  ///< K du = -R with Dirichlet rows eliminated
  std::vector<ReturnMapResult> points;
  std::vector<double> residual;  ///< internal minus external nodal forces, all nodes
};

/// Element tangents T_e/h scattered into the tridiagonal, residual from the
/// return-mapped stresses and the lumped body-force load f_e h/2 per node.
Assembly assemble(const Mesh1D& mesh, const MaterialModel& model, std::span<const double> u,
                  std::span<const double> plastic_strain_n,
                  std::span<const double> cumulative_plastic_n, std::span<const double> damage,
                  std::span<const double> body_force);

/// Thomas algorithm. Throws SingularSystem on a zero pivot.
std::vector<double> solve_tridiagonal(const TridiagonalSystem& system);

/// f(x) = amplitude sin(8 pi x / L) sampled at the element centroids.
std::vector<double> oscillatory_body_force(const Mesh1D& mesh, double amplitude);

/// sum_e h f(eps_e, internals(u), d_e) minus the work of the body-force load.
double incremental_potential(const Mesh1D& mesh, const MaterialModel& model,
                             std::span<const double> u, std::span<const double> plastic_strain_n,
                             std::span<const double> cumulative_plastic_n,
                             std::span<const double> damage, std::span<const double> body_force);

struct EquilibriumOptions {
  double correction_tol = 1e-10;  ///< times max(L, |u_d|)
  double residual_tol = 1e-9;     ///< times max(1, max |sigma|)
  int max_iterations = 100;
  int max_line_search_cuts = 30;
};

/**
 * Newton iteration at frozen damage with the internals of step n: local return
 * mapping, tridiagonal global solve, bisection line search on the incremental
 * potential when a raw step increases it.
 */
BarState equilibrium_solve(const Mesh1D& mesh, const MaterialModel& model,
                           std::span<const double> u_start,
                           std::span<const double> plastic_strain_n,
                           std::span<const double> cumulative_plastic_n,
                           std::span<const double> damage, double load,
                           std::span<const double> body_force,
                           const EquilibriumOptions& options = {});

}  // namespace lipfield
