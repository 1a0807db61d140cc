#pragma once

#include <span>
#include <vector>

#include "lipfield/mesh.hpp"

namespace lipfield {

/// One damage value per element, indexed like Mesh1D::centroids().
using DamageField = std::vector<double>;

inline constexpr double kBoundTolerance = 1e-9;

/// max_{i != j} |d_i - d_j| / dist(i, j). On a uniform interval mesh the
/// maximum is attained by adjacent elements.
double lip_constant(const Mesh1D& mesh, std::span<const double> d);

/// lip(d) <= 1/l + tol.
bool is_lip(const Mesh1D& mesh, std::span<const double> d, double l, double tol = 0.0);

/// (pi^l d)_i = min_j (d_j + dist(i, j) / l): the largest Lip field below d.
DamageField lower_projection(const Mesh1D& mesh, std::span<const double> d, double l);

/// (pi^u d)_i = max_j (d_j - dist(i, j) / l): the smallest Lip field above d.
DamageField upper_projection(const Mesh1D& mesh, std::span<const double> d, double l);

struct BoundsResult {
  DamageField lower;
  DamageField upper;
  std::vector<int> free_elements;  ///< upper - lower > tol
  bool chain_holds = false;        ///< d_n <= lower <= trial <= upper <= 1
};

/**
 * Brackets the Lip-constrained damage minimizer between pi^l(trial) and
 * pi^u(trial). Elements outside `free_elements` have lower == upper == trial.
 *
 * Throws PreconditionError if d_n is not Lip feasible or trial < d_n somewhere.
 */
BoundsResult compute_bounds(const Mesh1D& mesh, std::span<const double> d_n,
                            std::span<const double> trial, double l,
                            double tol = kBoundTolerance);

}  // namespace lipfield
