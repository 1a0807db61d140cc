#include "lipfield/damage_update.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "lipfield/chain_solver.hpp"
#include "lipfield/errors.hpp"

namespace lipfield {

namespace {

constexpr double kOracleSlack = 1e-12;

double clamp_unit(double d) { return std::clamp(d, 0.0, kDamageMax); }

}  // namespace

void DamageProblem::validate() const {
  const auto n = static_cast<std::size_t>(mesh.element_count());
  if (strain.size() != n || plastic_strain.size() != n || cumulative_plastic.size() != n ||
      d_n.size() != n) {
    throw InvalidArgument("damage problem fields do not match the mesh");
  }
  for (double d : d_n) {
    if (!(d >= 0.0 && d <= 1.0)) throw InvalidArgument("d_n outside [0, 1]");
  }
  if (regularized() && !is_lip(mesh, d_n, length, 1e-8 / mesh.element_size())) {
    throw PreconditionError("d_n is not Lipschitz feasible");
  }
}

double local_trial(const MaterialModel& model, double strain, double plastic_strain,
                   double cumulative_plastic, double d_n, const DamageOptions& options) {
  const double lo = clamp_unit(d_n);
  PointState s{strain, plastic_strain, cumulative_plastic, lo};
  auto derivs = [&](double d) {
    s.damage = d;
    return std::pair<double, double>{duals(model, s).damage_driving, damage_curvature(model, s)};
  };
  return find_increasing_root(derivs, lo, kDamageMax, options.xtol, options.max_root_iterations).x;
}

double damage_objective(const DamageProblem& problem, std::span<const double> d) {
  const double h = problem.mesh.element_size();
  double total = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    total += h * potential_density(problem.model, problem.point(static_cast<int>(i), d[i]));
  }
  return total;
}

namespace {

// Projection of z onto {lo <= x <= hi, |x_{i+1} - x_i| <= step}.
std::vector<double> project_chain(std::span<const double> z, std::span<const double> lo,
                                  std::span<const double> hi, double step,
                                  const DamageOptions& options) {
  auto derivs = [&](int i, double x) { return std::pair<double, double>{x - z[i], 1.0}; };
  return minimize_chain(derivs, lo, hi, step, options.xtol, options.max_root_iterations).x;
}

}  // namespace

double damage_kkt_residual(const DamageProblem& problem, std::span<const double> d,
                           const DamageOptions& options) {
  const int n = problem.mesh.element_count();
  const double scale = problem.model.energy_scale();
  std::vector<double> z(n), lo(n), hi(n, kDamageMax);
  for (int i = 0; i < n; ++i) {
    z[i] = d[i] - duals(problem.model, problem.point(i, d[i])).damage_driving / scale;
    lo[i] = clamp_unit(problem.d_n[i]);
  }
  std::vector<double> projected;
  if (problem.regularized() && n > 1) {
    projected = project_chain(z, lo, hi, problem.mesh.element_size() / problem.length, options);
  } else {
    projected.resize(n);
    for (int i = 0; i < n; ++i) projected[i] = std::clamp(z[i], lo[i], hi[i]);
  }
  double r = 0.0;
  for (int i = 0; i < n; ++i) {
    r = std::max(r, std::abs(d[i] - projected[i]));
    r = std::max(r, problem.d_n[i] - d[i]);
  }
  if (problem.regularized()) {
    const double step = problem.mesh.element_size() / problem.length;
    for (int i = 1; i < n; ++i) r = std::max(r, std::abs(d[i] - d[i - 1]) - step);
  }
  return r;
}

DamageField project_feasible(const DamageProblem& problem, std::span<const double> z,
                             const DamageOptions& options) {
  const int n = problem.mesh.element_count();
  std::vector<double> lo(n), hi(n, kDamageMax);
  for (int i = 0; i < n; ++i) lo[i] = clamp_unit(problem.d_n[i]);
  if (problem.regularized() && n > 1) {
    return project_chain(z, lo, hi, problem.mesh.element_size() / problem.length, options);
  }
  DamageField out(n);
  for (int i = 0; i < n; ++i) out[i] = std::clamp(z[i], lo[i], hi[i]);
  return out;
}

DamageSolution solve_damage(const DamageProblem& problem, const DamageOptions& options) {
  problem.validate();
  const int n = problem.mesh.element_count();
  DamageSolution sol;
  sol.trial.resize(n);
  for (int i = 0; i < n; ++i) {
    sol.trial[i] = local_trial(problem.model, problem.strain[i], problem.plastic_strain[i],
                               problem.cumulative_plastic[i], problem.d_n[i], options);
  }
  sol.d = sol.trial;

  if (problem.regularized()) {
    sol.bounds = compute_bounds(problem.mesh, problem.d_n, sol.trial, problem.length,
                                options.bound_tol);
    const auto& free = sol.bounds.free_elements;
    sol.free_count = static_cast<int>(free.size());
    const double step = problem.mesh.element_size() / problem.length;

    std::size_t k = 0;
    while (k < free.size()) {
      std::size_t end = k;
      while (end + 1 < free.size() && free[end + 1] == free[end] + 1) ++end;
      const int first = free[k];
      const int last = free[end];
      const int m = last - first + 1;

      std::vector<double> lo(m), hi(m);
      for (int j = 0; j < m; ++j) {
        const int e = first + j;
        lo[j] = std::max(clamp_unit(problem.d_n[e]), sol.bounds.lower[e]);
        hi[j] = std::min(kDamageMax, sol.bounds.upper[e]);
        hi[j] = std::max(hi[j], lo[j]);
      }
      // Frozen neighbors keep their trial value and bound the interval ends.
      if (first > 0) {
        lo[0] = std::max(lo[0], sol.trial[first - 1] - step);
        hi[0] = std::min(hi[0], sol.trial[first - 1] + step);
      }
      if (last < n - 1) {
        lo[m - 1] = std::max(lo[m - 1], sol.trial[last + 1] - step);
        hi[m - 1] = std::min(hi[m - 1], sol.trial[last + 1] + step);
      }

      PointState s{};
      auto derivs = [&](int j, double d) {
        s = problem.point(first + j, d);
        return std::pair<double, double>{duals(problem.model, s).damage_driving,
                                         damage_curvature(problem.model, s)};
      };
      const ChainSolution chain =
          minimize_chain(derivs, lo, hi, step, options.xtol, options.max_root_iterations);
      if (chain.iterations > options.max_iterations) {
        throw NonConvergence("damage solve exceeded " + std::to_string(options.max_iterations) +
                             " iterations on a free interval of " + std::to_string(m) +
                             " elements");
      }
      sol.iterations += chain.iterations;
      for (int j = 0; j < m; ++j) sol.d[first + j] = chain.x[j];
      k = end + 1;
    }
  }

  sol.objective = damage_objective(problem, sol.d);
  sol.kkt_residual = damage_kkt_residual(problem, sol.d, options);
  return sol;
}

DamageField brute_force_oracle(const DamageProblem& problem, int grid_steps) {
  problem.validate();
  const int n = problem.mesh.element_count();
  if (n > 6) throw InvalidArgument("brute force oracle supports at most 6 elements");
  if (grid_steps < 2 || grid_steps > 41) throw InvalidArgument("grid_steps must be in [2, 41]");

  const double h = problem.mesh.element_size();
  const double step = problem.regularized() ? h / problem.length
                                            : std::numeric_limits<double>::infinity();
  auto density = [&](int i, double d) {
    return h * potential_density(problem.model, problem.point(i, d));
  };

  // Exhaustive depth-first search over per-element candidate lists.
  auto search = [&](const std::vector<std::vector<double>>& candidates) {
    std::vector<std::vector<double>> cost(n);
    for (int i = 0; i < n; ++i) {
      for (double v : candidates[i]) cost[i].push_back(density(i, v));
    }
    double best = std::numeric_limits<double>::infinity();
    std::vector<double> best_x, x(n);
    std::function<void(int, double)> dfs = [&](int i, double acc) {
      if (acc >= best) return;
      if (i == n) {
        best = acc;
        best_x = x;
        return;
      }
      for (std::size_t c = 0; c < candidates[i].size(); ++c) {
        const double v = candidates[i][c];
        if (i > 0 && std::abs(v - x[i - 1]) > step + kOracleSlack) continue;
        x[i] = v;
        dfs(i + 1, acc + cost[i][c]);
      }
    };
    dfs(0, 0.0);
    return best_x;
  };

  std::vector<std::vector<double>> candidates(n);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < grid_steps; ++k) {
      const double v = std::min(static_cast<double>(k) / (grid_steps - 1), kDamageMax);
      if (v >= problem.d_n[i] - kOracleSlack) candidates[i].push_back(std::max(v, problem.d_n[i]));
    }
  }
  std::vector<double> x = search(candidates);
  if (x.empty()) throw PreconditionError("no feasible grid point for the oracle");

  // Zoom: re-grid a window of +-2 old spacings with 4x finer spacing.
  double spacing = 1.0 / (grid_steps - 1);
  constexpr int kHalfWindow = 8;
  while (spacing > 1e-11) {
    spacing *= 0.25;
    for (int i = 0; i < n; ++i) {
      candidates[i].clear();
      for (int k = -kHalfWindow; k <= kHalfWindow; ++k) {
        const double v = x[i] + k * spacing;
        if (v >= problem.d_n[i] && v <= kDamageMax) candidates[i].push_back(v);
      }
      if (candidates[i].empty()) candidates[i].push_back(x[i]);
    }
    std::vector<double> refined = search(candidates);
    if (!refined.empty()) x = refined;
  }

  // Coordinate pass: exact 1-D convex minimization with neighbors fixed.
  for (int i = 0; i < n; ++i) {
    double a = problem.d_n[i], b = kDamageMax;
    if (i > 0) { a = std::max(a, x[i - 1] - step); b = std::min(b, x[i - 1] + step); }
    if (i < n - 1) { a = std::max(a, x[i + 1] - step); b = std::min(b, x[i + 1] + step); }
    if (a > b) continue;
    // Golden-section search on the energy only.
    double lo = a, hi = b;
    const double r = 0.5 * (std::sqrt(5.0) - 1.0);
    double c1 = hi - r * (hi - lo), c2 = lo + r * (hi - lo);
    double f1 = density(i, c1), f2 = density(i, c2);
    for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
      if (f1 <= f2) { hi = c2; c2 = c1; f2 = f1; c1 = hi - r * (hi - lo); f1 = density(i, c1); }
      else { lo = c1; c1 = c2; f1 = f2; c2 = lo + r * (hi - lo); f2 = density(i, c2); }
    }
    const double cand = 0.5 * (lo + hi);
    for (double v : {cand, a, b}) {
      if (density(i, v) < density(i, x[i])) x[i] = v;
    }
  }
  return x;
}

double oracle_resolution_bound(const DamageProblem& problem, int grid_steps) {
  const int n = problem.mesh.element_count();
  const double h = problem.mesh.element_size();
  const double spacing = 1.0 / (grid_steps - 1);
  double bound = 0.0;
  for (int i = 0; i < n; ++i) {
    // mu is nondecreasing in d, so max |mu| on the box is at an end point.
    const double a = std::abs(duals(problem.model, problem.point(i, problem.d_n[i])).damage_driving);
    const double b = std::abs(duals(problem.model, problem.point(i, kDamageMax)).damage_driving);
    bound += h * std::max(a, b) * spacing;
  }
  return bound;
}

double kkt_audit(const DamageProblem& problem, std::span<const double> d,
                 std::span<const double> plastic_strain_n,
                 std::span<const double> cumulative_plastic_n, double tol) {
  double v = damage_kkt_residual(problem, d);
  if (problem.model.has_plasticity()) {
    for (int i = 0; i < problem.mesh.element_count(); ++i) {
      const PointState s = problem.point(i, d[i]);
      const PointState sn{0.0, plastic_strain_n[i], cumulative_plastic_n[i], problem.d_n[i]};
      v = std::max(v, plastic_kkt_violation(problem.model, s, sn, tol));
    }
  }
  return v;
}

}  // namespace lipfield
