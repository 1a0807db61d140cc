#include "lipfield/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "lipfield/errors.hpp"

namespace lipfield {

BarState BarState::zero(const Mesh1D& mesh) {
  const int n = mesh.element_count();
  BarState s;
  s.u.assign(n + 1, 0.0);
  s.plastic_strain.assign(n, 0.0);
  s.cumulative_plastic.assign(n, 0.0);
  s.damage.assign(n, 0.0);
  s.stress.assign(n, 0.0);
  s.tangent.assign(n, 0.0);
  s.body_force.assign(n, 0.0);
  return s;
}

std::vector<double> BarState::strains(const Mesh1D& mesh) const {
  std::vector<double> out(mesh.element_count());
  for (int e = 0; e < mesh.element_count(); ++e) out[e] = strain(mesh, e);
  return out;
}

Assembly assemble(const Mesh1D& mesh, const MaterialModel& model, std::span<const double> u,
                  std::span<const double> plastic_strain_n,
                  std::span<const double> cumulative_plastic_n, std::span<const double> damage,
                  std::span<const double> body_force) {
  const int n = mesh.element_count();
  const double h = mesh.element_size();
  Assembly a;
  TridiagonalSystem& k = a.raw;
  k.sub.assign(n + 1, 0.0);
  k.main.assign(n + 1, 0.0);
  k.super.assign(n + 1, 0.0);
  k.rhs.assign(n + 1, 0.0);
  a.residual.assign(n + 1, 0.0);
  a.points.reserve(n);

  for (int e = 0; e < n; ++e) {
    const double eps = (u[e + 1] - u[e]) / h;
    const ReturnMapResult rm =
        return_map(model, eps, plastic_strain_n[e], cumulative_plastic_n[e], damage[e]);
    const double ke = rm.tangent / h;
    k.main[e] += ke;
    k.main[e + 1] += ke;
    k.super[e] -= ke;
    k.sub[e + 1] -= ke;
    const double load = body_force.empty() ? 0.0 : 0.5 * body_force[e] * h;
    a.residual[e] += -rm.stress - load;
    a.residual[e + 1] += rm.stress - load;
    a.points.push_back(rm);
  }
  for (int i = 0; i <= n; ++i) k.rhs[i] = -a.residual[i];

  a.system = k;
  TridiagonalSystem& s = a.system;
  for (int node : {0, n}) {
    s.main[node] = 1.0;
    s.sub[node] = 0.0;
    s.super[node] = 0.0;
    s.rhs[node] = 0.0;
  }
  if (n >= 1) {
    s.sub[1] = 0.0;
    s.super[n - 1] = 0.0;
  }
  return a;
}

std::vector<double> solve_tridiagonal(const TridiagonalSystem& sys) {
  const std::size_t n = sys.main.size();
  std::vector<double> c(n, 0.0), x(n, 0.0);
  double pivot = sys.main[0];
  if (pivot == 0.0 || !std::isfinite(pivot)) throw SingularSystem("zero pivot at row 0");
  c[0] = n > 1 ? sys.super[0] / pivot : 0.0;
  x[0] = sys.rhs[0] / pivot;
  for (std::size_t i = 1; i < n; ++i) {
    pivot = sys.main[i] - sys.sub[i] * c[i - 1];
    if (pivot == 0.0 || !std::isfinite(pivot)) {
      throw SingularSystem("zero pivot at row " + std::to_string(i));
    }
    c[i] = i + 1 < n ? sys.super[i] / pivot : 0.0;
    x[i] = (sys.rhs[i] - sys.sub[i] * x[i - 1]) / pivot;
  }
  for (std::size_t i = n - 1; i-- > 0;) x[i] -= c[i] * x[i + 1];
  return x;
}

std::vector<double> oscillatory_body_force(const Mesh1D& mesh, double amplitude) {
  std::vector<double> f(mesh.element_count());
  const auto xs = mesh.centroids();
  for (int e = 0; e < mesh.element_count(); ++e) {
    f[e] = amplitude * std::sin(8.0 * std::numbers::pi * xs[e] / mesh.length());
  }
  return f;
}

double incremental_potential(const Mesh1D& mesh, const MaterialModel& model,
                             std::span<const double> u, std::span<const double> plastic_strain_n,
                             std::span<const double> cumulative_plastic_n,
                             std::span<const double> damage, std::span<const double> body_force) {
  const int n = mesh.element_count();
  const double h = mesh.element_size();
  double total = 0.0;
  for (int e = 0; e < n; ++e) {
    const double eps = (u[e + 1] - u[e]) / h;
    const ReturnMapResult rm =
        return_map(model, eps, plastic_strain_n[e], cumulative_plastic_n[e], damage[e]);
    total += h * potential_density(
                     model, {eps, rm.plastic_strain, rm.cumulative_plastic, damage[e]});
    if (!body_force.empty()) total -= 0.5 * body_force[e] * h * (u[e] + u[e + 1]);
  }
  return total;
}

BarState equilibrium_solve(const Mesh1D& mesh, const MaterialModel& model,
                           std::span<const double> u_start,
                           std::span<const double> plastic_strain_n,
                           std::span<const double> cumulative_plastic_n,
                           std::span<const double> damage, double load,
                           std::span<const double> body_force,
                           const EquilibriumOptions& options) {
  const int n = mesh.element_count();
  if (static_cast<int>(u_start.size()) != n + 1) {
    throw InvalidArgument("u_start must have N+1 entries");
  }
  std::vector<double> u(u_start.begin(), u_start.end());
  u[0] = 0.0;
  u[n] = load;
  const double corr_tol = options.correction_tol * std::max(mesh.length(), std::abs(load));

  auto potential = [&](std::span<const double> v) {
    return incremental_potential(mesh, model, v, plastic_strain_n, cumulative_plastic_n, damage,
                                 body_force);
  };

  std::vector<double> history;
  int solves = 0;
  Assembly a = assemble(mesh, model, u, plastic_strain_n, cumulative_plastic_n, damage, body_force);
  for (;;) {
    double res = 0.0, smax = 0.0;
    for (int i = 1; i < n; ++i) res = std::max(res, std::abs(a.residual[i]));
    for (const auto& p : a.points) smax = std::max(smax, std::abs(p.stress));
    history.push_back(res);
    if (res <= options.residual_tol * std::max(1.0, smax)) break;
    if (solves >= options.max_iterations) {
      throw NonConvergence("equilibrium did not converge in " +
                               std::to_string(options.max_iterations) + " Newton iterations",
                           history);
    }

    const std::vector<double> du = solve_tridiagonal(a.system);
    ++solves;
    std::vector<double> trial(n + 1);
    auto step_to = [&](double alpha) {
      for (int i = 0; i <= n; ++i) trial[i] = u[i] + alpha * du[i];
    };
    step_to(1.0);
    const double f0 = potential(u);
    double f1 = potential(trial);
    double alpha = 1.0;
    for (int cut = 0; cut < options.max_line_search_cuts &&
                      f1 > f0 + 1e-14 * std::max(1.0, std::abs(f0));
         ++cut) {
      alpha *= 0.5;
      step_to(alpha);
      f1 = potential(trial);
    }
    double corr = 0.0;
    for (int i = 0; i <= n; ++i) corr = std::max(corr, std::abs(alpha * du[i]));
    u.swap(trial);
    a = assemble(mesh, model, u, plastic_strain_n, cumulative_plastic_n, damage, body_force);
    if (corr <= corr_tol) break;
  }

  BarState s;
  s.u = std::move(u);
  s.damage.assign(damage.begin(), damage.end());
  s.body_force.assign(body_force.begin(), body_force.end());
  if (s.body_force.empty()) s.body_force.assign(n, 0.0);
  s.load = load;
  s.newton_iterations = solves;
  s.plastic_strain.resize(n);
  s.cumulative_plastic.resize(n);
  s.stress.resize(n);
  s.tangent.resize(n);
  for (int e = 0; e < n; ++e) {
    s.plastic_strain[e] = a.points[e].plastic_strain;
    s.cumulative_plastic[e] = a.points[e].cumulative_plastic;
    s.stress[e] = a.points[e].stress;
    s.tangent[e] = a.points[e].tangent;
  }
  return s;
}

}  // namespace lipfield
