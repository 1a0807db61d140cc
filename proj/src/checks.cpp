#include "lipfield/checks.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "lipfield/errors.hpp"

namespace lipfield::checks {

namespace {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double a, double b) {
  return std::uniform_real_distribution<double>(a, b)(rng);
}
int uniform_int(Rng& rng, int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng); }

// Collects violations of one property and keeps the first counterexample.
class Tracker {
 public:
  Tracker(std::string name, double tol, const CheckOptions& o) {
    r_.name = std::move(name);
    r_.tolerance = o.corrupt ? -1.0 : tol;
  }

  void observe(double violation, const std::function<std::string()>& describe) {
    ++r_.cases;
    if (!(violation <= r_.worst)) r_.worst = violation;
    if (!(violation <= r_.tolerance) && r_.passed) {
      r_.passed = false;
      r_.counterexample = describe();
    }
  }
  void skip() { ++r_.skipped; }

  CheckResult result() const { return r_; }

 private:
  CheckResult r_;
};

std::string join(std::span<const double> v, std::size_t max_items = 12) {
  std::ostringstream s;
  s.precision(17);
  s << '[';
  for (std::size_t i = 0; i < v.size() && i < max_items; ++i) s << (i ? ", " : "") << v[i];
  if (v.size() > max_items) s << ", ... (" << v.size() << " values)";
  s << ']';
  return s.str();
}

double max_excess(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, a[i] - b[i]);
  return m;
}
double max_gap(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// Largest amount by which an adjacent jump exceeds h/l.
double lip_excess(const Mesh1D& mesh, std::span<const double> d, double l) {
  const double c = mesh.element_size() / l;
  double m = 0.0;
  for (std::size_t i = 1; i < d.size(); ++i) m = std::max(m, std::abs(d[i] - d[i - 1]) - c);
  return m;
}

struct FieldCase {
  Mesh1D mesh;
  double l;
  DamageField d;
};

FieldCase random_case(Rng& rng, const CheckOptions& o, int k) {
  const int n = o.sizes[k % o.sizes.size()];
  Mesh1D mesh = build_uniform_mesh(1.0, n);
  const double c = std::exp(uniform(rng, std::log(0.02), std::log(2.0)));
  const double l = mesh.element_size() / c;
  return {mesh, l, random_field(rng, n)};
}

std::string describe_field(const FieldCase& f) {
  std::ostringstream s;
  s.precision(17);
  s << "N=" << f.mesh.element_count() << " l=" << f.l << " d=" << join(f.d);
  return s.str();
}

MaterialModel random_model(Rng& rng) {
  switch (uniform_int(rng, 0, 2)) {
    case 0: {
      const SofteningFunction h = uniform_int(rng, 0, 1) ? SofteningFunction::h1()
                                                         : SofteningFunction::h2(uniform(rng, 0.1, 0.5));
      return MaterialModel::softening_elasticity(1.0, 1.0, h);
    }
    case 1: {
      const SofteningFunction h = uniform_int(rng, 0, 1) ? SofteningFunction::h1()
                                                         : SofteningFunction::h2(uniform(rng, 0.1, 0.5));
      return MaterialModel::softening_elasto_hardening_plasticity(2.0, 1.0, 1.0,
                                                                   uniform(rng, 0.125, 1.0), h);
    }
    default:
      return MaterialModel::softening_plasticity(1.0, 1.0 / 16.0, 4.0);
  }
}

// Frozen (eps, eps_p, p) that put the trial damage anywhere in [0, 1).
void random_internals(Rng& rng, const MaterialModel& m, double& eps, double& ep, double& p) {
  switch (m.kind) {
    case ModelKind::SofteningElasticity:
      eps = uniform(rng, -3.0, 3.0) * std::sqrt(2.0 * m.Yc / m.E);
      ep = p = 0.0;
      break;
    case ModelKind::SofteningElastoHardeningPlasticity: {
      const double ey = m.sigma_y / m.E;
      ep = uniform(rng, -3.0, 3.0) * ey;
      p = std::abs(ep) + uniform(rng, 0.0, 2.0) * ey;
      eps = ep + uniform(rng, -1.5, 1.5) * ey;
      break;
    }
    case ModelKind::SofteningPlasticity: {
      const double ey = m.sigma_y / m.E;
      ep = uniform(rng, -8.0, 8.0) * ey;
      p = std::abs(ep) + uniform(rng, 0.0, 4.0) * ey;
      eps = ep + uniform(rng, -2.0, 2.0) * ey;
      break;
    }
  }
}

std::string describe_problem(const DamageProblem& p) {
  std::ostringstream s;
  s.precision(17);
  s << "N=" << p.mesh.element_count() << " l=" << p.length
    << " model=" << static_cast<int>(p.model.kind) << " strain=" << join(p.strain)
    << " eps_p=" << join(p.plastic_strain) << " p=" << join(p.cumulative_plastic)
    << " d_n=" << join(p.d_n);
  return s.str();
}

}  // namespace

DamageField all_pairs_lower(const Mesh1D& mesh, std::span<const double> d, double l) {
  const int n = mesh.element_count();
  DamageField out(n);
  for (int i = 0; i < n; ++i) {
    double v = d[i];
    for (int j = 0; j < n; ++j) v = std::min(v, d[j] + mesh.centroid_distance(i, j) / l);
    out[i] = v;
  }
  return out;
}

DamageField all_pairs_upper(const Mesh1D& mesh, std::span<const double> d, double l) {
  const int n = mesh.element_count();
  DamageField out(n);
  for (int i = 0; i < n; ++i) {
    double v = d[i];
    for (int j = 0; j < n; ++j) v = std::max(v, d[j] - mesh.centroid_distance(i, j) / l);
    out[i] = v;
  }
  return out;
}

DamageField random_field(Rng& rng, int n) {
  DamageField d(n, 0.0);
  switch (uniform_int(rng, 0, 4)) {
    case 0:
      for (double& v : d) v = uniform(rng, 0.0, 1.0);
      break;
    case 1: {  // a few spikes on zero
      const int spikes = uniform_int(rng, 1, std::max(1, n / 8));
      for (int s = 0; s < spikes; ++s) d[uniform_int(rng, 0, n - 1)] = uniform(rng, 0.2, 1.0);
      break;
    }
    case 2: {  // smooth plus noise
      const double f = uniform(rng, 0.5, 6.0), phase = uniform(rng, 0.0, 6.3);
      for (int i = 0; i < n; ++i) {
        const double x = (i + 0.5) / n;
        d[i] = std::clamp(0.5 + 0.4 * std::sin(6.283185307179586 * f * x + phase) +
                              uniform(rng, -0.1, 0.1),
                          0.0, 1.0);
      }
      break;
    }
    case 3:
      std::fill(d.begin(), d.end(), uniform(rng, 0.0, 1.0));
      break;
    default: {  // steps
      const int cut = uniform_int(rng, 0, n);
      const double a = uniform(rng, 0.0, 1.0), b = uniform(rng, 0.0, 1.0);
      for (int i = 0; i < n; ++i) d[i] = i < cut ? a : b;
    }
  }
  return d;
}

DamageField random_lip_field(Rng& rng, const Mesh1D& mesh, double l, double top) {
  DamageField d = random_field(rng, mesh.element_count());
  for (double& v : d) v *= top;
  return lower_projection(mesh, d, l);
}

DamageProblem random_damage_problem(Rng& rng, int n, double l) {
  DamageProblem p{build_uniform_mesh(1.0, n), random_model(rng), {}, {}, {}, {}, l};
  p.strain.resize(n);
  p.plastic_strain.resize(n);
  p.cumulative_plastic.resize(n);
  // Either independent points or one smooth bump, which localizes the trial.
  const bool bump = uniform_int(rng, 0, 1) == 1;
  double eps0 = 0.0, ep0 = 0.0, p0 = 0.0;
  random_internals(rng, p.model, eps0, ep0, p0);
  const double centre = uniform(rng, 0.0, 1.0), width = uniform(rng, 0.02, 0.3);
  for (int i = 0; i < n; ++i) {
    double eps, ep, cp;
    random_internals(rng, p.model, eps, ep, cp);
    if (bump) {
      const double x = (i + 0.5) / n;
      const double w = std::exp(-0.5 * std::pow((x - centre) / width, 2.0));
      eps = eps0 * (0.5 + w);
      ep = ep0 * w;
      cp = p0 * w;
    }
    p.strain[i] = eps;
    p.plastic_strain[i] = ep;
    p.cumulative_plastic[i] = cp;
  }
  p.d_n = uniform_int(rng, 0, 2) == 0 ? DamageField(n, 0.0)
                                      : random_lip_field(rng, p.mesh, l > 0.0 ? l : 1.0, 0.5);
  return p;
}

DamageProblem random_grid_problem(Rng& rng, int n) {
  const int m = uniform_int(rng, 1, 20);  // h/l = m/40
  const double h = 1.0 / n;
  DamageProblem p = random_damage_problem(rng, n, h / (m / 40.0));
  std::vector<int> k(n);
  k[0] = uniform_int(rng, 0, 12);
  for (int i = 1; i < n; ++i) k[i] = std::clamp(k[i - 1] + uniform_int(rng, -m, m), 0, 20);
  if (uniform_int(rng, 0, 2) == 0) std::fill(k.begin(), k.end(), 0);
  for (int i = 0; i < n; ++i) p.d_n[i] = k[i] / 40.0;
  return p;
}

CheckResult check_projection_oracle(const CheckOptions& o) {
  Tracker t("projection_sweep_equals_all_pairs", 1e-12, o);
  Rng rng(o.seed + 1);
  for (int k = 0; k < o.fields; ++k) {
    const FieldCase f = random_case(rng, o, k);
    const double v =
        std::max(max_gap(lower_projection(f.mesh, f.d, f.l), all_pairs_lower(f.mesh, f.d, f.l)),
                 max_gap(upper_projection(f.mesh, f.d, f.l), all_pairs_upper(f.mesh, f.d, f.l)));
    t.observe(v, [&] { return describe_field(f); });
  }
  return t.result();
}

CheckResult check_projection_lipschitz(const CheckOptions& o) {
  Tracker t("projection_output_in_lip_set", 1e-12, o);
  Rng rng(o.seed + 2);
  for (int k = 0; k < o.fields; ++k) {
    const FieldCase f = random_case(rng, o, k);
    const double v = std::max(lip_excess(f.mesh, lower_projection(f.mesh, f.d, f.l), f.l),
                              lip_excess(f.mesh, upper_projection(f.mesh, f.d, f.l), f.l));
    t.observe(v, [&] { return describe_field(f); });
  }
  return t.result();
}

CheckResult check_projection_idempotence(const CheckOptions& o) {
  Tracker t("projection_idempotence", 1e-12, o);
  Rng rng(o.seed + 3);
  for (int k = 0; k < o.fields; ++k) {
    const FieldCase f = random_case(rng, o, k);
    const DamageField lo = lower_projection(f.mesh, f.d, f.l);
    const DamageField up = upper_projection(f.mesh, f.d, f.l);
    const double v = std::max(max_gap(lower_projection(f.mesh, lo, f.l), lo),
                              max_gap(upper_projection(f.mesh, up, f.l), up));
    t.observe(v, [&] { return describe_field(f); });
  }
  return t.result();
}

CheckResult check_projection_sandwich(const CheckOptions& o) {
  Tracker t("projection_sandwich", 1e-12, o);
  Rng rng(o.seed + 4);
  for (int k = 0; k < o.fields; ++k) {
    const FieldCase f = random_case(rng, o, k);
    const double v = std::max(max_excess(lower_projection(f.mesh, f.d, f.l), f.d),
                              max_excess(f.d, upper_projection(f.mesh, f.d, f.l)));
    t.observe(v, [&] { return describe_field(f); });
  }
  return t.result();
}

CheckResult check_projection_monotonicity(const CheckOptions& o) {
  Tracker t("projection_monotonicity", 1e-12, o);
  Rng rng(o.seed + 5);
  for (int k = 0; k < o.fields; ++k) {
    const FieldCase f = random_case(rng, o, k);
    DamageField d2 = f.d;
    for (double& v : d2) v = std::min(1.0, v + (uniform_int(rng, 0, 1) ? uniform(rng, 0.0, 0.5) : 0.0));
    const double v = std::max(
        max_excess(lower_projection(f.mesh, f.d, f.l), lower_projection(f.mesh, d2, f.l)),
        max_excess(upper_projection(f.mesh, f.d, f.l), upper_projection(f.mesh, d2, f.l)));
    t.observe(v, [&] { return describe_field(f) + " d2=" + join(d2); });
  }
  return t.result();
}

CheckResult check_projection_fixed_points(const CheckOptions& o) {
  Tracker t("projection_fixes_lip_fields", 1e-12, o);
  Rng rng(o.seed + 6);
  for (int k = 0; k < o.fields; ++k) {
    FieldCase f = random_case(rng, o, k);
    f.d = random_lip_field(rng, f.mesh, f.l, 1.0);
    const double v = std::max(max_gap(lower_projection(f.mesh, f.d, f.l), f.d),
                              max_gap(upper_projection(f.mesh, f.d, f.l), f.d));
    t.observe(v, [&] { return describe_field(f); });
  }
  return t.result();
}

CheckResult check_bounds_chain(const CheckOptions& o) {
  Tracker t("bounds_inequality_chain", 1e-12, o);
  Rng rng(o.seed + 7);
  for (int k = 0; k < o.fields; ++k) {
    FieldCase f = random_case(rng, o, k);
    const DamageField d_n = random_lip_field(rng, f.mesh, f.l, 0.6);
    DamageField trial = f.d;
    for (std::size_t i = 0; i < trial.size(); ++i) trial[i] = std::max(trial[i], d_n[i]);
    const BoundsResult b = compute_bounds(f.mesh, d_n, trial, f.l);
    double v = 0.0;
    v = std::max(v, max_excess(d_n, b.lower));
    v = std::max(v, max_excess(b.lower, trial));
    v = std::max(v, max_excess(trial, b.upper));
    for (double u : b.upper) v = std::max(v, u - 1.0);
    if (!b.chain_holds) v = std::max(v, 1.0);
    t.observe(v, [&] { return describe_field(f) + " d_n=" + join(d_n); });
  }
  return t.result();
}

CheckResult check_clipping_improvement(const CheckOptions& o) {
  Tracker t("clipping_improves_feasible_fields", 1e-12, o);
  Rng rng(o.seed + 8);
  for (int k = 0; k < o.problems; ++k) {
    const int n = std::max(2, o.sizes[k % o.sizes.size()]);
    const double c = std::exp(uniform(rng, std::log(0.02), std::log(2.0)));
    const DamageProblem p = random_damage_problem(rng, n, (1.0 / n) / c);
    const DamageSolution sol = solve_damage(p);
    const DamageField star = project_feasible(p, random_field(rng, n));
    DamageField clipped(n);
    for (int i = 0; i < n; ++i) {
      clipped[i] = std::max(sol.bounds.lower[i], std::min(star[i], sol.bounds.upper[i]));
    }
    const double f_star = damage_objective(p, star);
    const double f_clip = damage_objective(p, clipped);
    double v = (f_clip - f_star) / std::max(1.0, std::abs(f_star));
    v = std::max(v, lip_excess(p.mesh, clipped, p.length));
    v = std::max(v, max_excess(p.d_n, clipped));
    t.observe(v, [&] { return describe_problem(p) + " d*=" + join(star); });
  }
  return t.result();
}

CheckResult check_bounds_theorem(const CheckOptions& o) {
  Tracker t("solution_inside_projection_bounds", 1e-9, o);
  Rng rng(o.seed + 9);
  for (int k = 0; k < o.problems; ++k) {
    const int n = o.sizes[k % o.sizes.size()];
    const double c = std::exp(uniform(rng, std::log(0.02), std::log(2.0)));
    const DamageProblem p = random_damage_problem(rng, n, (1.0 / n) / c);
    const DamageSolution sol = solve_damage(p);
    const double v = std::max(max_excess(sol.bounds.lower, sol.d), max_excess(sol.d, sol.bounds.upper));
    t.observe(v, [&] { return describe_problem(p) + " d=" + join(sol.d); });
  }
  return t.result();
}

CheckResult check_damage_optimality(const CheckOptions& o) {
  // Feasibility is scaled so that 1e-8 maps onto the KKT tolerance 1e-6.
  Tracker t("damage_solution_feasible_and_stationary", 1e-6, o);
  Rng rng(o.seed + 10);
  for (int k = 0; k < o.problems; ++k) {
    const int n = o.sizes[k % o.sizes.size()];
    const double c = std::exp(uniform(rng, std::log(0.02), std::log(2.0)));
    const DamageProblem p = random_damage_problem(rng, n, (1.0 / n) / c);
    const DamageSolution sol = solve_damage(p);
    const double infeasible = std::max(lip_excess(p.mesh, sol.d, p.length), max_excess(p.d_n, sol.d));
    const double v = std::max(sol.kkt_residual, infeasible * 100.0);
    t.observe(v, [&] { return describe_problem(p) + " d=" + join(sol.d); });
  }
  return t.result();
}

CheckResult check_oracle_equivalence(const CheckOptions& o) {
  // Violation is |objective gap| over the grid-resolution bound.
  Tracker t("solver_matches_brute_force_oracle", 1.0, o);
  Rng rng(o.seed + 11);
  constexpr int kGrid = 41;
  for (int k = 0; k < o.oracle_problems; ++k) {
    const DamageProblem p = random_grid_problem(rng, 1 + k % 4);
    const DamageSolution sol = solve_damage(p);
    const DamageField oracle = brute_force_oracle(p, kGrid);
    const double gap = std::abs(sol.objective - damage_objective(p, oracle));
    const double bound = oracle_resolution_bound(p, kGrid);
    t.observe(gap / bound, [&] {
      return describe_problem(p) + " solver=" + join(sol.d) + " oracle=" + join(oracle);
    });
  }
  return t.result();
}

namespace {

const char* kind_tag(ModelKind k) {
  switch (k) {
    case ModelKind::SofteningElasticity: return "se";
    case ModelKind::SofteningElastoHardeningPlasticity: return "sep";
    case ModelKind::SofteningPlasticity: return "sp";
  }
  return "";
}

MaterialModel model_of_kind(Rng& rng, ModelKind kind) {
  MaterialModel m;
  do {
    m = random_model(rng);
  } while (m.kind != kind);
  return m;
}

std::string describe_point(const MaterialModel& m, const PointState& s) {
  std::ostringstream out;
  out.precision(17);
  out << kind_tag(m.kind) << " E=" << m.E << " Yc=" << m.Yc << " sy=" << m.sigma_y
      << " k=" << m.k << " lambda=" << m.softening.lambda << " eps=" << s.strain
      << " eps_p=" << s.plastic_strain << " p=" << s.cumulative_plastic << " d=" << s.damage;
  return out.str();
}

}  // namespace

CheckResult check_dual_derivatives(const CheckOptions& o, ModelKind kind) {
  Tracker t(std::string("duals_match_finite_differences_") + kind_tag(kind), 1e-6, o);
  Rng rng(o.seed + 12 + static_cast<int>(kind));
  for (int k = 0; k < o.points; ++k) {
    const MaterialModel m = model_of_kind(rng, kind);
    PointState s;
    random_internals(rng, m, s.strain, s.plastic_strain, s.cumulative_plastic);
    s.damage = uniform(rng, 1e-3, 0.95);
    if (m.has_plasticity()) s.cumulative_plastic += 1e-3 * m.sigma_y / m.E;
    const Duals q = duals(m, s);

    auto fd = [&](double PointState::*field, double step) {
      PointState a = s, b = s;
      a.*field += step;
      b.*field -= step;
      return (potential_density(m, a) - potential_density(m, b)) / (2.0 * step);
    };
    const double eps_unit = m.stress_scale() / m.E;
    const double rs = std::abs(q.stress - fd(&PointState::strain, 1e-6 * eps_unit)) /
                      std::max(std::abs(q.stress), m.stress_scale());
    const double rm = std::abs(q.damage_driving - fd(&PointState::damage, 1e-6)) /
                      std::max(std::abs(q.damage_driving), m.energy_scale());
    double v = std::max(rs, rm);
    if (m.has_plasticity()) {
      const double rr = std::abs(*q.yield_stress - fd(&PointState::cumulative_plastic, 1e-6 * eps_unit)) /
                        std::max(std::abs(*q.yield_stress), m.stress_scale());
      v = std::max(v, rr);
    }
    t.observe(v, [&] { return describe_point(m, s); });
  }
  return t.result();
}

CheckResult check_tangents(const CheckOptions& o, ModelKind kind) {
  Tracker t(std::string("tangent_matches_finite_differences_") + kind_tag(kind), 1e-5, o);
  Rng rng(o.seed + 16 + static_cast<int>(kind));
  for (int k = 0; k < o.points; ++k) {
    const MaterialModel m = model_of_kind(rng, kind);
    PointState n_state;
    random_internals(rng, m, n_state.strain, n_state.plastic_strain, n_state.cumulative_plastic);
    // Strain of the new step around the previous plastic strain.
    const double eps = n_state.plastic_strain +
                       uniform(rng, -3.0, 3.0) * m.stress_scale() / m.E;
    const double d = uniform(rng, 0.0, 0.95);
    const double step = 1e-6 * m.stress_scale() / m.E;
    auto at = [&](double e) {
      return return_map(m, e, n_state.plastic_strain, n_state.cumulative_plastic, d);
    };
    const ReturnMapResult c = at(eps);
    // Points whose branch changes within 10 steps are branch-boundary points.
    if (at(eps - 10.0 * step).plastic != c.plastic || at(eps + 10.0 * step).plastic != c.plastic) {
      t.skip();
      continue;
    }
    const double fd = (at(eps + step).stress - at(eps - step).stress) / (2.0 * step);
    const double v = std::abs(c.tangent - fd) / std::max(std::abs(c.tangent), 1e-8 * m.E);
    t.observe(v, [&] {
      return describe_point(m, {eps, n_state.plastic_strain, n_state.cumulative_plastic, d});
    });
  }
  return t.result();
}

std::vector<CheckResult> run_all(const CheckOptions& o) {
  std::vector<CheckResult> out = {
      check_projection_oracle(o),       check_projection_lipschitz(o),
      check_projection_idempotence(o),  check_projection_sandwich(o),
      check_projection_monotonicity(o), check_projection_fixed_points(o),
      check_bounds_chain(o),            check_clipping_improvement(o),
      check_bounds_theorem(o),          check_damage_optimality(o),
      check_oracle_equivalence(o),
  };
  for (ModelKind k : {ModelKind::SofteningElasticity, ModelKind::SofteningElastoHardeningPlasticity,
                      ModelKind::SofteningPlasticity}) {
    out.push_back(check_dual_derivatives(o, k));
    out.push_back(check_tangents(o, k));
  }
  return out;
}

nlohmann::json report(const CheckOptions& o, const std::vector<CheckResult>& results) {
  nlohmann::json checks = nlohmann::json::array();
  bool all = true;
  for (const auto& r : results) {
    all = all && r.passed;
    nlohmann::json j{{"name", r.name},   {"passed", r.passed},       {"cases", r.cases},
                     {"skipped", r.skipped}, {"worst", r.worst}, {"tolerance", r.tolerance}};
    if (!r.passed) j["counterexample"] = r.counterexample;
    checks.push_back(std::move(j));
  }
  return {{"seed", o.seed}, {"sizes", o.sizes}, {"corrupt", o.corrupt},
          {"passed", all},  {"checks", checks}};
}

}  // namespace lipfield::checks
