#include "lipfield/driver.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "lipfield/errors.hpp"

namespace lipfield {

void LoadProgram::validate() const {
  if (kind == Kind::ImposedDisplacement) {
    if (peaks.empty()) throw InvalidArgument("imposed displacement program needs peaks");
    if (steps_per_segment.empty()) throw InvalidArgument("steps_per_segment is empty");
    if (steps_per_segment.size() != 1 && steps_per_segment.size() != peaks.size()) {
      throw InvalidArgument("steps_per_segment must have 1 or one-per-peak entries");
    }
    for (int s : steps_per_segment) {
      if (s < 1) throw InvalidArgument("steps per segment must be >= 1");
    }
  } else {
    if (!(strain_increment > 0.0)) throw InvalidArgument("strain increment must be positive");
    if (max_steps < 1) throw InvalidArgument("max_steps must be >= 1");
    if (!(stop_stress_ratio >= 0.0 && stop_stress_ratio < 1.0)) {
      throw InvalidArgument("stop_stress_ratio must be in [0, 1)");
    }
  }
}

std::vector<double> linear_segment(double start, double end, int steps) {
  std::vector<double> out(steps);
  for (int j = 1; j <= steps; ++j) out[j - 1] = start + (end - start) * j / steps;
  return out;
}

std::vector<double> LoadProgram::displacement_path() const {
  validate();
  std::vector<double> path;
  double from = 0.0;
  for (std::size_t s = 0; s < peaks.size(); ++s) {
    const int steps = steps_per_segment.size() == 1 ? steps_per_segment[0] : steps_per_segment[s];
    for (double v : linear_segment(from, peaks[s], steps)) path.push_back(v);
    from = peaks[s];
  }
  return path;
}

DamageField apply_trigger(std::span<const double> d, double delta) {
  DamageField out(d.begin(), d.end());
  if (out.empty()) return out;
  auto& mid = out[out.size() / 2];
  mid = std::min(mid + delta, kDamageMax);
  return out;
}

namespace {

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

std::vector<double> shifted_start(const Mesh1D& mesh, const BarState& state_n, double load) {
  std::vector<double> u = state_n.u;
  const auto xs = mesh.nodes();
  const double du = load - state_n.load;
  for (std::size_t i = 0; i < u.size(); ++i) u[i] += du * xs[i] / mesh.length();
  return u;
}

DamageProblem damage_problem(const BarProblem& problem, const BarState& eq,
                             const BarState& state_n) {
  return DamageProblem{problem.mesh,        problem.model,          eq.strains(problem.mesh),
                       eq.plastic_strain,   eq.cumulative_plastic,  state_n.damage,
                       problem.length};
}

double potential_of(const BarProblem& problem, const BarState& eq, const BarState& state_n,
                    std::span<const double> d) {
  return incremental_potential(problem.mesh, problem.model, eq.u, state_n.plastic_strain,
                               state_n.cumulative_plastic, d, eq.body_force);
}

double mean_stress(const Mesh1D& mesh, const BarState& s) {
  double acc = 0.0;
  for (double v : s.stress) acc += v * mesh.element_size();
  return acc / mesh.length();
}

// Equilibrium at frozen damage with the load chosen by the caller.
struct Equilibrate {
  const BarProblem& problem;
  const BarState& state_n;
  std::vector<double> u_start;

  BarState operator()(std::span<const double> d, double load) {
    BarState eq = equilibrium_solve(problem.mesh, problem.model, u_start, state_n.plastic_strain,
                                    state_n.cumulative_plastic, d, load, state_n.body_force,
                                    problem.solver.equilibrium);
    u_start = eq.u;
    return eq;
  }
};

// Largest element strain increment over step n.
double max_strain_increment(const Mesh1D& mesh, const BarState& eq, const BarState& state_n) {
  double m = -std::numeric_limits<double>::infinity();
  for (int e = 0; e < mesh.element_count(); ++e) {
    m = std::max(m, eq.strain(mesh, e) - state_n.strain(mesh, e));
  }
  return m;
}

// Solves max_e (eps_e(load) - eps_e,n) = target for the load at frozen damage.
// The left side is nondecreasing in the load; bracket then Illinois.
BarState controlled_equilibrium(const BarProblem& problem, const BarState& state_n,
                                Equilibrate& equilibrate, std::span<const double> d,
                                double target, double& load_guess) {
  const Mesh1D& mesh = problem.mesh;
  const double tol = problem.solver.snapback_tol * target;
  int evaluations = 0;
  auto eval = [&](double load, BarState& out) {
    if (++evaluations > problem.solver.snapback_max_outer) {
      throw NonConvergence("snap-back control did not converge in " +
                           std::to_string(problem.solver.snapback_max_outer) + " solves");
    }
    equilibrate.u_start = shifted_start(mesh, state_n, load);
    out = equilibrate(d, load);
    return max_strain_increment(mesh, out, state_n) - target;
  };

  BarState a_state, b_state;
  double a = load_guess;
  double ga = eval(a, a_state);
  if (std::abs(ga) <= tol) {
    load_guess = a;
    return a_state;
  }
  double span = target * mesh.length();
  double b = ga < 0.0 ? a + span : a - span;
  double gb = eval(b, b_state);
  while ((ga < 0.0) == (gb < 0.0) && std::abs(gb) > tol) {
    span *= 2.0;
    a = b;
    ga = gb;
    a_state = b_state;
    b = ga < 0.0 ? a + span : a - span;
    gb = eval(b, b_state);
  }
  if (std::abs(gb) <= tol) {
    load_guess = b;
    return b_state;
  }

  int side = 0;
  for (;;) {
    const double c = (a * gb - b * ga) / (gb - ga);
    BarState c_state;
    const double gc = eval(c, c_state);
    if (std::abs(gc) <= tol || std::abs(b - a) <= 1e-15 * std::max(1.0, std::abs(c))) {
      load_guess = c;
      return c_state;
    }
    if ((gc < 0.0) == (ga < 0.0)) {
      a = c;
      ga = gc;
      if (side == -1) gb *= 0.5;
      side = -1;
    } else {
      b = c;
      gb = gc;
      if (side == 1) ga *= 0.5;
      side = 1;
    }
  }
}

// Type-II Anderson mixing over the last few fixed-point pairs (x_j, G(x_j)).
class AndersonMixer {
 public:
  explicit AndersonMixer(int depth) : depth_(depth) {}

  // Returns the mixed iterate, or g itself while the history is too short.
  std::vector<double> mix(const std::vector<double>& x, const std::vector<double>& g) {
    std::vector<double> f(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) f[i] = g[i] - x[i];
    if (!fs_.empty() && norm(f) > 2.0 * norm(fs_.back())) clear();
    gs_.push_back(g);
    fs_.push_back(f);
    if (static_cast<int>(fs_.size()) > depth_ + 1) {
      gs_.erase(gs_.begin());
      fs_.erase(fs_.begin());
    }
    const int m = static_cast<int>(fs_.size()) - 1;
    if (depth_ <= 0 || m < 1) return g;

    const std::size_t n = x.size();
    std::vector<std::vector<double>> df(m, std::vector<double>(n));
    for (int j = 0; j < m; ++j) {
      for (std::size_t i = 0; i < n; ++i) df[j][i] = fs_[j + 1][i] - fs_[j][i];
    }
    // Normal equations with a small relative ridge.
    std::vector<double> a(m * m), b(m);
    double trace = 0.0;
    for (int r = 0; r < m; ++r) {
      for (int c = 0; c < m; ++c) a[r * m + c] = dot(df[r], df[c]);
      b[r] = dot(df[r], f);
      trace += a[r * m + r];
    }
    if (!(trace > 0.0)) return g;
    for (int r = 0; r < m; ++r) a[r * m + r] += 1e-12 * trace;
    for (int col = 0; col < m; ++col) {
      for (int r = col + 1; r < m; ++r) {
        const double factor = a[r * m + col] / a[col * m + col];
        for (int c = col; c < m; ++c) a[r * m + c] -= factor * a[col * m + c];
        b[r] -= factor * b[col];
      }
    }
    std::vector<double> gamma(m);
    for (int r = m - 1; r >= 0; --r) {
      double acc = b[r];
      for (int c = r + 1; c < m; ++c) acc -= a[r * m + c] * gamma[c];
      gamma[r] = acc / a[r * m + r];
    }
    std::vector<double> out = g;
    for (int j = 0; j < m; ++j) {
      for (std::size_t i = 0; i < n; ++i) out[i] -= gamma[j] * (gs_[j + 1][i] - gs_[j][i]);
    }
    for (double v : out) {
      if (!std::isfinite(v)) {
        clear();
        return g;
      }
    }
    return out;
  }

  void clear() {
    gs_.clear();
    fs_.clear();
  }

 private:
  static double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
  }
  static double norm(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

  int depth_;
  std::vector<std::vector<double>> gs_, fs_;
};

StepOutcome alternate(const BarProblem& problem, const BarState& state_n,
                      const std::function<BarState(std::span<const double>)>& equilibrium,
                      int acceleration_depth) {
  const int n = problem.mesh.element_count();
  StepOutcome out;
  DamageField d = (n >= 2 && problem.solver.trigger > 0.0)
                      ? apply_trigger(state_n.damage, problem.solver.trigger)
                      : state_n.damage;
  AndersonMixer mixer(acceleration_depth);
  constexpr int kContractingSteps = 3;
  int contracting = 0;
  std::vector<double> last_residual;
  int free_elements = 0;
  std::vector<double> history;
  double last_diff = std::numeric_limits<double>::infinity();
  int k = 0;
  for (;;) {
    BarState eq = equilibrium(d);
    out.potential_trace.push_back(potential_of(problem, eq, state_n, d));
    const DamageProblem dp = damage_problem(problem, eq, state_n);
    // Stationary for the coupled problem once d is optimal at these strains.
    if (k >= 1 && last_diff <= problem.solver.alternation_tol &&
        damage_kkt_residual(dp, d, problem.solver.damage) <= problem.solver.kkt_tol) {
      out.state = std::move(eq);
      break;
    }
    if (k >= problem.solver.max_alternations) {
      throw NonConvergence("alternate minimization did not converge in " +
                               std::to_string(problem.solver.max_alternations) + " iterations",
                           history);
    }
    const DamageSolution sol = solve_damage(dp, problem.solver.damage);
    out.potential_trace.push_back(potential_of(problem, eq, state_n, sol.d));
    // The trigger is only a guess, so the first increment is measured from d_n.
    last_diff = max_abs_diff(sol.d, k == 0 ? std::span<const double>(state_n.damage)
                                           : std::span<const double>(d));
    // Mixing can also converge to an unstable fixed point (the homogeneous
    // solution past the peak), so it only starts once plain steps contract
    // or flip direction.
    std::vector<double> residual(n);
    for (int i = 0; i < n; ++i) residual[i] = sol.d[i] - d[i];
    double turn = 0.0;
    for (int i = 0; i < n && !last_residual.empty(); ++i) turn += residual[i] * last_residual[i];
    contracting = (!history.empty() && (last_diff < history.back() || turn < 0.0))
                      ? contracting + 1
                      : 0;
    last_residual = std::move(residual);
    history.push_back(last_diff);
    free_elements = sol.free_count;
    ++k;
    if (acceleration_depth > 0 && contracting >= kContractingSteps) {
      d = project_feasible(dp, mixer.mix(d, sol.d), problem.solver.damage);
    } else {
      d = sol.d;
    }
  }

  const DamageProblem final_problem = damage_problem(problem, out.state, state_n);
  out.record.kkt_violation = kkt_audit(final_problem, d, state_n.plastic_strain,
                                       state_n.cumulative_plastic);
  out.record.alternations = k;
  out.record.free_elements = free_elements;
  out.record.load = out.state.load;
  out.record.mean_strain = out.state.load / problem.mesh.length();
  out.record.mean_stress = mean_stress(problem.mesh, out.state);
  out.record.max_damage = *std::max_element(d.begin(), d.end());
  return out;
}

}  // namespace

StepOutcome run_step(const BarProblem& problem, const BarState& state_n, double target_load) {
  Equilibrate equilibrate{problem, state_n, shifted_start(problem.mesh, state_n, target_load)};
  return alternate(
      problem, state_n, [&](std::span<const double> d) { return equilibrate(d, target_load); },
      0);
}

StepOutcome run_snapback(const BarProblem& problem, const BarState& state_n,
                         double strain_increment) {
  if (!(strain_increment > 0.0)) throw InvalidArgument("strain increment must be positive");
  Equilibrate equilibrate{problem, state_n, state_n.u};
  double load_guess = state_n.load + strain_increment * problem.mesh.length();
  return alternate(problem, state_n, [&](std::span<const double> d) {
    return controlled_equilibrium(problem, state_n, equilibrate, d, strain_increment, load_guess);
  }, problem.solver.snapback_acceleration);
}

double external_work(std::span<const StepRecord> records, double length) {
  double w = 0.0;
  for (std::size_t i = 1; i < records.size(); ++i) {
    w += 0.5 * (records[i].mean_stress + records[i - 1].mean_stress) *
         (records[i].mean_strain - records[i - 1].mean_strain);
  }
  return w * length;
}

double dissipated_energy(std::span<const StepRecord> records, double length) {
  double peak = 0.0;
  for (const auto& r : records) peak = std::max(peak, std::abs(r.mean_stress));
  if (!records.empty() && std::abs(records.back().mean_stress) > 0.01 * peak) {
    throw PreconditionError("run was not driven to failure (final stress above 1% of peak)");
  }
  return external_work(records, length);
}

namespace {

ProfileSnapshot snapshot(const Mesh1D& mesh, int step, const BarState& s) {
  return {step, s.strains(mesh), s.plastic_strain, s.cumulative_plastic, s.damage};
}

}  // namespace

RunResult run_scenario(const BarProblem& problem) {
  problem.model.validate();
  problem.load.validate();
  const Mesh1D& mesh = problem.mesh;

  RunResult result;
  BarState state = BarState::zero(mesh);
  state.body_force = oscillatory_body_force(mesh, problem.load.body_force_amplitude);
  result.records.push_back(StepRecord{});

  auto wants_snapshot = [&](int step) {
    return std::find(problem.snapshot_steps.begin(), problem.snapshot_steps.end(), step) !=
           problem.snapshot_steps.end();
  };
  if (wants_snapshot(0)) result.snapshots.push_back(snapshot(mesh, 0, state));

  auto accept = [&](int step, StepOutcome&& out) {
    StepRecord rec = out.record;
    rec.step = step;
    const StepRecord& prev = result.records.back();
    rec.work_increment = 0.5 * (rec.mean_stress + prev.mean_stress) *
                         (rec.mean_strain - prev.mean_strain) * mesh.length();
    for (int e = 0; e < mesh.element_count(); ++e) {
      if (out.state.damage[e] < state.damage[e]) result.irreversible = false;
    }
    if (problem.regularized() &&
        !is_lip(mesh, out.state.damage, problem.length, 1e-8 / mesh.element_size())) {
      result.lipschitz_feasible = false;
    }
    result.peak_stress = std::max(result.peak_stress, rec.mean_stress);
    result.total_alternations += rec.alternations;
    result.max_kkt_violation = std::max(result.max_kkt_violation, rec.kkt_violation);
    result.records.push_back(rec);
    state = std::move(out.state);
    if (wants_snapshot(step)) result.snapshots.push_back(snapshot(mesh, step, state));
  };

  int step = 0;
  try {
    if (problem.load.kind == LoadProgram::Kind::ImposedDisplacement) {
      for (double load : problem.load.displacement_path()) {
        ++step;
        accept(step, run_step(problem, state, load));
      }
    } else {
      for (step = 1; step <= problem.load.max_steps; ++step) {
        accept(step, run_snapback(problem, state, problem.load.strain_increment));
        const double s = result.records.back().mean_stress;
        if (s < result.peak_stress && s <= problem.load.stop_stress_ratio * result.peak_stress) {
          break;
        }
      }
      step = std::min(step, problem.load.max_steps);
    }
  } catch (const NonConvergence& e) {
    throw StepFailure(step, e.what());
  } catch (const SingularSystem& e) {
    throw StepFailure(step, e.what());
  }

  const int last = result.records.back().step;
  if (result.snapshots.empty() || result.snapshots.back().step != last) {
    result.snapshots.push_back(snapshot(mesh, last, state));
  }
  result.final_state = std::move(state);
  return result;
}

std::vector<PointRecord> run_material_point(const MaterialModel& model,
                                            std::span<const StrainTarget> targets, int substeps,
                                            const SolverOptions& options) {
  model.validate();
  if (substeps < 1) throw InvalidArgument("substeps must be >= 1");
  std::vector<PointRecord> out(1);
  PointState n_state{};
  int step = 0;
  for (const StrainTarget& target : targets) {
    // Zero stress is reached at eps = eps_p for every model.
    const double end = target ? *target : n_state.plastic_strain;
    for (double eps : linear_segment(n_state.strain, end, substeps)) {
      ++step;
      double d = n_state.damage;
      double previous = n_state.damage;
      double last_diff = std::numeric_limits<double>::infinity();
      ReturnMapResult rm{};
      for (int k = 0;; ++k) {
        rm = return_map(model, eps, n_state.plastic_strain, n_state.cumulative_plastic, d);
        const PointState trial{eps, rm.plastic_strain, rm.cumulative_plastic, d};
        if (k >= 1 && last_diff <= options.alternation_tol &&
            local_kkt_residual(model, trial, n_state.damage) <= options.kkt_tol) {
          break;
        }
        if (k >= options.max_alternations) {
          throw StepFailure(step, "pointwise alternate minimization did not converge");
        }
        const double next = local_trial(model, eps, rm.plastic_strain, rm.cumulative_plastic,
                                        n_state.damage, options.damage);
        last_diff = std::abs(next - previous);
        d = next;
        previous = next;
      }
      const PointState s{eps, rm.plastic_strain, rm.cumulative_plastic, d};
      PointRecord rec{step, eps, rm.stress, d, rm.plastic_strain, rm.cumulative_plastic,
                      kkt_check(model, s, n_state, 1e-12).max_violation};
      out.push_back(rec);
      n_state = s;
    }
  }
  return out;
}

}  // namespace lipfield
