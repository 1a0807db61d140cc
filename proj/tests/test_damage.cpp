#include <cmath>
#include <random>

#include <doctest.h>

#include "lipfield/checks.hpp"
#include "lipfield/damage_update.hpp"
#include "lipfield/errors.hpp"

using namespace lipfield;
using doctest::Approx;

namespace {

DamageProblem elastic_problem(std::vector<double> strain, double length, double L = 1.0) {
  const int n = static_cast<int>(strain.size());
  DamageProblem p{build_uniform_mesh(L, n),
                  MaterialModel::softening_elasticity(1.0, 1.0, SofteningFunction::h1()),
                  std::move(strain),
                  std::vector<double>(n, 0.0),
                  std::vector<double>(n, 0.0),
                  DamageField(n, 0.0),
                  length};
  return p;
}

// Strain with local trial damage d for E = Yc = 1 and h1: f_e = (1 + 3d) / (1 - d).
double strain_for_trial(double d) { return std::sqrt(2.0 * (1.0 + 3.0 * d) / (1.0 - d)); }

}  // namespace

TEST_CASE("Lipschitz trial is returned unchanged") {
  const double s = strain_for_trial(0.2);
  const DamageProblem p = elastic_problem({s, s, s, s}, 0.5);
  const DamageSolution sol = solve_damage(p);
  CHECK(sol.iterations == 0);
  CHECK(sol.free_count == 0);
  for (int i = 0; i < 4; ++i) CHECK(sol.d[i] == sol.trial[i]);
  CHECK(sol.d[0] == Approx(0.2));
}

TEST_CASE("four element toy problem matches the oracle") {
  // l = 2h with h = 0.25; trial (0, 0.8, 0, 0).
  const DamageProblem p = elastic_problem({0.0, strain_for_trial(0.8), 0.0, 0.0}, 0.5);
  const DamageSolution sol = solve_damage(p);
  CHECK(sol.trial[1] == Approx(0.8));
  CHECK(sol.trial[0] == 0.0);
  CHECK(sol.free_count > 0);
  const DamageField oracle = brute_force_oracle(p, 41);
  for (int i = 0; i < 4; ++i) {
    CAPTURE(i);
    CHECK(std::abs(sol.d[i] - oracle[i]) <= 1e-4);
    CHECK(sol.d[i] >= sol.bounds.lower[i] - 1e-12);
    CHECK(sol.d[i] <= sol.bounds.upper[i] + 1e-12);
  }
  CHECK(damage_objective(p, sol.d) <= damage_objective(p, oracle) + 1e-12);
  CHECK(is_lip(p.mesh, sol.d, p.length, 1e-12));
  CHECK(sol.kkt_residual <= 1e-9);
}

TEST_CASE("solution lies between the projected bounds") {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 50; ++k) {
    const DamageProblem p = checks::random_damage_problem(rng, 2 + k % 30, 0.05 + 0.02 * k);
    const DamageSolution sol = solve_damage(p);
    for (std::size_t i = 0; i < sol.d.size(); ++i) {
      CHECK(sol.d[i] >= sol.bounds.lower[i] - 1e-12);
      CHECK(sol.d[i] <= sol.bounds.upper[i] + 1e-12);
      CHECK(sol.d[i] >= p.d_n[i]);
    }
    CHECK(sol.kkt_residual <= 1e-6);
  }
}

TEST_CASE("damage iteration cap") {
  const DamageProblem p = elastic_problem({0.0, strain_for_trial(0.8), 0.0, 0.0}, 0.5);
  DamageOptions o;
  o.max_iterations = 0;
  CHECK_THROWS_AS(solve_damage(p, o), NonConvergence);
}

TEST_CASE("damage problem validation") {
  DamageProblem p = elastic_problem({0.0, 0.0, 0.0}, 1.0);
  p.d_n = {0.0, 0.9, 0.0};
  CHECK_THROWS_AS(solve_damage(p), PreconditionError);
  p.d_n = {0.0, 0.0};
  CHECK_THROWS_AS(solve_damage(p), InvalidArgument);
}

TEST_CASE("oracle degenerate cases") {
  SUBCASE("single element equals the local trial") {
    const DamageProblem p = elastic_problem({strain_for_trial(0.37)}, 0.3);
    CHECK(brute_force_oracle(p, 41)[0] == Approx(0.37).epsilon(1e-6));
  }
  SUBCASE("slack constraints give independent trials") {
    const DamageProblem p = elastic_problem({strain_for_trial(0.1), strain_for_trial(0.6)}, 0.01);
    const DamageField o = brute_force_oracle(p, 41);
    CHECK(o[0] == Approx(0.1).epsilon(1e-6));
    CHECK(o[1] == Approx(0.6).epsilon(1e-6));
  }
  SUBCASE("empty grid") {
    DamageProblem p = elastic_problem({0.0}, 0.3);
    p.d_n = {1.0};
    CHECK_THROWS_AS(brute_force_oracle(p, 41), PreconditionError);
  }
  SUBCASE("size and grid limits") {
    CHECK_THROWS_AS(brute_force_oracle(elastic_problem(std::vector<double>(7, 0.0), 0.3), 11),
                    InvalidArgument);
    CHECK_THROWS_AS(brute_force_oracle(elastic_problem({0.0}, 0.3), 1), InvalidArgument);
  }
}

TEST_CASE("local model needs no coupling") {
  const DamageProblem p = elastic_problem({strain_for_trial(0.1), strain_for_trial(0.9)}, 0.0);
  const DamageSolution sol = solve_damage(p);
  CHECK(sol.d[0] == Approx(0.1));
  CHECK(sol.d[1] == Approx(0.9));
}
