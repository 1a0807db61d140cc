#include <cmath>
#include <random>

#include <doctest.h>

#include "lipfield/equilibrium.hpp"
#include "lipfield/errors.hpp"

using namespace lipfield;
using doctest::Approx;

namespace {

std::vector<double> zeros(int n) { return std::vector<double>(n, 0.0); }

// Dense Gaussian elimination with partial pivoting.
std::vector<double> dense_solve(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(a[r][c]) > std::abs(a[p][c])) p = r;
    }
    std::swap(a[c], a[p]);
    std::swap(b[c], b[p]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= a[i][k] * x[k];
    x[i] = s / a[i][i];
  }
  return x;
}

}  // namespace

TEST_CASE("tridiagonal solver") {
  SUBCASE("identity") {
    TridiagonalSystem s{{0, 0, 0}, {1, 1, 1}, {0, 0, 0}, {3, -1, 2}};
    const auto x = solve_tridiagonal(s);
    CHECK(x == std::vector<double>{3, -1, 2});
  }
  SUBCASE("two by two") {
    TridiagonalSystem s{{0, -1}, {2, 2}, {-1, 0}, {1, 0}};
    const auto x = solve_tridiagonal(s);
    CHECK(x[0] == Approx(2.0 / 3.0));
    CHECK(x[1] == Approx(1.0 / 3.0));
  }
  SUBCASE("random SPD against a dense solve") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const int n = 50;
    TridiagonalSystem s;
    s.sub.assign(n, 0.0);
    s.super.assign(n, 0.0);
    s.main.assign(n, 0.0);
    s.rhs.assign(n, 0.0);
    for (int i = 1; i < n; ++i) s.sub[i] = s.super[i - 1] = u(rng);
    for (int i = 0; i < n; ++i) {
      s.main[i] = 2.0 + std::abs(u(rng)) + std::abs(s.sub[i]) + std::abs(s.super[i]);
      s.rhs[i] = u(rng);
    }
    std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i) {
      a[i][i] = s.main[i];
      if (i > 0) a[i][i - 1] = s.sub[i];
      if (i + 1 < n) a[i][i + 1] = s.super[i];
    }
    const auto x = solve_tridiagonal(s);
    const auto ref = dense_solve(a, s.rhs);
    for (int i = 0; i < n; ++i) CHECK(std::abs(x[i] - ref[i]) <= 1e-10);
  }
  SUBCASE("zero pivot") {
    TridiagonalSystem s{{0, 1}, {0, 1}, {1, 0}, {1, 1}};
    CHECK_THROWS_AS(solve_tridiagonal(s), SingularSystem);
  }
}

TEST_CASE("assembly") {
  const auto model = MaterialModel::softening_elasticity(1.0, 1.0, SofteningFunction::h1());
  SUBCASE("single element stiffness E/h") {
    const Mesh1D m = build_uniform_mesh(0.5, 1);
    const Assembly a = assemble(m, model, std::vector<double>{0.0, 0.1}, zeros(1), zeros(1),
                                zeros(1), {});
    CHECK(a.raw.main[0] == Approx(2.0));
    CHECK(a.raw.super[0] == Approx(-2.0));
  }
  SUBCASE("two elements, interior row") {
    const Mesh1D m = build_uniform_mesh(1.0, 2);
    const Assembly a = assemble(m, model, zeros(3), zeros(2), zeros(2), zeros(2), {});
    CHECK(a.raw.sub[1] == Approx(-2.0));
    CHECK(a.raw.main[1] == Approx(4.0));
    CHECK(a.raw.super[1] == Approx(-2.0));
    for (double r : a.residual) CHECK(r == 0.0);
  }
}

TEST_CASE("equilibrium solve") {
  const auto elastic = MaterialModel::softening_elasticity(1.0, 1.0, SofteningFunction::h1());
  const auto plastic = MaterialModel::softening_plasticity(1.0, 1.0 / 16.0, 4.0);
  const auto combined =
      MaterialModel::softening_elasto_hardening_plasticity(2.0, 1.0, 1.0, 1.0, SofteningFunction::h1());
  const Mesh1D mesh = build_uniform_mesh(1.0, 8);

  SUBCASE("linear at fixed damage: one Newton iteration") {
    const std::vector<double> d = {0.0, 0.1, 0.3, 0.7, 0.2, 0.0, 0.05, 0.4};
    const BarState s = equilibrium_solve(mesh, elastic, zeros(9), zeros(8), zeros(8), d, 0.3, {});
    CHECK(s.newton_iterations == 1);
    for (int e = 1; e < 8; ++e) CHECK(s.stress[e] == Approx(s.stress[0]).epsilon(1e-10));
  }
  SUBCASE("homogeneous bar has uniform strain") {
    for (const MaterialModel& m : {elastic, plastic, combined}) {
      const BarState s = equilibrium_solve(mesh, m, zeros(9), zeros(8), zeros(8), zeros(8), 0.7, {});
      for (int e = 0; e < 8; ++e) CHECK(s.strain(mesh, e) == Approx(0.7).epsilon(1e-12));
    }
  }
  SUBCASE("zero load gives the zero state") {
    const BarState s = equilibrium_solve(mesh, combined, zeros(9), zeros(8), zeros(8), zeros(8), 0.0, {});
    for (double v : s.u) CHECK(v == 0.0);
    for (double v : s.stress) CHECK(v == 0.0);
    CHECK(s.newton_iterations == 0);
  }
  SUBCASE("iteration cap reports the residual history") {
    EquilibriumOptions o;
    o.max_iterations = 1;
    std::vector<double> d(8, 0.0);
    d[3] = 0.5;
    try {
      equilibrium_solve(mesh, plastic, zeros(9), zeros(8), zeros(8), d, 0.5, {}, o);
      FAIL("expected NonConvergence");
    } catch (const NonConvergence& e) {
      CHECK(e.history().size() == 2);
    }
  }
  SUBCASE("bad start size") {
    CHECK_THROWS_AS(equilibrium_solve(mesh, elastic, zeros(8), zeros(8), zeros(8), zeros(8), 0.1, {}),
                    InvalidArgument);
  }
}

TEST_CASE("body force equilibrium") {
  const auto elastic = MaterialModel::softening_elasticity(1.0, 1.0, SofteningFunction::h1());
  const Mesh1D mesh = build_uniform_mesh(1.0, 64);
  const auto f = oscillatory_body_force(mesh, 0.1);
  const BarState s = equilibrium_solve(mesh, elastic, zeros(65), zeros(64), zeros(64), zeros(64), 0.2, f);
  const Assembly a = assemble(mesh, elastic, s.u, zeros(64), zeros(64), zeros(64), f);
  for (int i = 1; i < 64; ++i) CHECK(std::abs(a.residual[i]) <= 1e-9);
  // Nodal balance: the stress jump across a node carries its body force share.
  const double h = mesh.element_size();
  for (int i = 1; i < 64; ++i) {
    CHECK(s.stress[i] - s.stress[i - 1] == Approx(-0.5 * h * (f[i - 1] + f[i])).scale(1e-9));
  }
}
