#include <random>
#include <vector>

#include <doctest.h>

#include "lipfield/checks.hpp"
#include "lipfield/errors.hpp"
#include "lipfield/lipschitz.hpp"

using namespace lipfield;
using doctest::Approx;

namespace {

void check_field(const DamageField& got, const std::vector<double>& want, double tol = 1e-12) {
  REQUIRE(got.size() == want.size());
  for (std::size_t i = 0; i < want.size(); ++i) {
    CAPTURE(i);
    CHECK(got[i] == Approx(want[i]).epsilon(tol).scale(1.0));
  }
}

}  // namespace

TEST_CASE("Lipschitz constant") {
  const Mesh1D m5 = build_uniform_mesh(1.0, 5);
  CHECK(lip_constant(m5, std::vector<double>(5, 0.3)) == 0.0);
  const std::vector<double> spike = {0, 0, 1, 0, 0};
  CHECK(lip_constant(m5, spike) == Approx(5.0));
  CHECK(lip_constant(build_uniform_mesh(1.0, 1), std::vector<double>{0.7}) == 0.0);

  const Mesh1D m3 = build_uniform_mesh(0.6, 3);  // h = 0.2
  const std::vector<double> ramp = {0.0, 0.4, 0.8};
  CHECK(lip_constant(m3, ramp) == Approx(2.0));
  CHECK_THROWS_AS(lip_constant(m5, ramp), InvalidArgument);
}

TEST_CASE("Lip set membership") {
  const Mesh1D m5 = build_uniform_mesh(1.0, 5);
  for (double l : {0.01, 0.5, 10.0}) CHECK(is_lip(m5, std::vector<double>(5, 0.4), l));
  CHECK_FALSE(is_lip(m5, std::vector<double>{0, 0, 1, 0, 0}, 0.5));
  const Mesh1D m3 = build_uniform_mesh(0.6, 3);
  CHECK(is_lip(m3, std::vector<double>{0.0, 0.4, 0.8}, 0.5, 0.0));
  CHECK(is_lip(m3, std::vector<double>{0.0, 0.4, 0.8}, 0.5, 1e-9));
}

TEST_CASE("projections of a spike") {
  const Mesh1D m5 = build_uniform_mesh(1.0, 5);
  const std::vector<double> spike = {0, 0, 1, 0, 0};
  check_field(upper_projection(m5, spike, 0.5), {0.2, 0.6, 1.0, 0.6, 0.2});
  check_field(lower_projection(m5, spike, 0.5), {0.0, 0.0, 0.4, 0.0, 0.0});
  check_field(upper_projection(m5, spike, 0.5), checks::all_pairs_upper(m5, spike, 0.5));
  check_field(lower_projection(m5, spike, 0.5), checks::all_pairs_lower(m5, spike, 0.5));
}

TEST_CASE("projections fix Lipschitz and constant fields") {
  const Mesh1D m5 = build_uniform_mesh(1.0, 5);
  const std::vector<double> lip = {0.1, 0.3, 0.5, 0.4, 0.2};  // slopes <= 1 with l = 0.2
  CHECK(is_lip(m5, lip, 0.2, 1e-12));
  check_field(lower_projection(m5, lip, 0.2), lip);
  check_field(upper_projection(m5, lip, 0.2), lip);
  const std::vector<double> c(5, 0.37);
  check_field(lower_projection(m5, c, 0.05), c);
  check_field(upper_projection(m5, c, 0.05), c);
}

TEST_CASE("projections agree with the all-pairs definition on random fields") {
  std::mt19937_64 rng(11);
  for (int n : {1, 2, 7, 40}) {
    const Mesh1D mesh = build_uniform_mesh(1.0, n);
    for (int k = 0; k < 20; ++k) {
      const DamageField d = checks::random_field(rng, n);
      const double l = 0.05 + 0.1 * k;
      check_field(lower_projection(mesh, d, l), checks::all_pairs_lower(mesh, d, l), 1e-14);
      check_field(upper_projection(mesh, d, l), checks::all_pairs_upper(mesh, d, l), 1e-14);
    }
  }
}

TEST_CASE("bounds and free zone") {
  const Mesh1D m5 = build_uniform_mesh(1.0, 5);
  const std::vector<double> zero(5, 0.0);

  const std::vector<double> lip = {0.1, 0.3, 0.5, 0.4, 0.2};
  const BoundsResult a = compute_bounds(m5, zero, lip, 0.2);
  CHECK(a.free_elements.empty());
  CHECK(a.chain_holds);

  const BoundsResult b = compute_bounds(m5, zero, std::vector<double>{0, 0, 1, 0, 0}, 0.5);
  CHECK(b.free_elements == std::vector<int>{0, 1, 2, 3, 4});
  CHECK(b.chain_holds);

  // N = 21, h = 0.05, l = 0.1: the upper bound vanishes two elements away from
  // the spike and the lower bound is nonzero only on it, so the free zone is
  // the spike and its two neighbors.
  const Mesh1D m21 = build_uniform_mesh(1.05, 21);
  std::vector<double> spike(21, 0.0);
  spike[10] = 1.0;
  const BoundsResult c = compute_bounds(m21, std::vector<double>(21, 0.0), spike, 0.1);
  CHECK(c.free_elements == std::vector<int>{9, 10, 11});
  for (int i = 0; i < 21; ++i) {
    if (i < 9 || i > 11) {
      CHECK(c.lower[i] == 0.0);
      CHECK(c.upper[i] == Approx(0.0).scale(1.0));
    }
  }
  check_field(c.upper, checks::all_pairs_upper(m21, spike, 0.1));
  check_field(c.lower, checks::all_pairs_lower(m21, spike, 0.1));
}

TEST_CASE("bounds reject an infeasible previous field") {
  const Mesh1D m5 = build_uniform_mesh(1.0, 5);
  const std::vector<double> bad = {0, 0, 1, 0, 0};
  CHECK_THROWS_AS(compute_bounds(m5, bad, bad, 0.5), PreconditionError);
}
