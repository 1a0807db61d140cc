#include <doctest.h>

#include "lipfield/errors.hpp"
#include "lipfield/mesh.hpp"

using namespace lipfield;

TEST_CASE("uniform mesh geometry") {
  const Mesh1D m = build_uniform_mesh(1.0, 4);
  CHECK(m.element_size() == doctest::Approx(0.25));
  REQUIRE(m.centroids().size() == 4);
  CHECK(m.centroids()[0] == doctest::Approx(0.125));
  CHECK(m.centroids()[1] == doctest::Approx(0.375));
  CHECK(m.centroids()[2] == doctest::Approx(0.625));
  CHECK(m.centroids()[3] == doctest::Approx(0.875));

  const Mesh1D one = build_uniform_mesh(1.0, 1);
  CHECK(one.element_count() == 1);
  CHECK(one.centroids()[0] == doctest::Approx(0.5));

  const Mesh1D two = build_uniform_mesh(2.0, 8);
  CHECK(two.element_size() == doctest::Approx(0.25));
  CHECK(two.node_count() == 9);
  CHECK(two.nodes()[8] == 2.0);
}

TEST_CASE("mesh rejects non-positive sizes") {
  CHECK_THROWS_AS(build_uniform_mesh(0.0, 4), InvalidArgument);
  CHECK_THROWS_AS(build_uniform_mesh(-1.0, 4), InvalidArgument);
  CHECK_THROWS_AS(build_uniform_mesh(1.0, 0), InvalidArgument);
  CHECK_THROWS_AS(build_uniform_mesh(1.0, -3), InvalidArgument);
}

TEST_CASE("centroid distance") {
  const Mesh1D m5 = build_uniform_mesh(1.0, 5);  // h = 0.2
  CHECK(m5.centroid_distance(1, 1) == 0.0);
  CHECK(m5.centroid_distance(0, 4) == doctest::Approx(0.8));
  const Mesh1D m4 = build_uniform_mesh(1.0, 4);
  CHECK(m4.centroid_distance(3, 1) == doctest::Approx(0.5));
  CHECK(m4.centroid_distance(1, 3) == m4.centroid_distance(3, 1));
  CHECK_THROWS_AS(m4.centroid_distance(0, 4), InvalidArgument);
  CHECK_THROWS_AS(m4.centroid_distance(-1, 0), InvalidArgument);
}
