#include "lipfield/mesh.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

#include "lipfield/errors.hpp"

namespace lipfield {

Mesh1D::Mesh1D(double length, int element_count) : length_(length) {
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw InvalidArgument("mesh length must be positive, got " + std::to_string(length));
  }
  if (element_count < 1) {
    throw InvalidArgument("element count must be >= 1, got " + std::to_string(element_count));
  }
  h_ = length / element_count;
  nodes_.resize(element_count + 1);
  for (int i = 0; i <= element_count; ++i) nodes_[i] = i * h_;
  nodes_.back() = length;
  centroids_.resize(element_count);
  for (int i = 0; i < element_count; ++i) centroids_[i] = (i + 0.5) * h_;
}

double Mesh1D::centroid_distance(int i, int j) const {
  const int n = element_count();
  if (i < 0 || i >= n || j < 0 || j >= n) {
    throw InvalidArgument("element index out of range");
  }
  return h_ * std::abs(i - j);
}

Mesh1D build_uniform_mesh(double length, int element_count) {
  return Mesh1D(length, element_count);
}

}  // namespace lipfield
