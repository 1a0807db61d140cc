#pragma once

#include <span>
#include <vector>

namespace lipfield {

/**
 * Uniform 1-D mesh of [0, L] with N two-node elements.
 *
 * Displacements live at the N+1 nodes, every internal variable (damage
 * included) at the single integration point of each element, i.e. its
 * centroid. The domain is an interval, so the path distance between two
 * centroids is |x_i - x_j| = h |i - j|.
 */
class Mesh1D {
 public:
  Mesh1D(double length, int element_count);

  double length() const noexcept { return length_; }
  int element_count() const noexcept { return static_cast<int>(centroids_.size()); }
  int node_count() const noexcept { return static_cast<int>(nodes_.size()); }
  double element_size() const noexcept { return h_; }

  std::span<const double> nodes() const noexcept { return nodes_; }
  std::span<const double> centroids() const noexcept { return centroids_; }

  /// Path distance between the centroids of elements i and j.
  double centroid_distance(int i, int j) const;

 private:
  double length_;
  double h_;
  std::vector<double> nodes_;
  std::vector<double> centroids_;
};

Mesh1D build_uniform_mesh(double length, int element_count);

}  // namespace lipfield
