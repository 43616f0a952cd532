#pragma once

#include "spinodal/common.hpp"

namespace spinodal {

/// Cartesian tensor grid on [-R, R]^n, clipped to the closed ball |x| <= R
/// for domain purposes. Storage and index arithmetic run over the full cube;
/// the ball clip decides which nodes are serialized and which cells count as
/// domain cells. points_per_axis is odd so the origin is a node.
struct GridSpec {
  int n = 0;
  double R = 1.0;
  int points_per_axis = 65;
  int sphere_nodes = 512;  // target node count of the per-sphere rule

  double h() const { return 2.0 * R / (points_per_axis - 1); }
  std::size_t node_count() const;

  /// Row-major flat index (axis 0 slowest).
  std::size_t flat_index(const std::vector<int>& idx) const;
  std::vector<int> multi_index(std::size_t flat) const;
  RVector node_coord(const std::vector<int>& idx) const;
  bool inside_ball(const std::vector<int>& idx) const;

  void validate() const;
};

/// Per-axis interpolation stencil: base node index and node weights.
struct AxisWeights {
  int base = 0;
  double w[4] = {0, 0, 0, 0};
  int count = 0;
};

/// Tensor-product Lagrange interpolation weights along one axis for the
/// coordinate value x in [-R, R]. order 2 = multilinear (2 nodes, O(h^2)),
/// order 4 = cubic (4 nodes, O(h^4)).
AxisWeights axis_interp_weights(const GridSpec& grid, int axis_coord_unused,
                                double x, int order);

}  // namespace spinodal
