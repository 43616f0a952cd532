#include "spinodal/grid.hpp"

#include <cmath>

namespace spinodal {

std::size_t GridSpec::node_count() const {
  std::size_t c = 1;
  for (int a = 0; a < n; ++a) c *= static_cast<std::size_t>(points_per_axis);
  return c;
}

std::size_t GridSpec::flat_index(const std::vector<int>& idx) const {
  std::size_t flat = 0;
  for (int a = 0; a < n; ++a) {
    flat = flat * static_cast<std::size_t>(points_per_axis) +
           static_cast<std::size_t>(idx[static_cast<std::size_t>(a)]);
  }
  return flat;
}

std::vector<int> GridSpec::multi_index(std::size_t flat) const {
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  for (int a = n - 1; a >= 0; --a) {
    idx[static_cast<std::size_t>(a)] =
        static_cast<int>(flat % static_cast<std::size_t>(points_per_axis));
    flat /= static_cast<std::size_t>(points_per_axis);
  }
  return idx;
}

RVector GridSpec::node_coord(const std::vector<int>& idx) const {
  RVector x(n);
  const double step = h();
  for (int a = 0; a < n; ++a) {
    x[a] = -R + step * idx[static_cast<std::size_t>(a)];
  }
  return x;
}

bool GridSpec::inside_ball(const std::vector<int>& idx) const {
  return node_coord(idx).squaredNorm() <= R * R * (1.0 + 1e-12);
}

void GridSpec::validate() const {
  require(n >= 1 && n <= 8, ErrorKind::invalid_dimension,
          "grid dimension out of range: " + std::to_string(n));
  require(R > 0.0, ErrorKind::domain, "grid radius must be positive");
  require(points_per_axis >= 9, ErrorKind::resolution,
          "grid needs at least nine points per axis");
  require(points_per_axis % 2 == 1, ErrorKind::resolution,
          "points_per_axis must be odd so the origin is a node");
  require(sphere_nodes >= 8, ErrorKind::resolution,
          "sphere rule needs at least eight nodes");
}

AxisWeights axis_interp_weights(const GridSpec& grid, int, double x,
                                int order) {
  require(order == 2 || order == 4, ErrorKind::resolution,
          "interpolation order must be 2 or 4");
  const int m = grid.points_per_axis;
  const double step = grid.h();
  const double s = (x + grid.R) / step;  // fractional node coordinate
  AxisWeights aw;
  if (order == 2) {
    int i0 = static_cast<int>(std::floor(s));
    if (i0 < 0) i0 = 0;
    if (i0 > m - 2) i0 = m - 2;
    const double t = s - i0;
    aw.base = i0;
    aw.count = 2;
    aw.w[0] = 1.0 - t;
    aw.w[1] = t;
  } else {
    int i0 = static_cast<int>(std::floor(s)) - 1;
    if (i0 < 0) i0 = 0;
    if (i0 > m - 4) i0 = m - 4;
    const double t = s - (i0 + 1);  // offset from second node of the four
    aw.base = i0;
    aw.count = 4;
    aw.w[0] = -t * (t - 1.0) * (t - 2.0) / 6.0;
    aw.w[1] = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
    aw.w[2] = -(t + 1.0) * t * (t - 2.0) / 2.0;
    aw.w[3] = (t + 1.0) * t * (t - 1.0) / 6.0;
  }
  return aw;
}

}  // namespace spinodal
