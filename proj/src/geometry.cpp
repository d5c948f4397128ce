#include "nonloc/geometry.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace nonloc {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

Grid Grid::make(int dim, int n) {
  if (dim < 1 || dim > 3)
    throw std::invalid_argument("grid dimension must be 1, 2 or 3");
  if (!is_power_of_two(n) || n < 2)
    throw std::invalid_argument("grid n must be a power of two >= 2, got " +
                                std::to_string(n));
  Grid g;
  g.dim = dim;
  g.n = n;
  g.h = 1.0 / n;
  g.total = 1;
  for (int j = 0; j < dim; ++j) g.total *= n;
  return g;
}

int Grid::levels() const {
  int l = 0;
  for (int m = n; m > 1; m >>= 1) ++l;
  return l;
}

Aabb panel_bounds(int dim, const PanelId& id) {
  const double w = 1.0 / static_cast<double>(std::int64_t{1} << id.level);
  const std::int64_t per_axis = std::int64_t{1} << id.level;
  Aabb box;
  std::int64_t rest = id.index;
  // row-major: axis 0 slowest, axis dim-1 fastest
  for (int j = dim - 1; j >= 0; --j) {
    const std::int64_t k = rest % per_axis;
    rest /= per_axis;
    box.min[j] = static_cast<double>(k) * w;
    box.max[j] = static_cast<double>(k + 1) * w;
  }
  return box;
}

bool cube_inside_ball(int dim, const Aabb& box, const Point& center,
                      double r) {
  const double r2 = r * r;
  const int corners = 1 << dim;
  for (int c = 0; c < corners; ++c) {
    double d2 = 0.0;
    for (int j = 0; j < dim; ++j) {
      const double v = ((c >> j) & 1) ? box.max[j] : box.min[j];
      const double d = v - center[j];
      d2 += d * d;
    }
    if (d2 > r2) return false;
  }
  return true;
}

bool cube_intersects_ball(int dim, const Aabb& box, const Point& center,
                          double r) {
  double dmin = 0.0;
  for (int j = 0; j < dim; ++j) {
    if (box.min[j] > center[j]) {
      const double d = box.min[j] - center[j];
      dmin += d * d;
    } else if (box.max[j] < center[j]) {
      const double d = box.max[j] - center[j];
      dmin += d * d;
    }
  }
  return dmin < r * r;
}

Point node_position(const Grid& grid, std::int64_t flat_index) {
  const auto k = node_multi_index(grid, flat_index);
  Point x{};
  for (int j = 0; j < grid.dim; ++j)
    x[j] = (static_cast<double>(k[j]) + 0.5) * grid.h;
  return x;
}

std::array<std::int64_t, 3> node_multi_index(const Grid& grid,
                                             std::int64_t flat_index) {
  if (flat_index < 0 || flat_index >= grid.total)
    throw std::out_of_range("node index out of range");
  std::array<std::int64_t, 3> k{};
  std::int64_t rest = flat_index;
  for (int j = grid.dim - 1; j >= 0; --j) {
    k[j] = rest % grid.n;
    rest /= grid.n;
  }
  return k;
}

}  // namespace nonloc
