#pragma once

#include <array>
#include <cstdint>

namespace nonloc {

// Coordinates beyond the active dimension are zero.
using Point = std::array<double, 3>;

struct Aabb {
  Point min{};
  Point max{};
};

// Uniform cell-centered grid on [0,1]^dim with n = 2^L nodes per axis.
// Node k = (k_1..k_d) sits at ((k_1+1/2)h, ...), one node per leaf panel.
struct Grid {
  int dim = 1;
  int n = 2;
  double h = 0.5;
  std::int64_t total = 2;  // n^dim

  static Grid make(int dim, int n);
  int levels() const;  // L = log2(n)
};

// Dyadic panel: the cube prod_j [k_j/2^l, (k_j+1)/2^l], identified by its
// level and the row-major flattening of (k_1..k_d).
struct PanelId {
  int level = 0;
  std::int64_t index = 0;
};

bool is_power_of_two(int n);

Aabb panel_bounds(int dim, const PanelId& id);

// All 2^dim corners within the closed ball of radius r around center.
bool cube_inside_ball(int dim, const Aabb& box, const Point& center, double r);

// Arvo's AABB-sphere test: accumulate the squared clamp distance per axis
// and compare strictly against r^2, so grazing contact does not count.
bool cube_intersects_ball(int dim, const Aabb& box, const Point& center,
                          double r);

Point node_position(const Grid& grid, std::int64_t flat_index);
std::array<std::int64_t, 3> node_multi_index(const Grid& grid,
                                             std::int64_t flat_index);

}  // namespace nonloc
