#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nonloc/geometry.hpp"

namespace nonloc {

// Complete 2^dim-ary tree over the dyadic subdivision of [0,1]^dim down to
// level L = log2(n). Panels are addressed arithmetically; no node storage.
struct Tree {
  Grid grid;
  int depth = 1;  // L

  std::int64_t panels_at(int level) const;
  // Children ordered axis-major: bit j of `which` selects the upper half
  // along axis j.
  PanelId child(const PanelId& id, int which) const;
  PanelId parent(const PanelId& id) const;
  Aabb bounds(const PanelId& id) const { return panel_bounds(grid.dim, id); }
  bool is_leaf(const PanelId& id) const { return id.level == depth; }
};

Tree build_tree(const Grid& grid);

// Panels whose disjoint union covers H_x ∩ Ω at leaf resolution, plus the
// recursion-call count (the Step-1 complexity instrument).
struct Decomposition {
  Point center{};
  double radius = 0.0;
  std::vector<PanelId> panels;
  std::int64_t recur_calls = 0;
};

Decomposition decompose_region(const Tree& tree, const Point& center,
                               double radius);

// Per-panel partial sums M_m(Q) = sum_{x_k in Q} x_k^m u(x_k), m = 0..2K
// (first coordinate; K = 0 only for dim >= 2, where a single M_0 is kept).
struct MomentTable {
  int num_moments = 1;
  std::vector<std::vector<double>> levels;  // [level][panel * num_moments + m]

  double moment(const PanelId& id, int m) const {
    return levels[id.level][id.index * num_moments + m];
  }
};

MomentTable accumulate_moments(const Tree& tree, std::span<const double> u,
                               int K, std::int64_t* add_count = nullptr);

// Total recur invocations to decompose all N per-node balls B_{radii[i]}(x_i).
std::int64_t count_recur_calls(const Tree& tree,
                               std::span<const double> radii);

}  // namespace nonloc
