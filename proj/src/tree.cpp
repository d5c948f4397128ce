#include "nonloc/tree.hpp"

#include <cmath>
#include <stdexcept>

namespace nonloc {

namespace {

struct PanelCursor {
  int level;
  std::int64_t k[3];  // multi-index at `level`
};

std::int64_t flatten(const Grid& grid, const PanelCursor& c) {
  const std::int64_t per_axis = std::int64_t{1} << c.level;
  std::int64_t flat = 0;
  for (int j = 0; j < grid.dim; ++j) flat = flat * per_axis + c.k[j];
  return flat;
}

Aabb cursor_bounds(const Grid& grid, const PanelCursor& c) {
  const double w = 1.0 / static_cast<double>(std::int64_t{1} << c.level);
  Aabb box;
  for (int j = 0; j < grid.dim; ++j) {
    box.min[j] = static_cast<double>(c.k[j]) * w;
    box.max[j] = static_cast<double>(c.k[j] + 1) * w;
  }
  return box;
}

// Algorithm: a panel fully inside the ball is taken whole; a partially
// intersecting panel recurses, or is taken whole when it is a leaf;
// anything else is discarded. Returns the number of recur calls.
std::int64_t recur(const Tree& tree, const PanelCursor& c, const Point& center,
                   double radius, std::vector<PanelId>* out) {
  const Grid& grid = tree.grid;
  const Aabb box = cursor_bounds(grid, c);
  std::int64_t calls = 1;
  if (cube_inside_ball(grid.dim, box, center, radius)) {
    if (out) out->push_back({c.level, flatten(grid, c)});
    return calls;
  }
  if (cube_intersects_ball(grid.dim, box, center, radius)) {
    if (c.level == tree.depth) {
      if (out) out->push_back({c.level, flatten(grid, c)});
      return calls;
    }
    const int nchild = 1 << grid.dim;
    for (int which = 0; which < nchild; ++which) {
      PanelCursor child{c.level + 1, {0, 0, 0}};
      for (int j = 0; j < grid.dim; ++j)
        child.k[j] = 2 * c.k[j] + ((which >> j) & 1);
      calls += recur(tree, child, center, radius, out);
    }
  }
  return calls;
}

}  // namespace

std::int64_t Tree::panels_at(int level) const {
  return std::int64_t{1} << (grid.dim * level);
}

PanelId Tree::child(const PanelId& id, int which) const {
  const std::int64_t per_axis = std::int64_t{1} << id.level;
  std::int64_t rest = id.index;
  std::int64_t k[3] = {0, 0, 0};
  for (int j = grid.dim - 1; j >= 0; --j) {
    k[j] = rest % per_axis;
    rest /= per_axis;
  }
  std::int64_t flat = 0;
  for (int j = 0; j < grid.dim; ++j)
    flat = flat * (2 * per_axis) + (2 * k[j] + ((which >> j) & 1));
  return {id.level + 1, flat};
}

PanelId Tree::parent(const PanelId& id) const {
  if (id.level == 0) throw std::invalid_argument("root has no parent");
  const std::int64_t per_axis = std::int64_t{1} << id.level;
  std::int64_t rest = id.index;
  std::int64_t k[3] = {0, 0, 0};
  for (int j = grid.dim - 1; j >= 0; --j) {
    k[j] = rest % per_axis;
    rest /= per_axis;
  }
  std::int64_t flat = 0;
  for (int j = 0; j < grid.dim; ++j)
    flat = flat * (per_axis / 2) + k[j] / 2;
  return {id.level - 1, flat};
}

Tree build_tree(const Grid& grid) {
  if (!is_power_of_two(grid.n))
    throw std::invalid_argument("tree requires n to be a power of two");
  Tree t;
  t.grid = grid;
  t.depth = grid.levels();
  return t;
}

Decomposition decompose_region(const Tree& tree, const Point& center,
                               double radius) {
  if (radius <= 0.0) throw std::invalid_argument("radius must be positive");
  Decomposition d;
  d.center = center;
  d.radius = radius;
  d.recur_calls = recur(tree, PanelCursor{0, {0, 0, 0}}, center, radius,
                        &d.panels);
  return d;
}

MomentTable accumulate_moments(const Tree& tree, std::span<const double> u,
                               int K, std::int64_t* add_count) {
  const Grid& grid = tree.grid;
  if (std::ssize(u) != grid.total)
    throw std::invalid_argument("u size does not match grid");
  if (K < 0 || (grid.dim >= 2 && K != 0))
    throw std::invalid_argument("moments support K >= 0 in 1d, K = 0 in 2d/3d");

  MomentTable table;
  table.num_moments = grid.dim == 1 ? 2 * K + 1 : 1;
  table.levels.resize(tree.depth + 1);
  for (int l = 0; l <= tree.depth; ++l)
    table.levels[l].assign(tree.panels_at(l) * table.num_moments, 0.0);

  auto& leaves = table.levels[tree.depth];
  for (std::int64_t i = 0; i < grid.total; ++i) {
    const double x = (static_cast<double>(i % grid.n) + 0.5) * grid.h;
    double v = u[i];
    if (grid.dim == 1) {
      for (int m = 0; m < table.num_moments; ++m) {
        leaves[i * table.num_moments + m] = v;
        v *= x;
      }
    } else {
      leaves[i] = u[i];
    }
  }

  std::int64_t adds = 0;
  const int nchild = 1 << grid.dim;
  for (int l = tree.depth - 1; l >= 0; --l) {
    auto& cur = table.levels[l];
    for (std::int64_t p = 0; p < tree.panels_at(l); ++p) {
      const PanelId id{l, p};
      for (int which = 0; which < nchild; ++which) {
        const PanelId ch = tree.child(id, which);
        for (int m = 0; m < table.num_moments; ++m) {
          cur[p * table.num_moments + m] +=
              table.levels[l + 1][ch.index * table.num_moments + m];
          ++adds;
        }
      }
    }
  }
  if (add_count) *add_count += adds;
  return table;
}

std::int64_t count_recur_calls(const Tree& tree,
                               std::span<const double> radii) {
  if (std::ssize(radii) != tree.grid.total)
    throw std::invalid_argument("radii size does not match grid");
  std::int64_t total = 0;
  for (std::int64_t i = 0; i < tree.grid.total; ++i) {
    const Point x = node_position(tree.grid, i);
    total += recur(tree, PanelCursor{0, {0, 0, 0}}, x, radii[i], nullptr);
  }
  return total;
}

}  // namespace nonloc
