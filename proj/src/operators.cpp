#include "nonloc/operators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "nonloc/hodlr.hpp"

namespace nonloc {

namespace {

constexpr std::int64_t kBinom[7][7] = {
    {1, 0, 0, 0, 0, 0, 0},      {1, 1, 0, 0, 0, 0, 0},
    {1, 2, 1, 0, 0, 0, 0},      {1, 3, 3, 1, 0, 0, 0},
    {1, 4, 6, 4, 1, 0, 0},      {1, 5, 10, 10, 5, 1, 0},
    {1, 6, 15, 20, 15, 6, 1}};

double delta_power(int dim, double delta) {
  double dpow = delta * delta;
  for (int j = 0; j < dim; ++j) dpow *= delta;
  return dpow;
}

struct IndexWindow {
  std::int64_t lo[3] = {0, 0, 0};
  std::int64_t hi[3] = {0, 0, 0};
};

IndexWindow window_around(const Grid& grid, const Point& x, double radius) {
  IndexWindow w;
  for (int j = 0; j < grid.dim; ++j) {
    const double lo = (x[j] - radius) / grid.h - 1.0;
    const double hi = (x[j] + radius) / grid.h + 1.0;
    w.lo[j] = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::floor(lo)));
    w.hi[j] = std::min<std::int64_t>(grid.n - 1,
                                     static_cast<std::int64_t>(std::ceil(hi)));
  }
  for (int j = grid.dim; j < 3; ++j) w.hi[j] = 0;
  return w;
}

Aabb leaf_box(const Grid& grid, const std::int64_t k[3]) {
  Aabb box;
  for (int j = 0; j < grid.dim; ++j) {
    box.min[j] = static_cast<double>(k[j]) * grid.h;
    box.max[j] = static_cast<double>(k[j] + 1) * grid.h;
  }
  return box;
}

// Visit every node in the window; fn(flat, y).
template <typename Fn>
void for_window(const Grid& grid, const IndexWindow& w, Fn&& fn) {
  std::int64_t k[3];
  for (k[0] = w.lo[0]; k[0] <= w.hi[0]; ++k[0]) {
    for (k[1] = w.lo[1]; k[1] <= w.hi[1]; ++k[1]) {
      for (k[2] = w.lo[2]; k[2] <= w.hi[2]; ++k[2]) {
        std::int64_t flat = 0;
        for (int j = 0; j < grid.dim; ++j) flat = flat * grid.n + k[j];
        Point y{};
        for (int j = 0; j < grid.dim; ++j)
          y[j] = (static_cast<double>(k[j]) + 0.5) * grid.h;
        fn(flat, k, y);
      }
    }
  }
}

double dist(const Point& a, const Point& b, int dim) {
  double r2 = 0.0;
  for (int j = 0; j < dim; ++j) {
    const double d = b[j] - a[j];
    r2 += d * d;
  }
  return std::sqrt(r2);
}

void require_truncated(const KernelSpec& spec) {
  if (spec.profile.family != ProfileFamily::PolynomialTruncated)
    throw std::invalid_argument("operation requires a PolynomialTruncated profile");
}

double hd_weight(const Grid& grid) {
  double w = grid.h;
  for (int j = 1; j < grid.dim; ++j) w *= grid.h;
  return w;
}

}  // namespace

double ball_volume(int dim, double r) {
  switch (dim) {
    case 1: return 2.0 * r;
    case 2: return std::numbers::pi * r * r;
    case 3: return 4.0 / 3.0 * std::numbers::pi * r * r * r;
    default: throw std::invalid_argument("ball_volume: dim must be 1, 2 or 3");
  }
}

TruncatedOperator::TruncatedOperator(const KernelSpec& spec, const Grid& grid)
    : spec_(spec), grid_(grid), tree_(build_tree(grid)) {
  require_truncated(spec);
  if (spec.symmetry != SymmetryClass::NonDivergence)
    throw std::invalid_argument(
        "the fast path is defined for the non-divergence form");
  K_ = spec.profile.order;
  if (grid.dim >= 2 && K_ != 0)
    throw std::invalid_argument("K > 0 is supported in 1d only");
  if (grid.dim == 1 && K_ > 3)
    throw std::invalid_argument("K <= 3 in 1d");

  delta_.resize(grid.total);
  coeff_.resize(grid.total);
  decomp_.reserve(grid.total);
  for (std::int64_t i = 0; i < grid.total; ++i) {
    const Point x = node_position(grid, i);
    delta_[i] = spec_.horizon_at(x);
    coeff_[i] = spec_.coefficient_at(x);
    decomp_.push_back(decompose_region(tree_, x, delta_[i]));
    recur_calls_ += decomp_.back().recur_calls;
  }
}

std::vector<double> TruncatedOperator::apply(std::span<const double> u) {
  if (std::ssize(u) != grid_.total)
    throw std::invalid_argument("u size does not match grid");
  const MomentTable moments =
      accumulate_moments(tree_, u, grid_.dim == 1 ? K_ : 0, &step2_ops_);
  const auto& coeffs = spec_.profile.poly->coeffs;
  const int nm = moments.num_moments;
  const double hd = hd_weight(grid_);

  std::vector<double> out(grid_.total);
  std::vector<double> w(nm);
  for (std::int64_t i = 0; i < grid_.total; ++i) {
    const double delta = delta_[i];
    if (grid_.dim == 1) {
      // p((y-x)/delta) = sum_j c_j delta^{-2j} sum_m binom(2j,m) y^m (-x)^{2j-m}
      const double x = (static_cast<double>(i) + 0.5) * grid_.h;
      std::fill(w.begin(), w.end(), 0.0);
      const double inv_d2 = 1.0 / (delta * delta);
      double dscale = 1.0;  // delta^{-2j}
      for (int j = 0; j <= K_; ++j) {
        double xpow = 1.0;  // (-x)^{2j-m} built downward from m = 2j
        for (int m = 2 * j; m >= 0; --m) {
          w[m] += coeffs[j] * dscale * static_cast<double>(kBinom[2 * j][m]) *
                  xpow;
          xpow *= -x;
        }
        dscale *= inv_d2;
      }
    } else {
      w[0] = coeffs[0];
    }

    double s = 0.0;
    for (const PanelId& panel : decomp_[i].panels)
      for (int m = 0; m < nm; ++m) s += w[m] * moments.moment(panel, m);
    step3_ops_ += static_cast<std::int64_t>(decomp_[i].panels.size()) * nm;

    out[i] = coeff_[i] / delta_power(grid_.dim, delta) *
             (hd * s - ball_volume(grid_.dim, delta) * u[i]);
  }
  return out;
}

std::vector<double> apply_truncated_dense(const KernelSpec& spec,
                                          const Grid& grid, InclusionRule rule,
                                          std::span<const double> u,
                                          ApplyForm form,
                                          std::int64_t* pair_count) {
  require_truncated(spec);
  if (std::ssize(u) != grid.total)
    throw std::invalid_argument("u size does not match grid");
  const MatchedPolynomial& p = *spec.profile.poly;
  const double hd = hd_weight(grid);
  std::vector<double> out(grid.total);
  std::int64_t pairs = 0;
  for (std::int64_t i = 0; i < grid.total; ++i) {
    const Point x = node_position(grid, i);
    const double delta = spec.horizon_at(x);
    double acc = 0.0;
    for_window(grid, window_around(grid, x, delta),
               [&](std::int64_t k, const std::int64_t kk[3], const Point& y) {
                 const bool in =
                     rule == InclusionRule::Point
                         ? dist(x, y, grid.dim) < delta
                         : cube_intersects_ball(grid.dim, leaf_box(grid, kk),
                                                x, delta);
                 if (!in) return;
                 ++pairs;
                 const double v = p(dist(x, y, grid.dim) / delta);
                 acc += form == ApplyForm::Mass ? v * u[k] : v * (u[k] - u[i]);
               });
    const double front = spec.coefficient_at(x) / delta_power(grid.dim, delta);
    out[i] = form == ApplyForm::Mass
                 ? front * (hd * acc - ball_volume(grid.dim, delta) * u[i])
                 : front * hd * acc;
  }
  if (pair_count) *pair_count += pairs;
  return out;
}

std::vector<double> apply_smooth_dense(const SplitKernel& split,
                                       const KernelSpec& spec,
                                       const Grid& grid,
                                       std::span<const double> u,
                                       std::int64_t* pair_count) {
  if (std::ssize(u) != grid.total)
    throw std::invalid_argument("u size does not match grid");
  const double hd = hd_weight(grid);
  std::vector<double> out(grid.total);
  std::int64_t pairs = 0;
  for (std::int64_t i = 0; i < grid.total; ++i) {
    const Point x = node_position(grid, i);
    const double delta = spec.horizon_at(x);
    const double front = 1.0 / delta_power(grid.dim, delta);
    double acc = 0.0;
    for_window(grid, window_around(grid, x, delta),
               [&](std::int64_t k, const std::int64_t*, const Point& y) {
                 if (k == i) return;
                 const double r = dist(x, y, grid.dim);
                 if (r >= delta) return;
                 ++pairs;
                 acc += spec.coefficient(x, y) * front * split.kappa(r / delta) *
                        (u[k] - u[i]);
               });
    out[i] = hd * acc;
  }
  if (pair_count) *pair_count += pairs;
  return out;
}

std::vector<double> apply_full_dense(const KernelSpec& spec, const Grid& grid,
                                     std::span<const double> u,
                                     std::int64_t* pair_count) {
  if (std::ssize(u) != grid.total)
    throw std::invalid_argument("u size does not match grid");
  const double hd = hd_weight(grid);
  const double reach = spec.horizon.max_radius();
  std::vector<double> out(grid.total);
  std::int64_t pairs = 0;
  for (std::int64_t i = 0; i < grid.total; ++i) {
    const Point x = node_position(grid, i);
    double acc = 0.0;
    for_window(grid, window_around(grid, x, reach),
               [&](std::int64_t k, const std::int64_t*, const Point& y) {
                 if (k == i) return;
                 const double w = eval_omega(spec, x, y);
                 if (w == 0.0) return;
                 ++pairs;
                 acc += w * (u[k] - u[i]);
               });
    out[i] = hd * acc;
  }
  if (pair_count) *pair_count += pairs;
  return out;
}

std::vector<double> assemble_dense_matrix(const KernelSpec& spec,
                                          const Grid& grid, InclusionRule rule,
                                          ApplyForm form) {
  if (form == ApplyForm::Mass) require_truncated(spec);
  const std::int64_t n = grid.total;
  const double hd = hd_weight(grid);
  std::vector<double> a(n * n, 0.0);
  const bool truncated =
      spec.profile.family == ProfileFamily::PolynomialTruncated;
  const double reach = spec.horizon.max_radius();
  for (std::int64_t i = 0; i < n; ++i) {
    const Point x = node_position(grid, i);
    const double delta = spec.horizon_at(x);
    const double front = spec.coefficient_at(x) / delta_power(grid.dim, delta);
    double* row = a.data() + i * n;
    for_window(grid, window_around(grid, x, std::max(delta, reach)),
               [&](std::int64_t k, const std::int64_t kk[3], const Point& y) {
                 if (truncated) {
                   const double r = dist(x, y, grid.dim);
                   const bool in =
                       rule == InclusionRule::Point
                           ? r < delta
                           : cube_intersects_ball(grid.dim, leaf_box(grid, kk),
                                                  x, delta);
                   if (!in) return;
                   row[k] += hd * front * (*spec.profile.poly)(r / delta);
                 } else {
                   if (k == i) return;  // difference form drops the singularity
                   row[k] += hd * eval_omega(spec, x, y);
                 }
               });
    if (form == ApplyForm::Mass) {
      row[i] -= front * ball_volume(grid.dim, delta);
    } else {
      double sum = 0.0;
      for (std::int64_t k = 0; k < n; ++k)
        if (k != i) sum += row[k];
      row[i] = -sum;
    }
  }
  return a;
}

std::vector<double> apply_split(const KernelSpec& spec, const Grid& grid,
                                int K, std::span<const double> u,
                                const SplitApplyOptions& options) {
  if (spec.profile.family != ProfileFamily::InverseS)
    throw std::invalid_argument("apply_split expects the InverseS profile");
  const SplitKernel sk = split(spec.profile, K);

  std::vector<double> out;
  if (options.backend == SmoothBackend::Dense) {
    out = apply_smooth_dense(sk, spec, grid, u);
  } else {
    KernelSpec smooth_spec = spec;
    smooth_spec.profile = RadialProfile::regularized(K, spec.profile.c);
    const std::vector<double> a = assemble_dense_matrix(
        smooth_spec, grid, InclusionRule::Point, ApplyForm::Difference);
    const HodlrMatrix h =
        HodlrMatrix::compress(a.data(), grid.total, {options.epsilon, 32});
    out = h.apply(u);
  }

  KernelSpec tspec = spec;
  tspec.profile = RadialProfile::truncated_polynomial(K, spec.profile.c);
  std::vector<double> tpart;
  if (options.truncated == TruncatedPath::FastLeafMass) {
    TruncatedOperator op(tspec, grid);
    tpart = op.apply(u);
  } else {
    tpart = apply_truncated_dense(tspec, grid, InclusionRule::Point, u,
                                  ApplyForm::Difference);
  }
  for (std::int64_t i = 0; i < grid.total; ++i) out[i] += tpart[i];
  return out;
}

LocalLimitProbe local_limit_probe(const RadialProfile& profile, double delta,
                                  const Grid& grid) {
  if (grid.dim != 1)
    throw std::invalid_argument("local_limit_probe is a 1d diagnostic");
  KernelSpec spec;
  spec.dim = 1;
  spec.profile = profile;
  spec.horizon = {HorizonKind::Constant, delta};
  std::vector<double> u(grid.total);
  for (std::int64_t i = 0; i < grid.total; ++i) {
    const double x = (static_cast<double>(i) + 0.5) * grid.h;
    u[i] = x * x;
  }
  const std::vector<double> lu = apply_full_dense(spec, grid, u);
  LocalLimitProbe probe;
  for (std::int64_t i = 0; i < grid.total; ++i) {
    const double x = (static_cast<double>(i) + 0.5) * grid.h;
    if (x > delta && 1.0 - x > delta) {
      probe.interior.push_back(i);
      probe.values.push_back(lu[i]);
    }
  }
  return probe;
}

}  // namespace nonloc
