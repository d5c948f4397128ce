#include "nonloc/bench.hpp"

#include <chrono>
#include <cmath>
#include <random>
#include <stdexcept>

namespace nonloc {

std::vector<double> random_vector(std::int64_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = dist(rng);
  return v;
}

double fit_loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("slope fit needs matched samples, >= 2");
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

BenchRecord run_apply_case(const KernelSpec& truncated_spec, const Grid& grid,
                           std::uint64_t seed, int n_vectors) {
  using clock = std::chrono::steady_clock;
  BenchRecord rec;
  rec.N = grid.total;

  TruncatedOperator op(truncated_spec, grid);
  rec.recur_calls = op.recur_calls();

  for (int v = 0; v < n_vectors; ++v) {
    const std::vector<double> u =
        random_vector(grid.total, seed + static_cast<std::uint64_t>(v));

    const auto t0 = clock::now();
    const std::vector<double> fast = op.apply(u);
    const auto t1 = clock::now();
    std::int64_t pairs = 0;
    const std::vector<double> dense = apply_truncated_dense(
        truncated_spec, grid, InclusionRule::Leaf, u, ApplyForm::Mass, &pairs);
    const auto t2 = clock::now();

    rec.fast_wall_ns +=
        std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count();
    rec.dense_wall_ns +=
        std::chrono::duration_cast<std::chrono::nanoseconds>(t2 - t1).count();
    rec.dense_pairs += pairs;

    double max_abs = 0.0, max_diff = 0.0;
    for (std::int64_t i = 0; i < grid.total; ++i) {
      max_abs = std::max(max_abs, std::abs(dense[i]));
      max_diff = std::max(max_diff, std::abs(fast[i] - dense[i]));
    }
    const double rel = max_abs > 0.0 ? max_diff / max_abs : max_diff;
    rec.max_rel_err_vs_dense = std::max(rec.max_rel_err_vs_dense, rel);
  }
  rec.step2_ops = op.step2_ops();
  rec.step3_ops = op.step3_ops();
  return rec;
}

}  // namespace nonloc
