#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nonloc/kernel.hpp"
#include "nonloc/operators.hpp"

namespace nonloc {

struct BenchRecord {
  std::int64_t N = 0;
  std::int64_t recur_calls = 0;  // Step 1 instrument
  std::int64_t step2_ops = 0;
  std::int64_t step3_ops = 0;
  std::int64_t dense_pairs = 0;  // kernel evaluations of the dense route
  std::int64_t fast_wall_ns = 0;
  std::int64_t dense_wall_ns = 0;
  double max_rel_err_vs_dense = 0.0;
};

// Uniform [-1,1] per component from a seeded mt19937_64.
std::vector<double> random_vector(std::int64_t n, std::uint64_t seed);

// Least-squares slope of log(y) against log(x).
double fit_loglog_slope(std::span<const double> x, std::span<const double> y);

// Fast-vs-dense comparison for the truncated operator: seeds n_vectors
// random inputs, records op counts, wall times, and the worst relative
// infinity-norm disagreement against the Leaf-rule dense oracle.
BenchRecord run_apply_case(const KernelSpec& truncated_spec, const Grid& grid,
                           std::uint64_t seed, int n_vectors = 1);

}  // namespace nonloc
