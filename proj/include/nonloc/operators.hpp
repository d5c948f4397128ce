#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nonloc/kernel.hpp"
#include "nonloc/tree.hpp"

namespace nonloc {

// Node-inclusion rule for discrete integrals over H_x ∩ Ω.
//   Leaf:  y_k enters iff its leaf panel intersects B_{delta(x)}(x) — the
//          quadrature implied by the tree decomposition.
//   Point: y_k enters iff |y_k - x| < delta(x).
enum class InclusionRule { Leaf, Point };

// Mass form carries the -|H_x| u(x) term of the truncated operator; the
// difference form sums kernel * (u(y) - u(x)).
enum class ApplyForm { Mass, Difference };

double ball_volume(int dim, double r);

// Fast application of the polynomial-truncated operator
//   L^P u(x_i) = C(x_i)/delta(x_i)^{d+2} (h^d S_i - |B_delta| u(x_i))
// via the precomputed panel decompositions (Step 1) and bottom-up moments
// (Step 2), with S_i assembled from per-panel moments (Step 3).
class TruncatedOperator {
 public:
  TruncatedOperator(const KernelSpec& spec, const Grid& grid);

  std::vector<double> apply(std::span<const double> u);

  const Tree& tree() const { return tree_; }
  const std::vector<Decomposition>& decompositions() const { return decomp_; }
  const KernelSpec& spec() const { return spec_; }
  const Grid& grid() const { return grid_; }

  std::int64_t recur_calls() const { return recur_calls_; }
  std::int64_t step2_ops() const { return step2_ops_; }
  std::int64_t step3_ops() const { return step3_ops_; }
  void reset_counters() { step2_ops_ = step3_ops_ = 0; }

 private:
  KernelSpec spec_;
  Grid grid_;
  Tree tree_;
  int K_;
  std::vector<double> delta_, coeff_;
  std::vector<Decomposition> decomp_;
  std::int64_t recur_calls_ = 0;
  std::int64_t step2_ops_ = 0;
  std::int64_t step3_ops_ = 0;
};

// O(N^2) oracle with the identical quadrature rule. The Leaf rule evaluates
// the raw polynomial at every covered node, matching the moment expansion.
std::vector<double> apply_truncated_dense(const KernelSpec& spec,
                                          const Grid& grid, InclusionRule rule,
                                          std::span<const double> u,
                                          ApplyForm form = ApplyForm::Mass,
                                          std::int64_t* pair_count = nullptr);

// Difference-form application of the smooth split part kappa (Point rule;
// the y = x singularity drops out of the difference).
std::vector<double> apply_smooth_dense(const SplitKernel& split,
                                       const KernelSpec& spec,
                                       const Grid& grid,
                                       std::span<const double> u,
                                       std::int64_t* pair_count = nullptr);

// Difference-form application of the full kernel omega (Point rule).
std::vector<double> apply_full_dense(const KernelSpec& spec, const Grid& grid,
                                     std::span<const double> u,
                                     std::int64_t* pair_count = nullptr);

// Row-major N x N matrix with the stated rule/form. Mass form requires a
// profile that is finite at the origin.
std::vector<double> assemble_dense_matrix(const KernelSpec& spec,
                                          const Grid& grid, InclusionRule rule,
                                          ApplyForm form);

enum class SmoothBackend { Dense, Hodlr };
enum class TruncatedPath { FastLeafMass, DensePointDifference };

struct SplitApplyOptions {
  SmoothBackend backend = SmoothBackend::Dense;
  TruncatedPath truncated = TruncatedPath::FastLeafMass;
  double epsilon = 1e-8;  // Hodlr backend compression precision
};

// Applies the split operator: smooth kappa part plus truncated polynomial
// part for the profile's gamma = kappa + p^{2K} chi decomposition.
std::vector<double> apply_split(const KernelSpec& spec, const Grid& grid,
                                int K, std::span<const double> u,
                                const SplitApplyOptions& options = {});

struct LocalLimitProbe {
  std::vector<std::int64_t> interior;  // node indices with dist(x, boundary) > delta
  std::vector<double> values;          // L u at those nodes, u(x) = x^2
};

// Full-kernel dense operator applied to u = x^2 on a 1d grid; the interior
// values approach the second moment M2 of the profile as h -> 0.
LocalLimitProbe local_limit_probe(const RadialProfile& profile, double delta,
                                  const Grid& grid);

}  // namespace nonloc
