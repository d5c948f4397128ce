#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "nonloc/kernel.hpp"

namespace nonloc {

struct HodlrOptions {
  double epsilon = 1e-8;  // global relative Frobenius precision
  int leaf_size = 32;
};

// Hierarchical off-diagonal low-rank matrix. The dyadic 2x2 block recursion
// keeps dense diagonal leaves; every off-diagonal block is stored as a
// truncated-SVD factor pair U*V, whatever its rank. The truncation budget is
// split evenly over the off-diagonal blocks so that the total reconstruction
// satisfies ||A - H||_F <= epsilon * ||A||_F, mirroring the global relative
// precision convention of hierarchical factorizations.
class HodlrMatrix {
 public:
  // A is row-major n x n.
  static HodlrMatrix compress(const double* a, std::int64_t n,
                              const HodlrOptions& options = {});

  std::vector<double> apply(std::span<const double> u) const;

  std::int64_t dim() const { return n_; }
  double epsilon() const { return epsilon_; }
  std::int64_t stored_floats() const;
  int max_rank() const;
  std::vector<int> max_rank_per_level() const;
  // Frobenius norm of (A - H), accumulated at construction time.
  double reconstruction_error() const { return recon_error_; }

  struct Block {
    std::int64_t rows = 0, cols = 0;
    std::int64_t rank = 0;
    std::vector<double> u;  // rows x rank, row-major
    std::vector<double> v;  // rank x cols, row-major
  };
  struct Node {
    std::int64_t size = 0;
    bool leaf = false;
    std::vector<double> dense;  // leaf: size x size row-major
    Block upper, lower;         // off-diagonal factors (A12, A21)
    std::unique_ptr<Node> first, second;
  };
  const Node& root() const { return *root_; }

 private:
  std::int64_t n_ = 0;
  double epsilon_ = 0.0;
  double recon_error_ = 0.0;
  std::unique_ptr<Node> root_;
};

struct RankProfileRow {
  int regularity_k = -1;  // -1 is the raw discontinuous kernel
  std::int64_t n = 0;
  double delta = 0.0;
  double epsilon = 0.0;
  std::int64_t stored_floats = 0;
  std::int64_t dense_floats = 0;
  double ratio = 0.0;
  int max_rank = 0;
};

// Compress the dense operator of the regularity-k kernel family (difference
// form, point rule) for each requested k and report the storage profile.
std::vector<RankProfileRow> rank_profile(std::span<const int> regularities,
                                         int dim, int n, double delta,
                                         double epsilon, int leaf_size = 32);

}  // namespace nonloc
