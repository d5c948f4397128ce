#include "nonloc/hodlr.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <cmath>
#include <stdexcept>

#include "nonloc/operators.hpp"

namespace nonloc {

namespace {

using RowMat =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapMat = Eigen::Map<const RowMat, 0, Eigen::OuterStride<>>;

std::int64_t count_offdiag_blocks(std::int64_t n, int leaf) {
  if (n <= leaf) return 0;
  const std::int64_t m = n / 2;
  return 2 + count_offdiag_blocks(m, leaf) + count_offdiag_blocks(n - m, leaf);
}

// Truncated SVD with squared-Frobenius tail budget tau2.
HodlrMatrix::Block factor_block(const MapMat& blk, double tau2,
                                double* err2) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(blk, Eigen::ComputeThinU |
                                              Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const Eigen::Index count = sv.size();
  std::vector<double> tail(count + 1, 0.0);
  for (Eigen::Index i = count - 1; i >= 0; --i)
    tail[i] = tail[i + 1] + sv[i] * sv[i];
  Eigen::Index rank = 0;
  while (rank < count && tail[rank] > tau2) ++rank;
  if (err2) *err2 += tail[rank];

  HodlrMatrix::Block b;
  b.rows = blk.rows();
  b.cols = blk.cols();
  b.rank = rank;
  b.u.resize(b.rows * rank);
  b.v.resize(rank * b.cols);
  for (std::int64_t i = 0; i < b.rows; ++i)
    for (std::int64_t r = 0; r < rank; ++r)
      b.u[i * rank + r] = svd.matrixU()(i, r) * sv[r];
  for (std::int64_t r = 0; r < rank; ++r)
    for (std::int64_t j = 0; j < b.cols; ++j)
      b.v[r * b.cols + j] = svd.matrixV()(j, r);
  return b;
}

std::unique_ptr<HodlrMatrix::Node> build(const double* a, std::int64_t lda,
                                         std::int64_t n, int leaf, double tau2,
                                         double* err2) {
  auto node = std::make_unique<HodlrMatrix::Node>();
  node->size = n;
  if (n <= leaf) {
    node->leaf = true;
    node->dense.resize(n * n);
    for (std::int64_t i = 0; i < n; ++i)
      for (std::int64_t j = 0; j < n; ++j)
        node->dense[i * n + j] = a[i * lda + j];
    return node;
  }
  const std::int64_t m = n / 2;
  MapMat upper(a + m, m, n - m, Eigen::OuterStride<>(lda));
  MapMat lower(a + m * lda, n - m, m, Eigen::OuterStride<>(lda));
  node->upper = factor_block(upper, tau2, err2);
  node->lower = factor_block(lower, tau2, err2);
  node->first = build(a, lda, m, leaf, tau2, err2);
  node->second = build(a + m * lda + m, lda, n - m, leaf, tau2, err2);
  return node;
}

void apply_node(const HodlrMatrix::Node& node, const double* u, double* out) {
  if (node.leaf) {
    for (std::int64_t i = 0; i < node.size; ++i) {
      double acc = 0.0;
      for (std::int64_t j = 0; j < node.size; ++j)
        acc += node.dense[i * node.size + j] * u[j];
      out[i] = acc;
    }
    return;
  }
  const std::int64_t m = node.first->size;
  apply_node(*node.first, u, out);
  apply_node(*node.second, u + m, out + m);
  const auto add_block = [](const HodlrMatrix::Block& b, const double* src,
                            double* dst) {
    if (b.rank == 0) return;
    std::vector<double> t(b.rank, 0.0);
    for (std::int64_t r = 0; r < b.rank; ++r) {
      double acc = 0.0;
      for (std::int64_t j = 0; j < b.cols; ++j)
        acc += b.v[r * b.cols + j] * src[j];
      t[r] = acc;
    }
    for (std::int64_t i = 0; i < b.rows; ++i) {
      double acc = 0.0;
      for (std::int64_t r = 0; r < b.rank; ++r)
        acc += b.u[i * b.rank + r] * t[r];
      dst[i] += acc;
    }
  };
  add_block(node.upper, u + m, out);
  add_block(node.lower, u, out + m);
}

std::int64_t stored_in(const HodlrMatrix::Node& node) {
  if (node.leaf) return static_cast<std::int64_t>(node.dense.size());
  return node.upper.rank * (node.upper.rows + node.upper.cols) +
         node.lower.rank * (node.lower.rows + node.lower.cols) +
         stored_in(*node.first) + stored_in(*node.second);
}

void ranks_by_level(const HodlrMatrix::Node& node, int level,
                    std::vector<int>& out) {
  if (node.leaf) return;
  if (static_cast<int>(out.size()) <= level) out.resize(level + 1, 0);
  out[level] = std::max(out[level], static_cast<int>(std::max(
                                        node.upper.rank, node.lower.rank)));
  ranks_by_level(*node.first, level + 1, out);
  ranks_by_level(*node.second, level + 1, out);
}

}  // namespace

HodlrMatrix HodlrMatrix::compress(const double* a, std::int64_t n,
                                  const HodlrOptions& options) {
  if (options.epsilon <= 0.0)
    throw std::invalid_argument("hodlr epsilon must be positive");
  if (options.leaf_size < 1)
    throw std::invalid_argument("hodlr leaf_size must be positive");
  HodlrMatrix h;
  h.n_ = n;
  h.epsilon_ = options.epsilon;

  double norm2 = 0.0;
  for (std::int64_t i = 0; i < n * n; ++i) norm2 += a[i] * a[i];
  const std::int64_t blocks = count_offdiag_blocks(n, options.leaf_size);
  const double tau2 = blocks > 0
                          ? options.epsilon * options.epsilon * norm2 /
                                static_cast<double>(blocks)
                          : 0.0;
  double err2 = 0.0;
  h.root_ = build(a, n, n, options.leaf_size, tau2, &err2);
  h.recon_error_ = std::sqrt(err2);
  return h;
}

std::vector<double> HodlrMatrix::apply(std::span<const double> u) const {
  if (std::ssize(u) != n_)
    throw std::invalid_argument("hodlr apply: dimension mismatch");
  std::vector<double> out(n_, 0.0);
  apply_node(*root_, u.data(), out.data());
  return out;
}

std::int64_t HodlrMatrix::stored_floats() const { return stored_in(*root_); }

int HodlrMatrix::max_rank() const {
  int m = 0;
  for (int r : max_rank_per_level()) m = std::max(m, r);
  return m;
}

std::vector<int> HodlrMatrix::max_rank_per_level() const {
  std::vector<int> out;
  ranks_by_level(*root_, 0, out);
  return out;
}

std::vector<RankProfileRow> rank_profile(std::span<const int> regularities,
                                         int dim, int n, double delta,
                                         double epsilon, int leaf_size) {
  const Grid grid = Grid::make(dim, n);
  std::vector<RankProfileRow> rows;
  rows.reserve(regularities.size());
  for (int k : regularities) {
    KernelSpec spec;
    spec.dim = dim;
    spec.horizon = {HorizonKind::Constant, delta};
    spec.profile = k < 0 ? RadialProfile::inverse_s()
                         : RadialProfile::regularized(k);
    const std::vector<double> a = assemble_dense_matrix(
        spec, grid, InclusionRule::Point, ApplyForm::Difference);
    const HodlrMatrix h =
        HodlrMatrix::compress(a.data(), grid.total, {epsilon, leaf_size});
    RankProfileRow row;
    row.regularity_k = k;
    row.n = grid.total;
    row.delta = delta;
    row.epsilon = epsilon;
    row.stored_floats = h.stored_floats();
    row.dense_floats = grid.total * grid.total;
    row.ratio = static_cast<double>(row.stored_floats) /
                static_cast<double>(row.dense_floats);
    row.max_rank = h.max_rank();
    rows.push_back(row);
  }
  return rows;
}

}  // namespace nonloc
