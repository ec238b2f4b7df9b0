#include <bilu/preconditioner.hpp>

#include <numeric>

namespace bilu {

namespace {

BcsrMatrix block_diagonal(const std::vector<DenseBlock>& blocks, index_t bs) {
  const auto n = static_cast<index_t>(blocks.size());
  std::vector<index_t> row_ptr(static_cast<std::size_t>(n) + 1);
  std::iota(row_ptr.begin(), row_ptr.end(), 0);
  std::vector<index_t> col_idx(static_cast<std::size_t>(n));
  std::iota(col_idx.begin(), col_idx.end(), 0);
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(n) * bs * bs);
  for (const auto& b : blocks) {
    if (b.size() != bs)
      throw DimensionError("BlockIlukPreconditioner: diagonal block size mismatch");
    values.insert(values.end(), b.data().begin(), b.data().end());
  }
  return BcsrMatrix(bs, n, n, std::move(row_ptr), std::move(col_idx),
                    std::move(values));
}

}  // namespace

BlockIlukPreconditioner::BlockIlukPreconditioner(BlockIlukFactors factors,
                                                 int workers)
    : factors_(std::move(factors)),
      size_(factors_.num_block_rows * factors_.block_size),
      workers_(1),
      lower_(csr_expand(factors_.lower), Triangle::lower),
      upper_(csr_expand(factors_.upper_unit), Triangle::upper),
      lower_schedule_(build_level_schedule(lower_)),
      upper_schedule_(build_level_schedule(upper_)),
      diag_inv_(block_diagonal(factors_.diag_inv, factors_.block_size)) {
  if (lower_.size() != size_ || upper_.size() != size_ ||
      diag_inv_.num_rows() != size_)
    throw DimensionError("BlockIlukPreconditioner: factor dimensions disagree");
  set_workers(workers);
}

void BlockIlukPreconditioner::set_workers(int workers) {
  if (workers < 1)
    throw std::invalid_argument("BlockIlukPreconditioner: workers must be >= 1");
  workers_ = workers;
}

void BlockIlukPreconditioner::apply(std::span<const double> b,
                                    std::span<double> x) const {
  if (b.size() != static_cast<std::size_t>(size_) ||
      x.size() != static_cast<std::size_t>(size_))
    throw DimensionError("BlockIlukPreconditioner::apply: vector length mismatch");
  Vector y(b.size());
  solve_unit_triangular(lower_, lower_schedule_, b, y, workers_);
  Vector z(b.size());
  spmv(diag_inv_, y, z, workers_);
  solve_unit_triangular(upper_, upper_schedule_, z, x, workers_);
}

Vector BlockIlukPreconditioner::apply(std::span<const double> b) const {
  Vector x(b.size());
  apply(b, x);
  return x;
}

}  // namespace bilu
