#pragma once

#include <bilu/common.hpp>

#include <cstddef>
#include <span>
#include <vector>

namespace bilu {

using Vector = std::vector<double>;

/// Point-wise sparse matrix in compressed sparse row form.
///
/// Column indices are strictly increasing inside every row; the constructor
/// rejects anything else. The structure is fixed after construction, values
/// may be overwritten in place (factorizations do that).
class CsrMatrix {
 public:
  CsrMatrix() = default;
  CsrMatrix(index_t num_rows, index_t num_cols, std::vector<index_t> row_ptr,
            std::vector<index_t> col_idx, std::vector<double> values);

  index_t num_rows() const noexcept { return num_rows_; }
  index_t num_cols() const noexcept { return num_cols_; }
  index_t nnz() const noexcept { return static_cast<index_t>(col_idx_.size()); }

  std::span<const index_t> row_ptr() const noexcept { return row_ptr_; }
  std::span<const index_t> col_idx() const noexcept { return col_idx_; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }

  std::span<const index_t> row_cols(index_t i) const noexcept {
    return {col_idx_.data() + row_ptr_[i],
            static_cast<std::size_t>(row_ptr_[i + 1] - row_ptr_[i])};
  }
  std::span<const double> row_values(index_t i) const noexcept {
    return {values_.data() + row_ptr_[i],
            static_cast<std::size_t>(row_ptr_[i + 1] - row_ptr_[i])};
  }
  std::span<double> row_values(index_t i) noexcept {
    return {values_.data() + row_ptr_[i],
            static_cast<std::size_t>(row_ptr_[i + 1] - row_ptr_[i])};
  }

  /// Storage slot of entry (i, j), or npos if the position is not stored.
  index_t find(index_t i, index_t j) const noexcept;
  /// Value at (i, j); zero for positions outside the pattern.
  double at(index_t i, index_t j) const noexcept;

 private:
  index_t num_rows_ = 0;
  index_t num_cols_ = 0;
  std::vector<index_t> row_ptr_{0};
  std::vector<index_t> col_idx_;
  std::vector<double> values_;
};

/// Block sparse matrix: CSR over dense bs x bs blocks. Each stored block is
/// kept whole (explicit zeros included) in column-major order, blocks laid
/// out in the same order as col_idx.
class BcsrMatrix {
 public:
  BcsrMatrix() = default;
  BcsrMatrix(index_t block_size, index_t num_block_rows, index_t num_block_cols,
             std::vector<index_t> row_ptr, std::vector<index_t> col_idx,
             std::vector<double> values);

  index_t block_size() const noexcept { return block_size_; }
  index_t num_block_rows() const noexcept { return num_block_rows_; }
  index_t num_block_cols() const noexcept { return num_block_cols_; }
  index_t num_rows() const noexcept { return num_block_rows_ * block_size_; }
  index_t num_cols() const noexcept { return num_block_cols_ * block_size_; }
  index_t nnzb() const noexcept { return static_cast<index_t>(col_idx_.size()); }
  std::size_t block_elems() const noexcept {
    return static_cast<std::size_t>(block_size_) * block_size_;
  }

  std::span<const index_t> row_ptr() const noexcept { return row_ptr_; }
  std::span<const index_t> col_idx() const noexcept { return col_idx_; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }

  std::span<const index_t> row_cols(index_t i) const noexcept {
    return {col_idx_.data() + row_ptr_[i],
            static_cast<std::size_t>(row_ptr_[i + 1] - row_ptr_[i])};
  }

  /// Dense column-major block stored in slot t.
  std::span<const double> block(index_t t) const noexcept {
    return {values_.data() + t * block_elems(), block_elems()};
  }
  std::span<double> block(index_t t) noexcept {
    return {values_.data() + t * block_elems(), block_elems()};
  }

  index_t find(index_t bi, index_t bj) const noexcept;

 private:
  index_t block_size_ = 1;
  index_t num_block_rows_ = 0;
  index_t num_block_cols_ = 0;
  std::vector<index_t> row_ptr_{0};
  std::vector<index_t> col_idx_;
  std::vector<double> values_;
};

/// Values-free sparsity pattern of a square matrix, one sorted column list
/// per row so that insertions and deletions only move data inside that row.
class PatternMatrix {
 public:
  explicit PatternMatrix(index_t n = 0) : rows_(static_cast<std::size_t>(n)) {}
  explicit PatternMatrix(std::vector<std::vector<index_t>> rows);

  index_t size() const noexcept { return static_cast<index_t>(rows_.size()); }
  index_t row_length(index_t i) const noexcept {
    return static_cast<index_t>(rows_[i].size());
  }
  std::span<const index_t> row(index_t i) const noexcept { return rows_[i]; }
  std::size_t nnz() const noexcept;

  bool contains(index_t i, index_t j) const noexcept;
  /// Returns false if (i, j) was already present.
  bool insert(index_t i, index_t j);
  /// Returns false if (i, j) was not present.
  bool erase(index_t i, index_t j);

  /// True if every position of *this is also in `other`.
  bool is_subset_of(const PatternMatrix& other) const noexcept;

  friend bool operator==(const PatternMatrix&, const PatternMatrix&) = default;

 private:
  std::vector<std::vector<index_t>> rows_;
};

struct Triplet {
  index_t row;
  index_t col;
  double value;
};

/// Builds a normalized CSR matrix; duplicate positions are summed.
CsrMatrix csr_from_triplets(index_t num_rows, index_t num_cols,
                            std::span<const Triplet> entries);

/// Pattern of the stored entries of a square CSR matrix.
PatternMatrix pattern_of(const CsrMatrix& a);

/// Block-level structure of `a` viewed as a point-wise pattern. Only
/// row_ptr/col_idx are read, so stored all-zero blocks stay in the pattern.
PatternMatrix extract_point_pattern(const BcsrMatrix& a);

/// Point-wise expansion of a block matrix. Exact zeros inside stored blocks
/// are dropped.
CsrMatrix csr_expand(const BcsrMatrix& a);

/// Groups `a` into bs x bs blocks. A block is stored iff it holds at least
/// one nonzero value of `a`.
BcsrMatrix bcsr_from_csr(const CsrMatrix& a, index_t bs);

/// y = A x. Rows are distributed over `workers` threads; every row is
/// reduced in stored order, so the result does not depend on `workers`.
void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y,
          int workers = 1);
Vector spmv(const CsrMatrix& a, std::span<const double> x, int workers = 1);

void spmv(const BcsrMatrix& a, std::span<const double> x, std::span<double> y,
          int workers = 1);
Vector spmv(const BcsrMatrix& a, std::span<const double> x, int workers = 1);

}  // namespace bilu
