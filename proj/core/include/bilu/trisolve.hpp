#pragma once

#include <bilu/sparse.hpp>

namespace bilu {

enum class Triangle { lower, upper };

/// Strictly triangular CSR matrix T standing for the unit-diagonal operator
/// I + T. No diagonal entries may be stored.
class TriangularOperand {
 public:
  TriangularOperand() = default;
  TriangularOperand(CsrMatrix strict, Triangle triangle);

  const CsrMatrix& matrix() const noexcept { return matrix_; }
  Triangle triangle() const noexcept { return triangle_; }
  index_t size() const noexcept { return matrix_.num_rows(); }

 private:
  CsrMatrix matrix_;
  Triangle triangle_ = Triangle::lower;
};

/// Rows of a triangular operand grouped into dependency levels:
/// level(i) = 1 + max level(j) over the entries (i, j), so that rows sharing a
/// level can be solved simultaneously once all lower levels are done.
/// For upper operands the recurrence runs from the last row upwards.
class LevelSchedule {
 public:
  LevelSchedule() = default;

  index_t num_rows() const noexcept {
    return static_cast<index_t>(level_of_row_.size());
  }
  index_t num_levels() const noexcept {
    return static_cast<index_t>(level_ptr_.size()) - 1;
  }
  /// 1-based level of each row.
  std::span<const index_t> level_of_row() const noexcept { return level_of_row_; }
  /// Rows of the l-th group (0-based group index, level value l + 1), in
  /// ascending row order.
  std::span<const index_t> level(index_t l) const noexcept {
    return {rows_.data() + level_ptr_[l],
            static_cast<std::size_t>(level_ptr_[l + 1] - level_ptr_[l])};
  }

  Triangle triangle() const noexcept { return triangle_; }
  index_t source_nnz() const noexcept { return source_nnz_; }

 private:
  friend LevelSchedule build_level_schedule(const TriangularOperand&);

  std::vector<index_t> level_of_row_;
  std::vector<index_t> level_ptr_{0};
  std::vector<index_t> rows_;
  Triangle triangle_ = Triangle::lower;
  index_t source_nnz_ = 0;
};

LevelSchedule build_level_schedule(const TriangularOperand& t);

/// Solves (I + T) x = b level by level; rows of one level are spread over
/// `workers` threads with a barrier between levels. Each row is reduced in
/// stored order, so x is bitwise identical for any worker count.
void solve_unit_triangular(const TriangularOperand& t, const LevelSchedule& s,
                           std::span<const double> b, std::span<double> x,
                           int workers = 1);
Vector solve_unit_triangular(const TriangularOperand& t, const LevelSchedule& s,
                             std::span<const double> b, int workers = 1);

}  // namespace bilu
