#include <bilu/trisolve.hpp>

#include <algorithm>
#include <string>

namespace bilu {

TriangularOperand::TriangularOperand(CsrMatrix strict, Triangle triangle)
    : matrix_(std::move(strict)), triangle_(triangle) {
  if (matrix_.num_rows() != matrix_.num_cols())
    throw DimensionError("TriangularOperand: matrix is not square");
  for (index_t i = 0; i < matrix_.num_rows(); ++i) {
    for (index_t j : matrix_.row_cols(i)) {
      const bool ok = triangle_ == Triangle::lower ? j < i : j > i;
      if (!ok)
        throw StructuralError("TriangularOperand: entry (" + std::to_string(i) +
                              ", " + std::to_string(j) + ") is not strictly " +
                              (triangle_ == Triangle::lower ? "lower" : "upper"));
    }
  }
}

LevelSchedule build_level_schedule(const TriangularOperand& t) {
  const CsrMatrix& m = t.matrix();
  const index_t n = m.num_rows();
  LevelSchedule s;
  s.triangle_ = t.triangle();
  s.source_nnz_ = m.nnz();
  s.level_of_row_.assign(static_cast<std::size_t>(n), 0);

  auto assign = [&](index_t i) {
    index_t deepest = 0;
    for (index_t j : m.row_cols(i)) deepest = std::max(deepest, s.level_of_row_[j]);
    s.level_of_row_[i] = deepest + 1;
  };
  if (t.triangle() == Triangle::lower) {
    for (index_t i = 0; i < n; ++i) assign(i);
  } else {
    for (index_t i = n - 1; i >= 0; --i) assign(i);
  }

  // counting sort of rows by level keeps ascending row order inside a level
  const index_t levels =
      n == 0 ? 0 : *std::max_element(s.level_of_row_.begin(), s.level_of_row_.end());
  s.level_ptr_.assign(static_cast<std::size_t>(levels) + 1, 0);
  for (index_t lv : s.level_of_row_) ++s.level_ptr_[lv];
  for (index_t l = 0; l < levels; ++l) s.level_ptr_[l + 1] += s.level_ptr_[l];
  s.rows_.resize(static_cast<std::size_t>(n));
  std::vector<index_t> next(s.level_ptr_.begin(), s.level_ptr_.end() - 1);
  for (index_t i = 0; i < n; ++i) s.rows_[next[s.level_of_row_[i] - 1]++] = i;
  return s;
}

void solve_unit_triangular(const TriangularOperand& t, const LevelSchedule& s,
                           std::span<const double> b, std::span<double> x,
                           int workers) {
  const CsrMatrix& m = t.matrix();
  const index_t n = m.num_rows();
  if (s.num_rows() != n)
    throw DimensionError("solve_unit_triangular: schedule built for " +
                         std::to_string(s.num_rows()) + " rows, matrix has " +
                         std::to_string(n));
  if (s.triangle() != t.triangle() || s.source_nnz() != m.nnz())
    throw StructuralError(
        "solve_unit_triangular: schedule was not built from this operand");
  if (b.size() != static_cast<std::size_t>(n) ||
      x.size() != static_cast<std::size_t>(n))
    throw DimensionError("solve_unit_triangular: vector length mismatch");

  const index_t* rp = m.row_ptr().data();
  const index_t* ci = m.col_idx().data();
  const double* mv = m.values().data();
  const index_t levels = s.num_levels();

#pragma omp parallel num_threads(workers) if (workers > 1)
  for (index_t l = 0; l < levels; ++l) {
    const auto rows = s.level(l);
    const auto count = static_cast<index_t>(rows.size());
#pragma omp for schedule(static)
    for (index_t r = 0; r < count; ++r) {
      const index_t i = rows[r];
      double sum = b[i];
      for (index_t q = rp[i]; q < rp[i + 1]; ++q) sum -= mv[q] * x[ci[q]];
      x[i] = sum;
    }
  }
}

Vector solve_unit_triangular(const TriangularOperand& t, const LevelSchedule& s,
                             std::span<const double> b, int workers) {
  Vector x(b.size());
  solve_unit_triangular(t, s, b, x, workers);
  return x;
}

}  // namespace bilu
