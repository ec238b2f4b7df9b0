#include <bilu/sparse.hpp>

#include <algorithm>
#include <string>

namespace bilu {

namespace {

void check_structure(const char* what, index_t num_rows, index_t num_cols,
                     const std::vector<index_t>& row_ptr,
                     const std::vector<index_t>& col_idx) {
  auto fail = [&](const std::string& msg) {
    throw StructuralError(std::string(what) + ": " + msg);
  };
  if (num_rows < 0 || num_cols < 0) fail("negative dimension");
  if (row_ptr.size() != static_cast<std::size_t>(num_rows) + 1)
    fail("row_ptr has length " + std::to_string(row_ptr.size()) +
         ", expected " + std::to_string(num_rows + 1));
  if (row_ptr.front() != 0) fail("row_ptr[0] != 0");
  if (static_cast<std::size_t>(row_ptr.back()) != col_idx.size())
    fail("row_ptr[last] does not match the number of stored entries");
  for (index_t i = 0; i < num_rows; ++i) {
    if (row_ptr[i + 1] < row_ptr[i])
      fail("row_ptr decreases at row " + std::to_string(i));
    for (index_t t = row_ptr[i]; t < row_ptr[i + 1]; ++t) {
      const index_t j = col_idx[t];
      if (j < 0 || j >= num_cols)
        fail("column " + std::to_string(j) + " out of range in row " +
             std::to_string(i));
      if (t > row_ptr[i] && col_idx[t - 1] >= j)
        fail("columns not strictly increasing in row " + std::to_string(i));
    }
  }
}

index_t find_in_row(std::span<const index_t> cols, index_t base, index_t j) {
  auto it = std::lower_bound(cols.begin(), cols.end(), j);
  if (it == cols.end() || *it != j) return npos;
  return base + static_cast<index_t>(it - cols.begin());
}

}  // namespace

// ---------------------------------------------------------------- CsrMatrix

CsrMatrix::CsrMatrix(index_t num_rows, index_t num_cols,
                     std::vector<index_t> row_ptr, std::vector<index_t> col_idx,
                     std::vector<double> values)
    : num_rows_(num_rows),
      num_cols_(num_cols),
      row_ptr_(std::move(row_ptr)),
      col_idx_(std::move(col_idx)),
      values_(std::move(values)) {
  check_structure("CsrMatrix", num_rows_, num_cols_, row_ptr_, col_idx_);
  if (values_.size() != col_idx_.size())
    throw StructuralError("CsrMatrix: values and col_idx differ in length");
}

index_t CsrMatrix::find(index_t i, index_t j) const noexcept {
  if (i < 0 || i >= num_rows_) return npos;
  return find_in_row(row_cols(i), row_ptr_[i], j);
}

double CsrMatrix::at(index_t i, index_t j) const noexcept {
  const index_t t = find(i, j);
  return t == npos ? 0.0 : values_[t];
}

// --------------------------------------------------------------- BcsrMatrix

BcsrMatrix::BcsrMatrix(index_t block_size, index_t num_block_rows,
                       index_t num_block_cols, std::vector<index_t> row_ptr,
                       std::vector<index_t> col_idx, std::vector<double> values)
    : block_size_(block_size),
      num_block_rows_(num_block_rows),
      num_block_cols_(num_block_cols),
      row_ptr_(std::move(row_ptr)),
      col_idx_(std::move(col_idx)),
      values_(std::move(values)) {
  if (block_size_ < 1) throw StructuralError("BcsrMatrix: block size < 1");
  check_structure("BcsrMatrix", num_block_rows_, num_block_cols_, row_ptr_,
                  col_idx_);
  if (values_.size() != col_idx_.size() * block_elems())
    throw StructuralError("BcsrMatrix: values length != nnzb * bs^2");
}

index_t BcsrMatrix::find(index_t bi, index_t bj) const noexcept {
  if (bi < 0 || bi >= num_block_rows_) return npos;
  return find_in_row(row_cols(bi), row_ptr_[bi], bj);
}

// ------------------------------------------------------------ PatternMatrix

PatternMatrix::PatternMatrix(std::vector<std::vector<index_t>> rows)
    : rows_(std::move(rows)) {
  const index_t n = size();
  for (index_t i = 0; i < n; ++i) {
    const auto& r = rows_[i];
    for (std::size_t t = 0; t < r.size(); ++t) {
      if (r[t] < 0 || r[t] >= n)
        throw StructuralError("PatternMatrix: column out of range in row " +
                              std::to_string(i));
      if (t > 0 && r[t - 1] >= r[t])
        throw StructuralError(
            "PatternMatrix: columns not strictly increasing in row " +
            std::to_string(i));
    }
  }
}

std::size_t PatternMatrix::nnz() const noexcept {
  std::size_t total = 0;
  for (const auto& r : rows_) total += r.size();
  return total;
}

bool PatternMatrix::contains(index_t i, index_t j) const noexcept {
  if (i < 0 || i >= size()) return false;
  return std::binary_search(rows_[i].begin(), rows_[i].end(), j);
}

bool PatternMatrix::insert(index_t i, index_t j) {
  if (i < 0 || i >= size() || j < 0 || j >= size())
    throw StructuralError("PatternMatrix::insert: position out of range");
  auto& r = rows_[i];
  auto it = std::lower_bound(r.begin(), r.end(), j);
  if (it != r.end() && *it == j) return false;
  r.insert(it, j);
  return true;
}

bool PatternMatrix::erase(index_t i, index_t j) {
  if (i < 0 || i >= size()) return false;
  auto& r = rows_[i];
  auto it = std::lower_bound(r.begin(), r.end(), j);
  if (it == r.end() || *it != j) return false;
  r.erase(it);
  return true;
}

bool PatternMatrix::is_subset_of(const PatternMatrix& other) const noexcept {
  if (size() != other.size()) return false;
  for (index_t i = 0; i < size(); ++i) {
    if (!std::includes(other.rows_[i].begin(), other.rows_[i].end(),
                       rows_[i].begin(), rows_[i].end()))
      return false;
  }
  return true;
}

// --------------------------------------------------------------- conversion

CsrMatrix csr_from_triplets(index_t num_rows, index_t num_cols,
                            std::span<const Triplet> entries) {
  if (num_rows < 0 || num_cols < 0)
    throw StructuralError("csr_from_triplets: negative dimension");
  for (const auto& e : entries) {
    if (e.row < 0 || e.row >= num_rows || e.col < 0 || e.col >= num_cols)
      throw StructuralError("csr_from_triplets: entry (" +
                            std::to_string(e.row) + ", " +
                            std::to_string(e.col) + ") out of range");
  }
  std::vector<Triplet> sorted(entries.begin(), entries.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const Triplet& a, const Triplet& b) {
                     return a.row != b.row ? a.row < b.row : a.col < b.col;
                   });

  std::vector<index_t> row_ptr(static_cast<std::size_t>(num_rows) + 1, 0);
  std::vector<index_t> col_idx;
  std::vector<double> values;
  col_idx.reserve(sorted.size());
  values.reserve(sorted.size());
  for (std::size_t t = 0; t < sorted.size(); ++t) {
    const auto& e = sorted[t];
    if (t > 0 && sorted[t - 1].row == e.row && sorted[t - 1].col == e.col) {
      values.back() += e.value;
      continue;
    }
    col_idx.push_back(e.col);
    values.push_back(e.value);
    ++row_ptr[e.row + 1];
  }
  for (index_t i = 0; i < num_rows; ++i) row_ptr[i + 1] += row_ptr[i];
  return CsrMatrix(num_rows, num_cols, std::move(row_ptr), std::move(col_idx),
                   std::move(values));
}

PatternMatrix pattern_of(const CsrMatrix& a) {
  if (a.num_rows() != a.num_cols())
    throw DimensionError("pattern_of: matrix is not square");
  std::vector<std::vector<index_t>> rows(static_cast<std::size_t>(a.num_rows()));
  for (index_t i = 0; i < a.num_rows(); ++i) {
    auto cols = a.row_cols(i);
    rows[i].assign(cols.begin(), cols.end());
  }
  return PatternMatrix(std::move(rows));
}

PatternMatrix extract_point_pattern(const BcsrMatrix& a) {
  if (a.num_block_rows() != a.num_block_cols())
    throw DimensionError("extract_point_pattern: matrix is not square");
  std::vector<std::vector<index_t>> rows(
      static_cast<std::size_t>(a.num_block_rows()));
  for (index_t i = 0; i < a.num_block_rows(); ++i) {
    auto cols = a.row_cols(i);
    rows[i].assign(cols.begin(), cols.end());
  }
  return PatternMatrix(std::move(rows));
}

CsrMatrix csr_expand(const BcsrMatrix& a) {
  const index_t bs = a.block_size();
  const index_t n = a.num_rows();
  std::vector<index_t> row_ptr(static_cast<std::size_t>(n) + 1, 0);
  std::vector<index_t> col_idx;
  std::vector<double> values;

  for (index_t bi = 0; bi < a.num_block_rows(); ++bi) {
    for (index_t r = 0; r < bs; ++r) {
      const index_t row = bi * bs + r;
      // blocks in a block row are sorted by block column, so walking them in
      // order and then the columns inside each keeps point columns sorted
      for (index_t t = a.row_ptr()[bi]; t < a.row_ptr()[bi + 1]; ++t) {
        const auto blk = a.block(t);
        const index_t bj = a.col_idx()[t];
        for (index_t c = 0; c < bs; ++c) {
          const double v = blk[c * bs + r];
          if (v == 0.0) continue;
          col_idx.push_back(bj * bs + c);
          values.push_back(v);
        }
      }
      row_ptr[row + 1] = static_cast<index_t>(col_idx.size());
    }
  }
  return CsrMatrix(n, a.num_cols(), std::move(row_ptr), std::move(col_idx),
                   std::move(values));
}

BcsrMatrix bcsr_from_csr(const CsrMatrix& a, index_t bs) {
  if (bs < 1) throw DimensionError("bcsr_from_csr: block size must be >= 1");
  if (a.num_rows() % bs != 0 || a.num_cols() % bs != 0)
    throw DimensionError("bcsr_from_csr: block size " + std::to_string(bs) +
                         " does not divide " + std::to_string(a.num_rows()) +
                         " x " + std::to_string(a.num_cols()));
  const index_t nbr = a.num_rows() / bs;
  const index_t nbc = a.num_cols() / bs;
  const std::size_t elems = static_cast<std::size_t>(bs) * bs;

  std::vector<index_t> row_ptr(static_cast<std::size_t>(nbr) + 1, 0);
  std::vector<index_t> col_idx;
  std::vector<double> values;
  std::vector<index_t> slot_of(static_cast<std::size_t>(nbc), npos);
  std::vector<index_t> touched;

  for (index_t bi = 0; bi < nbr; ++bi) {
    touched.clear();
    for (index_t r = 0; r < bs; ++r) {
      const index_t row = bi * bs + r;
      auto cols = a.row_cols(row);
      auto vals = a.row_values(row);
      for (std::size_t t = 0; t < cols.size(); ++t) {
        if (vals[t] == 0.0) continue;
        const index_t bj = cols[t] / bs;
        if (slot_of[bj] == npos) {
          slot_of[bj] = 0;
          touched.push_back(bj);
        }
      }
    }
    std::sort(touched.begin(), touched.end());
    const index_t base = static_cast<index_t>(col_idx.size());
    for (std::size_t t = 0; t < touched.size(); ++t) {
      slot_of[touched[t]] = base + static_cast<index_t>(t);
      col_idx.push_back(touched[t]);
    }
    values.resize(col_idx.size() * elems, 0.0);
    for (index_t r = 0; r < bs; ++r) {
      const index_t row = bi * bs + r;
      auto cols = a.row_cols(row);
      auto vals = a.row_values(row);
      for (std::size_t t = 0; t < cols.size(); ++t) {
        if (vals[t] == 0.0) continue;
        const index_t bj = cols[t] / bs;
        const index_t c = cols[t] % bs;
        values[slot_of[bj] * elems + static_cast<std::size_t>(c * bs + r)] =
            vals[t];
      }
    }
    for (index_t bj : touched) slot_of[bj] = npos;
    row_ptr[bi + 1] = static_cast<index_t>(col_idx.size());
  }
  return BcsrMatrix(bs, nbr, nbc, std::move(row_ptr), std::move(col_idx),
                    std::move(values));
}

// -------------------------------------------------------------------- spmv

void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y,
          int workers) {
  if (x.size() != static_cast<std::size_t>(a.num_cols()) ||
      y.size() != static_cast<std::size_t>(a.num_rows()))
    throw DimensionError("spmv: vector length does not match matrix");
  const index_t n = a.num_rows();
  const index_t* rp = a.row_ptr().data();
  const index_t* ci = a.col_idx().data();
  const double* av = a.values().data();
#pragma omp parallel for num_threads(workers) schedule(static) if (workers > 1)
  for (index_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (index_t t = rp[i]; t < rp[i + 1]; ++t) sum += av[t] * x[ci[t]];
    y[i] = sum;
  }
}

Vector spmv(const CsrMatrix& a, std::span<const double> x, int workers) {
  Vector y(static_cast<std::size_t>(a.num_rows()));
  spmv(a, x, y, workers);
  return y;
}

void spmv(const BcsrMatrix& a, std::span<const double> x, std::span<double> y,
          int workers) {
  if (x.size() != static_cast<std::size_t>(a.num_cols()) ||
      y.size() != static_cast<std::size_t>(a.num_rows()))
    throw DimensionError("spmv: vector length does not match matrix");
  const index_t bs = a.block_size();
  const index_t nbr = a.num_block_rows();
#pragma omp parallel for num_threads(workers) schedule(static) if (workers > 1)
  for (index_t bi = 0; bi < nbr; ++bi) {
    double* yb = y.data() + bi * bs;
    for (index_t r = 0; r < bs; ++r) yb[r] = 0.0;
    for (index_t t = a.row_ptr()[bi]; t < a.row_ptr()[bi + 1]; ++t) {
      const double* blk = a.block(t).data();
      const double* xb = x.data() + a.col_idx()[t] * bs;
      for (index_t c = 0; c < bs; ++c) {
        const double xc = xb[c];
        for (index_t r = 0; r < bs; ++r) yb[r] += blk[c * bs + r] * xc;
      }
    }
  }
}

Vector spmv(const BcsrMatrix& a, std::span<const double> x, int workers) {
  Vector y(static_cast<std::size_t>(a.num_rows()));
  spmv(a, x, y, workers);
  return y;
}

}  // namespace bilu
