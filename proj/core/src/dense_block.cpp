#include <bilu/dense_block.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

namespace bilu {

DenseBlock::DenseBlock(index_t bs)
    : bs_(bs), data_(static_cast<std::size_t>(bs) * bs, 0.0) {
  if (bs < 1) throw DimensionError("DenseBlock: block size must be >= 1");
}

DenseBlock::DenseBlock(index_t bs, std::vector<double> col_major)
    : bs_(bs), data_(std::move(col_major)) {
  if (bs < 1) throw DimensionError("DenseBlock: block size must be >= 1");
  if (data_.size() != static_cast<std::size_t>(bs) * bs)
    throw DimensionError("DenseBlock: expected bs^2 values");
}

DenseBlock DenseBlock::identity(index_t bs) {
  DenseBlock b(bs);
  for (index_t i = 0; i < bs; ++i) b(i, i) = 1.0;
  return b;
}

DenseBlock DenseBlock::from_rows(
    std::initializer_list<std::initializer_list<double>> rows) {
  const auto bs = static_cast<index_t>(rows.size());
  DenseBlock b(bs);
  index_t r = 0;
  for (const auto& row : rows) {
    if (static_cast<index_t>(row.size()) != bs)
      throw DimensionError("DenseBlock::from_rows: ragged rows");
    index_t c = 0;
    for (double v : row) b(r, c++) = v;
    ++r;
  }
  return b;
}

namespace kernels {

void invert(std::span<const double> in, std::span<double> out, index_t bs) {
  const auto elems = static_cast<std::size_t>(bs) * bs;
  if (in.size() != elems || out.size() != elems)
    throw DimensionError("invert: span length != bs^2");

  std::vector<double> lu(in.begin(), in.end());
  std::vector<index_t> perm(static_cast<std::size_t>(bs));
  std::iota(perm.begin(), perm.end(), 0);
  auto at = [&](index_t r, index_t c) -> double& { return lu[c * bs + r]; };

  double scale = 0.0;
  for (double v : in) scale = std::max(scale, std::abs(v));
  const double threshold = kSingularBlockTolerance * scale;
  if (!(scale > 0.0)) throw FactorizationError("singular block (all zero)");

  for (index_t k = 0; k < bs; ++k) {
    index_t piv = k;
    for (index_t r = k + 1; r < bs; ++r)
      if (std::abs(at(r, k)) > std::abs(at(piv, k))) piv = r;
    if (!(std::abs(at(piv, k)) >= threshold))
      throw FactorizationError("singular block: pivot " +
                               std::to_string(std::abs(at(piv, k))) +
                               " below tolerance");
    if (piv != k) {
      for (index_t c = 0; c < bs; ++c) std::swap(at(k, c), at(piv, c));
      std::swap(perm[k], perm[piv]);
    }
    const double inv_pivot = 1.0 / at(k, k);
    for (index_t r = k + 1; r < bs; ++r) {
      at(r, k) *= inv_pivot;
      const double l = at(r, k);
      if (l == 0.0) continue;
      for (index_t c = k + 1; c < bs; ++c) at(r, c) -= l * at(k, c);
    }
  }

  // solve LU x = P e_c for each unit vector
  std::vector<double> x(static_cast<std::size_t>(bs));
  for (index_t c = 0; c < bs; ++c) {
    for (index_t r = 0; r < bs; ++r) x[r] = perm[r] == c ? 1.0 : 0.0;
    for (index_t r = 1; r < bs; ++r)
      for (index_t k = 0; k < r; ++k) x[r] -= at(r, k) * x[k];
    for (index_t r = bs - 1; r >= 0; --r) {
      for (index_t k = r + 1; k < bs; ++k) x[r] -= at(r, k) * x[k];
      x[r] /= at(r, r);
    }
    std::copy(x.begin(), x.end(), out.begin() + c * bs);
  }
}

void gemm_sub(std::span<double> c, std::span<const double> a,
              std::span<const double> b, index_t bs) {
  for (index_t j = 0; j < bs; ++j) {
    double* cj = c.data() + j * bs;
    for (index_t k = 0; k < bs; ++k) {
      const double bkj = b[j * bs + k];
      if (bkj == 0.0) continue;
      const double* ak = a.data() + k * bs;
      for (index_t i = 0; i < bs; ++i) cj[i] -= ak[i] * bkj;
    }
  }
}

void gemm(std::span<const double> a, std::span<const double> b,
          std::span<double> out, index_t bs) {
  std::fill(out.begin(), out.end(), 0.0);
  for (index_t j = 0; j < bs; ++j) {
    double* oj = out.data() + j * bs;
    for (index_t k = 0; k < bs; ++k) {
      const double bkj = b[j * bs + k];
      if (bkj == 0.0) continue;
      const double* ak = a.data() + k * bs;
      for (index_t i = 0; i < bs; ++i) oj[i] += ak[i] * bkj;
    }
  }
}

}  // namespace kernels

DenseBlock block_invert(const DenseBlock& b) {
  DenseBlock out(b.size());
  kernels::invert(b.data(), out.data(), b.size());
  return out;
}

DenseBlock block_gemm_sub(const DenseBlock& c, const DenseBlock& a,
                          const DenseBlock& b) {
  if (a.size() != c.size() || b.size() != c.size())
    throw DimensionError("block_gemm_sub: block sizes differ");
  DenseBlock out = c;
  kernels::gemm_sub(out.data(), a.data(), b.data(), c.size());
  return out;
}

DenseBlock block_multiply(const DenseBlock& a, const DenseBlock& b) {
  if (a.size() != b.size())
    throw DimensionError("block_multiply: block sizes differ");
  DenseBlock out(a.size());
  kernels::gemm(a.data(), b.data(), out.data(), a.size());
  return out;
}

}  // namespace bilu
