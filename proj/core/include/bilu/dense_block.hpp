#pragma once

#include <bilu/common.hpp>

#include <initializer_list>
#include <span>
#include <vector>

namespace bilu {

/// Small dense bs x bs matrix stored column-major, the element type of the
/// block-wise factorization.
class DenseBlock {
 public:
  explicit DenseBlock(index_t bs = 1);
  DenseBlock(index_t bs, std::vector<double> col_major);

  static DenseBlock identity(index_t bs);
  /// Row-major literal, e.g. from_rows({{1, 2}, {3, 4}}).
  static DenseBlock from_rows(
      std::initializer_list<std::initializer_list<double>> rows);

  index_t size() const noexcept { return bs_; }
  double& operator()(index_t r, index_t c) noexcept { return data_[c * bs_ + r]; }
  double operator()(index_t r, index_t c) const noexcept {
    return data_[c * bs_ + r];
  }
  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }

  friend bool operator==(const DenseBlock&, const DenseBlock&) = default;

 private:
  index_t bs_;
  std::vector<double> data_;
};

/// Relative pivot threshold used by block_invert: a pivot smaller than this
/// times the largest entry magnitude marks the block singular.
inline constexpr double kSingularBlockTolerance = 1e-13;

/// Inverse by dense LU with partial pivoting. Throws FactorizationError
/// (row() == npos) when the block is singular to working precision.
DenseBlock block_invert(const DenseBlock& b);

/// C - A * B.
DenseBlock block_gemm_sub(const DenseBlock& c, const DenseBlock& a,
                          const DenseBlock& b);

/// A * B.
DenseBlock block_multiply(const DenseBlock& a, const DenseBlock& b);

/// Raw kernels on column-major spans of length bs*bs; the DenseBlock
/// functions above and the block factorization are built on these.
namespace kernels {

void invert(std::span<const double> in, std::span<double> out, index_t bs);
/// c -= a * b
void gemm_sub(std::span<double> c, std::span<const double> a,
              std::span<const double> b, index_t bs);
/// out = a * b; `out` must not alias `a` or `b`.
void gemm(std::span<const double> a, std::span<const double> b,
          std::span<double> out, index_t bs);

}  // namespace kernels

}  // namespace bilu
