#include <bilu/poisson.hpp>

#include <string>

namespace bilu {

CsrMatrix gen_poisson_3d(index_t nx, index_t ny, index_t nz) {
  if (nx < 1 || ny < 1 || nz < 1)
    throw DimensionError("gen_poisson_3d: grid dimensions must be >= 1, got " +
                         std::to_string(nx) + " x " + std::to_string(ny) +
                         " x " + std::to_string(nz));
  const std::int64_t n64 = std::int64_t{nx} * ny * nz;
  const std::int64_t nnz64 = 7 * n64 - 2 * (std::int64_t{ny} * nz +
                                            std::int64_t{nx} * nz +
                                            std::int64_t{nx} * ny);
  if (nnz64 > std::numeric_limits<index_t>::max())
    throw DimensionError("gen_poisson_3d: grid too large for 32-bit indices");
  const auto n = static_cast<index_t>(n64);

  std::vector<index_t> row_ptr(static_cast<std::size_t>(n) + 1);
  std::vector<index_t> col_idx;
  std::vector<double> values;
  col_idx.reserve(static_cast<std::size_t>(nnz64));
  values.reserve(static_cast<std::size_t>(nnz64));

  const index_t sx = 1;
  const index_t sy = nx;
  const index_t sz = nx * ny;
  index_t row = 0;
  row_ptr[0] = 0;
  for (index_t z = 0; z < nz; ++z) {
    for (index_t y = 0; y < ny; ++y) {
      for (index_t x = 0; x < nx; ++x, ++row) {
        auto push = [&](index_t col, double v) {
          col_idx.push_back(col);
          values.push_back(v);
        };
        // ascending column order
        if (z > 0) push(row - sz, -1.0);
        if (y > 0) push(row - sy, -1.0);
        if (x > 0) push(row - sx, -1.0);
        push(row, 6.0);
        if (x + 1 < nx) push(row + sx, -1.0);
        if (y + 1 < ny) push(row + sy, -1.0);
        if (z + 1 < nz) push(row + sz, -1.0);
        row_ptr[row + 1] = static_cast<index_t>(col_idx.size());
      }
    }
  }
  return CsrMatrix(n, n, std::move(row_ptr), std::move(col_idx),
                   std::move(values));
}

}  // namespace bilu
