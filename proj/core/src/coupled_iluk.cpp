#include <bilu/coupled_iluk.hpp>

#include <algorithm>
#include <cmath>
#include <string>

namespace bilu {

CoupledIlukResult coupled_iluk_oracle(const CsrMatrix& a, FillParams params) {
  if (params.k < 0)
    throw std::invalid_argument("coupled_iluk_oracle: k must be >= 0");
  if (a.num_rows() != a.num_cols())
    throw DimensionError("coupled_iluk_oracle: matrix is not square");
  const index_t n = a.num_rows();
  const auto nn = static_cast<std::size_t>(n);
  const int k = params.k;
  constexpr int kInf = std::numeric_limits<int>::max() / 4;

  std::vector<double> val(nn * nn, 0.0);
  std::vector<int> lev(nn * nn, kInf);
  auto idx = [n](index_t i, index_t j) {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(n) +
           static_cast<std::size_t>(j);
  };

  for (index_t i = 0; i < n; ++i) {
    if (a.find(i, i) == npos)
      throw StructuralError("coupled_iluk_oracle: diagonal entry missing in row " +
                            std::to_string(i));
    auto cols = a.row_cols(i);
    auto vals = a.row_values(i);
    for (std::size_t t = 0; t < cols.size(); ++t) {
      val[idx(i, cols[t])] = vals[t];
      lev[idx(i, cols[t])] = 0;
    }
  }

  for (index_t i = 1; i < n; ++i) {
    for (index_t p = 0; p < i; ++p) {
      if (lev[idx(i, p)] > k) continue;
      const double pivot = val[idx(p, p)];
      if (std::abs(pivot) < 1e-300)
        throw FactorizationError(
            "coupled_iluk_oracle: zero pivot in row " + std::to_string(p), p);
      val[idx(i, p)] /= pivot;
      const double lip = val[idx(i, p)];
      for (index_t j = p + 1; j < n; ++j) {
        val[idx(i, j)] -= lip * val[idx(p, j)];
        lev[idx(i, j)] =
            std::min(lev[idx(i, j)], lev[idx(i, p)] + lev[idx(p, j)] + 1);
      }
    }
    for (index_t j = 0; j < n; ++j) {
      if (lev[idx(i, j)] > k) val[idx(i, j)] = 0.0;
    }
  }

  std::vector<index_t> row_ptr(nn + 1, 0);
  std::vector<index_t> col_idx;
  std::vector<double> values;
  std::vector<std::vector<index_t>> rows(nn);
  for (index_t i = 0; i < n; ++i) {
    for (index_t j = 0; j < n; ++j) {
      if (lev[idx(i, j)] > k) continue;
      col_idx.push_back(j);
      values.push_back(val[idx(i, j)]);
      rows[i].push_back(j);
    }
    row_ptr[i + 1] = static_cast<index_t>(col_idx.size());
  }
  return {CsrMatrix(n, n, std::move(row_ptr), std::move(col_idx),
                    std::move(values)),
          PatternMatrix(std::move(rows))};
}

}  // namespace bilu
