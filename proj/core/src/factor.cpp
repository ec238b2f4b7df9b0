#include <bilu/factor.hpp>

#include <cmath>
#include <string>

namespace bilu {

namespace {

constexpr double kZeroPivot = 1e-300;

// Fills `slot_of` with the slots of one row (column -> slot) and returns the
// columns touched so they can be reset afterwards.
template <typename Matrix>
void scatter_row(const Matrix& a, index_t i, std::vector<index_t>& slot_of) {
  const index_t base = a.row_ptr()[i];
  auto cols = a.row_cols(i);
  for (std::size_t t = 0; t < cols.size(); ++t)
    slot_of[cols[t]] = base + static_cast<index_t>(t);
}

template <typename Matrix>
void clear_row(const Matrix& a, index_t i, std::vector<index_t>& slot_of) {
  for (index_t j : a.row_cols(i)) slot_of[j] = npos;
}

template <typename Matrix>
std::vector<index_t> diagonal_slots(const Matrix& a, const char* who) {
  std::vector<index_t> diag(static_cast<std::size_t>(a.row_ptr().size() - 1));
  for (index_t i = 0; i < static_cast<index_t>(diag.size()); ++i) {
    diag[i] = a.find(i, i);
    if (diag[i] == npos)
      throw StructuralError(std::string(who) + ": diagonal missing in row " +
                            std::to_string(i));
  }
  return diag;
}

struct FillLayout {
  std::vector<index_t> row_ptr;
  std::vector<index_t> col_idx;
  // source slot in `a` for every slot of the result, npos for fill-in
  std::vector<index_t> source;
};

template <typename Matrix>
FillLayout layout_on(const Matrix& a, const PatternMatrix& fill, index_t n) {
  if (fill.size() != n)
    throw DimensionError("materialize: pattern dimension " +
                         std::to_string(fill.size()) + " != matrix dimension " +
                         std::to_string(n));
  FillLayout out;
  out.row_ptr.assign(static_cast<std::size_t>(n) + 1, 0);
  out.col_idx.reserve(fill.nnz());
  out.source.reserve(fill.nnz());
  for (index_t i = 0; i < n; ++i) {
    auto src = a.row_cols(i);
    std::size_t s = 0;
    for (index_t j : fill.row(i)) {
      if (s < src.size() && src[s] < j)
        throw StructuralError("materialize: position (" + std::to_string(i) +
                              ", " + std::to_string(src[s]) +
                              ") of the matrix is missing from the pattern");
      if (s < src.size() && src[s] == j) {
        out.source.push_back(a.row_ptr()[i] + static_cast<index_t>(s));
        ++s;
      } else {
        out.source.push_back(npos);
      }
      out.col_idx.push_back(j);
    }
    if (s < src.size())
      throw StructuralError("materialize: position (" + std::to_string(i) +
                            ", " + std::to_string(src[s]) +
                            ") of the matrix is missing from the pattern");
    out.row_ptr[i + 1] = static_cast<index_t>(out.col_idx.size());
  }
  return out;
}

template <typename Error>
[[noreturn]] void rethrow_tagged(const char* stage, const Error& e) {
  throw Error(std::string(stage) + ": " + e.what());
}

}  // namespace

CsrMatrix materialize(const CsrMatrix& a, const PatternMatrix& fill) {
  if (a.num_rows() != a.num_cols())
    throw DimensionError("materialize: matrix is not square");
  FillLayout lay = layout_on(a, fill, a.num_rows());
  std::vector<double> values(lay.col_idx.size(), 0.0);
  for (std::size_t t = 0; t < values.size(); ++t)
    if (lay.source[t] != npos) values[t] = a.values()[lay.source[t]];
  return CsrMatrix(a.num_rows(), a.num_cols(), std::move(lay.row_ptr),
                   std::move(lay.col_idx), std::move(values));
}

BcsrMatrix materialize(const BcsrMatrix& a, const PatternMatrix& fill) {
  if (a.num_block_rows() != a.num_block_cols())
    throw DimensionError("materialize: matrix is not square");
  FillLayout lay = layout_on(a, fill, a.num_block_rows());
  const std::size_t elems = a.block_elems();
  std::vector<double> values(lay.col_idx.size() * elems, 0.0);
  for (std::size_t t = 0; t < lay.col_idx.size(); ++t) {
    if (lay.source[t] == npos) continue;
    auto blk = a.block(lay.source[t]);
    std::copy(blk.begin(), blk.end(), values.begin() + t * elems);
  }
  return BcsrMatrix(a.block_size(), a.num_block_rows(), a.num_block_cols(),
                    std::move(lay.row_ptr), std::move(lay.col_idx),
                    std::move(values));
}

void point_ilu0_factorize(CsrMatrix& a) {
  if (a.num_rows() != a.num_cols())
    throw DimensionError("point_ilu0_factorize: matrix is not square");
  const index_t n = a.num_rows();
  const auto diag = diagonal_slots(a, "point_ilu0_factorize");
  auto val = a.values();
  std::vector<index_t> slot_of(static_cast<std::size_t>(n), npos);

  for (index_t i = 0; i < n; ++i) {
    scatter_row(a, i, slot_of);
    for (index_t t = a.row_ptr()[i]; t < diag[i]; ++t) {
      const index_t p = a.col_idx()[t];
      val[t] /= val[diag[p]];
      const double lip = val[t];
      for (index_t s = diag[p] + 1; s < a.row_ptr()[p + 1]; ++s) {
        const index_t ij = slot_of[a.col_idx()[s]];
        if (ij != npos) val[ij] -= lip * val[s];
      }
    }
    clear_row(a, i, slot_of);
    if (!(std::abs(val[diag[i]]) >= kZeroPivot))
      throw FactorizationError(
          "point_ilu0_factorize: zero pivot in row " + std::to_string(i), i);
  }
}

void block_ilu0_factorize(BcsrMatrix& a) {
  if (a.num_block_rows() != a.num_block_cols())
    throw DimensionError("block_ilu0_factorize: matrix is not square");
  const index_t n = a.num_block_rows();
  const index_t bs = a.block_size();
  const std::size_t elems = a.block_elems();
  const auto diag = diagonal_slots(a, "block_ilu0_factorize");
  std::vector<double> diag_inv(static_cast<std::size_t>(n) * elems);
  std::vector<double> tmp(elems);
  std::vector<index_t> slot_of(static_cast<std::size_t>(n), npos);

  for (index_t i = 0; i < n; ++i) {
    scatter_row(a, i, slot_of);
    for (index_t t = a.row_ptr()[i]; t < diag[i]; ++t) {
      const index_t p = a.col_idx()[t];
      auto aip = a.block(t);
      kernels::gemm(aip, std::span<const double>(diag_inv).subspan(p * elems, elems),
                    tmp, bs);
      std::copy(tmp.begin(), tmp.end(), aip.begin());
      for (index_t s = diag[p] + 1; s < a.row_ptr()[p + 1]; ++s) {
        const index_t ij = slot_of[a.col_idx()[s]];
        if (ij != npos) kernels::gemm_sub(a.block(ij), aip, a.block(s), bs);
      }
    }
    clear_row(a, i, slot_of);
    try {
      kernels::invert(a.block(diag[i]),
                      std::span<double>(diag_inv).subspan(i * elems, elems), bs);
    } catch (const FactorizationError& e) {
      throw FactorizationError("block_ilu0_factorize: block row " +
                                   std::to_string(i) + ": " + e.what(),
                               i);
    }
  }
}

BlockIlukFactors split_ldu(const BcsrMatrix& factored) {
  if (factored.num_block_rows() != factored.num_block_cols())
    throw DimensionError("split_ldu: matrix is not square");
  const index_t n = factored.num_block_rows();
  const index_t bs = factored.block_size();
  const std::size_t elems = factored.block_elems();
  const auto diag = diagonal_slots(factored, "split_ldu");

  BlockIlukFactors out;
  out.block_size = bs;
  out.num_block_rows = n;
  out.diag_inv.reserve(static_cast<std::size_t>(n));

  std::vector<index_t> l_ptr{0}, u_ptr{0}, l_cols, u_cols;
  std::vector<double> l_vals, u_vals;
  for (index_t i = 0; i < n; ++i) {
    auto d = factored.block(diag[i]);
    try {
      out.diag_inv.push_back(
          block_invert(DenseBlock(bs, std::vector<double>(d.begin(), d.end()))));
    } catch (const FactorizationError& e) {
      throw FactorizationError(
          "split_ldu: block row " + std::to_string(i) + ": " + e.what(), i);
    }
    const auto dinv = out.diag_inv.back().data();
    for (index_t t = factored.row_ptr()[i]; t < diag[i]; ++t) {
      l_cols.push_back(factored.col_idx()[t]);
      auto blk = factored.block(t);
      l_vals.insert(l_vals.end(), blk.begin(), blk.end());
    }
    for (index_t t = diag[i] + 1; t < factored.row_ptr()[i + 1]; ++t) {
      u_cols.push_back(factored.col_idx()[t]);
      u_vals.resize(u_vals.size() + elems);
      kernels::gemm(dinv, factored.block(t),
                    std::span<double>(u_vals).last(elems), bs);
    }
    l_ptr.push_back(static_cast<index_t>(l_cols.size()));
    u_ptr.push_back(static_cast<index_t>(u_cols.size()));
  }
  out.lower = BcsrMatrix(bs, n, n, std::move(l_ptr), std::move(l_cols),
                         std::move(l_vals));
  out.upper_unit = BcsrMatrix(bs, n, n, std::move(u_ptr), std::move(u_cols),
                              std::move(u_vals));
  return out;
}

BlockIlukFactors build_preconditioner(const BcsrMatrix& a, FillParams params) {
  PatternMatrix fill;
  try {
    fill = symbolic_phase(extract_point_pattern(a), params);
  } catch (const StructuralError& e) {
    rethrow_tagged("symbolic", e);
  } catch (const DimensionError& e) {
    rethrow_tagged("symbolic", e);
  }

  BcsrMatrix work;
  try {
    work = materialize(a, fill);
  } catch (const StructuralError& e) {
    rethrow_tagged("materialize", e);
  }

  try {
    block_ilu0_factorize(work);
  } catch (const FactorizationError& e) {
    throw FactorizationError(std::string("factorize: ") + e.what(), e.row());
  }

  try {
    return split_ldu(work);
  } catch (const FactorizationError& e) {
    throw FactorizationError(std::string("split: ") + e.what(), e.row());
  }
}

}  // namespace bilu
