#pragma once

#include <bilu/dense_block.hpp>
#include <bilu/sparse.hpp>
#include <bilu/symbolic.hpp>

#include <vector>

namespace bilu {

/// Block ILU(k) factors in the split form A ~ L * D * U'.
///
/// `lower` holds the strictly lower blocks of L and `upper_unit` the strictly
/// upper blocks of U' = D^-1 U; both have identity diagonal blocks that are
/// not stored. `diag_inv[i]` is the inverse of the i-th diagonal block of U.
struct BlockIlukFactors {
  index_t block_size = 1;
  index_t num_block_rows = 0;
  BcsrMatrix lower;
  std::vector<DenseBlock> diag_inv;
  BcsrMatrix upper_unit;
};

/// Copies `a` onto the larger pattern `fill`; positions of `fill` that `a`
/// does not store become explicit zeros. Throws StructuralError if `a` has a
/// position outside `fill`.
CsrMatrix materialize(const CsrMatrix& a, const PatternMatrix& fill);
BcsrMatrix materialize(const BcsrMatrix& a, const PatternMatrix& fill);

/// In-place ILU(0) restricted to the stored pattern. On return the strictly
/// lower entries hold L (unit diagonal implied) and the rest holds U.
/// Throws FactorizationError naming the row whose pivot is (near) zero.
void point_ilu0_factorize(CsrMatrix& a);

/// Block analogue of point_ilu0_factorize: A_ip <- A_ip * A_pp^-1 and
/// A_ij <- A_ij - A_ip * A_pj over stored blocks only. The diagonal blocks
/// are left as blocks of U (not inverted).
void block_ilu0_factorize(BcsrMatrix& a);

/// Splits the output of block_ilu0_factorize into L, D^-1 and U'.
BlockIlukFactors split_ldu(const BcsrMatrix& factored);

/// Full pipeline: block structure -> symbolic fill pattern -> zero backfill
/// -> block ILU(0) -> LDU' split. Errors carry the name of the failing stage.
BlockIlukFactors build_preconditioner(const BcsrMatrix& a, FillParams params);

}  // namespace bilu
