#pragma once

#include <bilu/sparse.hpp>

namespace bilu {

/// Fill level bound of ILU(k). k = 0 keeps the original pattern.
struct FillParams {
  int k = 0;
};

/// Level-of-fill symbolic factorization.
///
/// Rows are eliminated in increasing order. Entries of `p` start at level 0,
/// every other position at infinity; eliminating pivot p from row i lowers
/// level(i, j) to level(i, p) + level(p, j) + 1 for each j > p in row p, and
/// only pivots with level(i, p) <= k are used. Once row i is finished every
/// position with level > k is dropped. The result contains `p`.
///
/// Throws StructuralError if a diagonal position is missing and
/// std::invalid_argument if k < 0.
PatternMatrix symbolic_phase(const PatternMatrix& p, FillParams params);

}  // namespace bilu
