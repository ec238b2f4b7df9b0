#pragma once

#include <bilu/symbolic.hpp>

namespace bilu {

struct CoupledIlukResult {
  /// In-place L\U factors restricted to `pattern`: unit-lower L strictly
  /// below the diagonal, U on and above it.
  CsrMatrix factors;
  PatternMatrix pattern;
};

/// Point-wise ILU(k) with level bookkeeping and numeric updates interleaved
/// in a single dense sweep. This is the undecoupled reference the
/// symbolic + ILU(0) pipeline is checked against; it is O(n^3) and meant for
/// small test matrices only.
///
/// Throws FactorizationError naming the pivot row on a zero pivot.
CoupledIlukResult coupled_iluk_oracle(const CsrMatrix& a, FillParams params);

}  // namespace bilu
