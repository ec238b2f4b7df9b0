#pragma once

#include <bilu/factor.hpp>
#include <bilu/trisolve.hpp>

namespace bilu {

/// Applies M^-1 = (U')^-1 D^-1 L^-1 for a set of block ILU(k) factors.
///
/// At construction the block triangles L and U' are expanded to point-wise
/// strictly triangular CSR matrices (their diagonal blocks are identities, so
/// the point-wise operators are unit triangular) and level schedules are
/// built for both. D^-1 is kept as a block-diagonal BCSR matrix.
class BlockIlukPreconditioner {
 public:
  explicit BlockIlukPreconditioner(BlockIlukFactors factors, int workers = 1);

  index_t size() const noexcept { return size_; }
  int workers() const noexcept { return workers_; }
  void set_workers(int workers);

  const BlockIlukFactors& factors() const noexcept { return factors_; }
  const TriangularOperand& lower() const noexcept { return lower_; }
  const TriangularOperand& upper() const noexcept { return upper_; }
  const LevelSchedule& lower_schedule() const noexcept { return lower_schedule_; }
  const LevelSchedule& upper_schedule() const noexcept { return upper_schedule_; }
  const BcsrMatrix& diag_inverse() const noexcept { return diag_inv_; }

  /// L y = b, z = D^-1 y, U' x = z.
  void apply(std::span<const double> b, std::span<double> x) const;
  Vector apply(std::span<const double> b) const;

 private:
  BlockIlukFactors factors_;
  index_t size_;
  int workers_;
  TriangularOperand lower_;
  TriangularOperand upper_;
  LevelSchedule lower_schedule_;
  LevelSchedule upper_schedule_;
  BcsrMatrix diag_inv_;
};

inline Vector apply_preconditioner(const BlockIlukPreconditioner& m,
                                   std::span<const double> b) {
  return m.apply(b);
}

}  // namespace bilu
