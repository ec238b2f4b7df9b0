#pragma once

#include <bilu/preconditioner.hpp>
#include <bilu/sparse.hpp>

#include <functional>
#include <string_view>

namespace bilu {

/// y = Op(x); used for both the system matrix and the preconditioner.
using LinearOperator =
    std::function<void(std::span<const double> x, std::span<double> y)>;

LinearOperator identity_operator();

enum class RhsMode {
  ones_solution,  ///< b = A * ones
  given,          ///< caller supplies b
};

struct SolverConfig {
  int restart = 20;
  int max_iters = 10000;
  double rel_tol = 1e-6;
  /// Arnoldi breakdown threshold on the new basis vector norm.
  double abs_tol = 1e-14;
  RhsMode rhs_mode = RhsMode::ones_solution;
  /// Threads used by matrix products inside the solver.
  int workers = 1;
};

enum class Termination { converged, lucky_breakdown, stagnation, max_iters };

std::string_view to_string(Termination t);

struct SolveStats {
  /// Arnoldi steps, i.e. products with M^-1 A, summed over restarts.
  int iterations = 0;
  /// All preconditioner applications, including the one per restart that
  /// forms the preconditioned residual.
  int preconditioner_applications = 0;
  int restarts = 0;
  bool converged = false;
  Termination termination = Termination::max_iters;
  /// ||b - A x|| / ||b|| at exit.
  double final_relative_residual = 0.0;
  /// Preconditioned residual estimate per iteration, relative to the first
  /// preconditioned residual.
  std::vector<double> residual_history;
  double setup_seconds = 0.0;
  double solve_seconds = 0.0;
  std::string_view preconditioning = "left";
};

struct SolveResult {
  Vector x;
  SolveStats stats;
};

/// Restarted GMRES(m) with left preconditioning, modified Gram-Schmidt and
/// Givens rotations. Iterates until the preconditioned residual drops by
/// rel_tol, then confirms ||b - A x|| <= rel_tol ||b||; if the true residual
/// is still too large the preconditioned target is tightened and the solver
/// restarts. Hitting max_iters is reported in the stats, not thrown.
SolveResult gmres(const LinearOperator& a, std::span<const double> b,
                  const LinearOperator& m, const SolverConfig& cfg,
                  std::span<const double> x0 = {});

SolveResult gmres(const CsrMatrix& a, std::span<const double> b,
                  const BlockIlukPreconditioner& m, const SolverConfig& cfg);
SolveResult gmres(const BcsrMatrix& a, std::span<const double> b,
                  const BlockIlukPreconditioner& m, const SolverConfig& cfg);

}  // namespace bilu
