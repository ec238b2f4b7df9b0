#pragma once

#include <bilu/gmres.hpp>

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace bilu::bench {

struct MatrixSource {
  enum class Kind { poisson, matrix_market };
  Kind kind = Kind::poisson;
  index_t nx = 20, ny = 20, nz = 20;
  std::string path;

  static MatrixSource poisson(index_t nx, index_t ny, index_t nz) {
    return {Kind::poisson, nx, ny, nz, {}};
  }
  static MatrixSource matrix_market(std::string path) {
    return {Kind::matrix_market, 0, 0, 0, std::move(path)};
  }
};

enum class ReportFormat { table, csv };
enum class RhsKind { ones, random };

struct BenchPlan {
  MatrixSource source;
  std::vector<index_t> block_sizes{1};
  std::vector<int> k_levels{0};
  std::vector<int> threads{1};
  SolverConfig solver;
  ReportFormat output = ReportFormat::table;
  RhsKind rhs = RhsKind::ones;
  std::uint64_t seed = 0;
};

/// One (block size, k, threads) run.
struct BenchRecord {
  index_t block_size = 1;
  int k = 0;
  int threads = 1;
  double setup_seconds = 0.0;
  double solve_seconds = 0.0;
  int iterations = 0;
  bool converged = false;
  double final_residual = 0.0;

  friend bool operator==(const BenchRecord&, const BenchRecord&) = default;
};

/// A configuration that was not attempted, with the reason.
struct SkippedConfig {
  index_t block_size = 1;
  int k = 0;
  int threads = 1;
  std::string reason;
};

struct BenchOutcome {
  index_t num_rows = 0;
  index_t nnz = 0;
  std::vector<BenchRecord> records;
  std::vector<SkippedConfig> skipped;

  /// True if every attempted configuration converged.
  bool all_converged() const noexcept;
};

CsrMatrix load_matrix(const MatrixSource& source);

/// Right-hand side for `a`: A * ones, or A * x with x uniform in [-1, 1)
/// drawn from a generator seeded with `seed`.
Vector make_rhs(const CsrMatrix& a, RhsKind kind, std::uint64_t seed,
                int workers = 1);

/// Sweeps block sizes (outer), k levels, then thread counts (inner). Block
/// sizes that do not divide the dimension are skipped with a diagnostic;
/// non-convergence is recorded, not thrown.
BenchOutcome run_bench(const BenchPlan& plan);
BenchOutcome run_bench(const BenchPlan& plan, const CsrMatrix& a);

inline constexpr std::string_view kCsvHeader =
    "block_size,k,threads,setup_s,solve_s,iterations,converged,residual";

/// CSV (header + one line per record) or an aligned table with one section
/// per block size. The table adds a speedup column t(1 thread) / t(p threads)
/// on solve time wherever the single-thread run of the same (bs, k) exists.
std::string emit_report(std::span<const BenchRecord> records, ReportFormat format);

/// Inverse of the CSV report. Throws ParseError on malformed input.
std::vector<BenchRecord> parse_csv(std::string_view text);

}  // namespace bilu::bench
