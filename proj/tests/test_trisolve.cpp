#include <bilu/poisson.hpp>
#include <bilu/preconditioner.hpp>
#include <bilu/trisolve.hpp>

#include <doctest.h>

#include "support/oracles.hpp"

using namespace bilu;
using bilu::test::Dense;

namespace {

CsrMatrix strict_part(const CsrMatrix& a, Triangle tri) {
  std::vector<Triplet> t;
  for (index_t i = 0; i < a.num_rows(); ++i) {
    auto c = a.row_cols(i);
    auto v = a.row_values(i);
    for (std::size_t q = 0; q < c.size(); ++q)
      if (tri == Triangle::lower ? c[q] < i : c[q] > i) t.push_back({i, c[q], v[q]});
  }
  return csr_from_triplets(a.num_rows(), a.num_cols(), t);
}

CsrMatrix bidiagonal(index_t n, double sub) {
  std::vector<Triplet> t;
  for (index_t i = 1; i < n; ++i) t.push_back({i, i - 1, sub});
  return csr_from_triplets(n, n, t);
}

Vector random_vector(index_t n, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> v(-1.0, 1.0);
  Vector x(static_cast<std::size_t>(n));
  for (double& e : x) e = v(gen);
  return x;
}

Vector dense_unit_solve(const CsrMatrix& strict, Triangle tri, const Vector& b) {
  const Dense d = bilu::test::to_dense(strict);
  return tri == Triangle::lower ? bilu::test::forward_unit(d, b) : bilu::test::backward_unit(d, b);
}

}  // namespace

TEST_SUITE("build_level_schedule") {
  TEST_CASE("no off-diagonal entries gives one level") {
    const TriangularOperand t(csr_from_triplets(6, 6, {}), Triangle::lower);
    const LevelSchedule s = build_level_schedule(t);
    CHECK(s.num_levels() == 1);
    CHECK(s.level(0).size() == 6);
  }

  TEST_CASE("bidiagonal chain has one row per level") {
    const TriangularOperand t(bidiagonal(5, -1.0), Triangle::lower);
    const LevelSchedule s = build_level_schedule(t);
    CHECK(s.num_levels() == 5);
    for (index_t l = 0; l < 5; ++l) {
      REQUIRE(s.level(l).size() == 1);
      CHECK(s.level(l)[0] == l);
    }
  }

  TEST_CASE("2D five-point grids need nx + ny - 1 levels") {
    for (auto [nx, ny] : {std::pair<index_t, index_t>{10, 10}, {5, 5}, {13, 7}, {1, 9}}) {
      const CsrMatrix a = gen_poisson_3d(nx, ny, 1);
      for (Triangle tri : {Triangle::lower, Triangle::upper}) {
        const LevelSchedule s = build_level_schedule(TriangularOperand(strict_part(a, tri), tri));
        CHECK(s.num_levels() == nx + ny - 1);
      }
    }
  }

  TEST_CASE("levels equal the longest dependency chains (property)") {
    std::mt19937_64 gen(21);
    for (int trial = 0; trial < 20; ++trial) {
      const index_t n = 1 + static_cast<index_t>(gen() % 500);
      const Triangle tri = trial % 2 ? Triangle::upper : Triangle::lower;
      const CsrMatrix m =
          bilu::test::random_strict_triangle(n, 3.0 / n, tri == Triangle::lower, gen);
      const TriangularOperand t(m, tri);
      const LevelSchedule s = build_level_schedule(t);
      const auto expect = bilu::test::longest_path_levels(m);
      CHECK(std::equal(expect.begin(), expect.end(), s.level_of_row().begin(),
                       s.level_of_row().end()));
      // every row appears exactly once and groups agree with level_of_row
      std::vector<int> seen(static_cast<std::size_t>(n), 0);
      for (index_t l = 0; l < s.num_levels(); ++l) {
        CHECK(!s.level(l).empty());
        for (index_t i : s.level(l)) {
          ++seen[i];
          CHECK(s.level_of_row()[i] == l + 1);
        }
      }
      CHECK(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }));
    }
  }

  TEST_CASE("operand rejects entries on the wrong side") {
    const CsrMatrix lower = bidiagonal(4, 1.0);
    CHECK_THROWS_AS(TriangularOperand(lower, Triangle::upper), StructuralError);
    const CsrMatrix diag = csr_from_triplets(2, 2, std::vector<Triplet>{{1, 1, 1.0}});
    CHECK_THROWS_AS(TriangularOperand(diag, Triangle::lower), StructuralError);
  }
}

TEST_SUITE("solve_unit_triangular") {
  TEST_CASE("no off-diagonal entries returns b") {
    const TriangularOperand t(csr_from_triplets(4, 4, {}), Triangle::upper);
    const LevelSchedule s = build_level_schedule(t);
    const Vector b{1, -2, 3.5, 0};
    CHECK(solve_unit_triangular(t, s, b) == b);
  }

  TEST_CASE("bidiagonal with -1 below the diagonal and b = e_1") {
    const TriangularOperand t(bidiagonal(5, -1.0), Triangle::lower);
    const Vector x = solve_unit_triangular(t, build_level_schedule(t), Vector{1, 0, 0, 0, 0});
    CHECK(x == Vector(5, 1.0));
  }

  TEST_CASE("random triangles agree with dense substitution") {
    std::mt19937_64 gen(22);
    for (int trial = 0; trial < 30; ++trial) {
      const index_t n = 1 + static_cast<index_t>(gen() % 200);
      const Triangle tri = trial % 2 ? Triangle::upper : Triangle::lower;
      const CsrMatrix m =
          bilu::test::random_strict_triangle(n, 4.0 / n, tri == Triangle::lower, gen);
      const TriangularOperand t(m, tri);
      const Vector b = random_vector(n, gen);
      const Vector x = solve_unit_triangular(t, build_level_schedule(t), b);
      const Vector ref = dense_unit_solve(m, tri, b);
      CHECK(bilu::test::max_abs_diff(x, ref) <= 1e-13 * std::max(1.0, bilu::test::max_abs(ref)));
    }
  }

  TEST_CASE("residual of the computed solution (property)") {
    std::mt19937_64 gen(23);
    for (int trial = 0; trial < 10; ++trial) {
      const index_t n = 50 + static_cast<index_t>(gen() % 300);
      const CsrMatrix m = bilu::test::random_strict_triangle(n, 5.0 / n, true, gen);
      const TriangularOperand t(m, Triangle::lower);
      const Vector b = random_vector(n, gen);
      const Vector x = solve_unit_triangular(t, build_level_schedule(t), b);
      Vector r = spmv(m, x);
      for (index_t i = 0; i < n; ++i) r[i] += x[i] - b[i];
      double xnorm = 0.0, tnorm = 0.0;
      for (double v : x) xnorm = std::max(xnorm, std::abs(v));
      for (index_t i = 0; i < n; ++i) {
        double s = 1.0;
        for (double v : m.row_values(i)) s += std::abs(v);
        tnorm = std::max(tnorm, s);
      }
      CHECK(bilu::test::max_abs(r) <= 64 * 1e-16 * tnorm * xnorm + 1e-15);
    }
  }

  TEST_CASE("worker count does not change a single bit") {
    std::mt19937_64 gen(24);
    const CsrMatrix a = gen_poisson_3d(12, 11, 10);
    for (Triangle tri : {Triangle::lower, Triangle::upper}) {
      const TriangularOperand t(strict_part(a, tri), tri);
      const LevelSchedule s = build_level_schedule(t);
      const Vector b = random_vector(a.num_rows(), gen);
      const Vector ref = solve_unit_triangular(t, s, b, 1);
      for (int w : {2, 4, 8}) CHECK(solve_unit_triangular(t, s, b, w) == ref);
    }
  }

  TEST_CASE("schedule must belong to the operand") {
    const TriangularOperand lower(bidiagonal(5, 1.0), Triangle::lower);
    const TriangularOperand other(csr_from_triplets(5, 5, {}), Triangle::lower);
    const LevelSchedule s = build_level_schedule(other);
    CHECK_THROWS(solve_unit_triangular(lower, s, Vector(5, 1.0)));
    const TriangularOperand upper(strict_part(gen_poisson_3d(5, 1, 1), Triangle::upper),
                                  Triangle::upper);
    CHECK_THROWS(solve_unit_triangular(upper, build_level_schedule(lower), Vector(5, 1.0)));
    CHECK_THROWS_AS(solve_unit_triangular(lower, build_level_schedule(lower), Vector(4, 1.0)),
                    DimensionError);
  }
}

TEST_SUITE("apply_preconditioner") {
  TEST_CASE("identity factors leave b unchanged") {
    std::vector<double> vals;
    for (int q = 0; q < 4; ++q) {
      const auto id = DenseBlock::identity(2);
      vals.insert(vals.end(), id.data().begin(), id.data().end());
    }
    const BcsrMatrix a(2, 4, 4, {0, 1, 2, 3, 4}, {0, 1, 2, 3}, vals);
    const BlockIlukPreconditioner m(build_preconditioner(a, {1}));
    const Vector b{1, 2, 3, 4, 5, 6, 7, 8};
    CHECK(apply_preconditioner(m, b) == b);
    CHECK(apply_preconditioner(m, Vector(8, 0.0)) == Vector(8, 0.0));
  }

  TEST_CASE("dense pattern makes the preconditioner an exact solve") {
    std::mt19937_64 gen(25);
    for (index_t bs : {1, 2, 3}) {
      const index_t n = 12 * bs;
      const CsrMatrix a = bilu::test::random_dense_dd(n, gen);
      const BlockIlukPreconditioner m(build_preconditioner(bcsr_from_csr(a, bs), {0}));
      const Vector b = random_vector(n, gen);
      const Vector x = apply_preconditioner(m, b);
      const Vector ref = bilu::test::dense_solve(bilu::test::to_dense(a), b);
      CHECK(bilu::test::max_abs_diff(x, ref) <= 1e-10 * bilu::test::max_abs(ref));
    }
  }

  TEST_CASE("agrees with sequential block substitution") {
    std::mt19937_64 gen(26);
    for (index_t bs : {1, 2, 4}) {
      for (int k : {0, 2}) {
        const BcsrMatrix a = bcsr_from_csr(bilu::test::random_dd_matrix(40 * bs, 4, gen), bs);
        const BlockIlukFactors f = build_preconditioner(a, {k});
        const BlockIlukPreconditioner m(f, 2);
        const Vector b = random_vector(a.num_rows(), gen);
        const Vector x = apply_preconditioner(m, b);
        const Vector ref = bilu::test::block_substitution(f, b);
        CHECK(bilu::test::max_abs_diff(x, ref) <= 1e-12 * std::max(1.0, bilu::test::max_abs(ref)));
      }
    }
  }

  TEST_CASE("Poisson block preconditioner is deterministic across workers") {
    const BcsrMatrix a = bcsr_from_csr(gen_poisson_3d(8, 8, 8), 4);
    BlockIlukPreconditioner m(build_preconditioner(a, {1}), 1);
    const Vector b(a.num_rows(), 1.0);
    const Vector ref = m.apply(b);
    for (int w : {2, 4, 8}) {
      m.set_workers(w);
      CHECK(m.apply(b) == ref);
    }
  }
}
