#include <bilu/coupled_iluk.hpp>
#include <bilu/dense_block.hpp>
#include <bilu/factor.hpp>
#include <bilu/poisson.hpp>

#include <doctest.h>

#include "support/oracles.hpp"

using namespace bilu;
using bilu::test::Dense;

namespace {

Dense dense_of(const DenseBlock& b) {
  Dense d(b.size(), b.size());
  for (index_t r = 0; r < b.size(); ++r)
    for (index_t c = 0; c < b.size(); ++c) d(r, c) = b(r, c);
  return d;
}

DenseBlock random_block(index_t bs, std::mt19937_64& gen, double diag_boost = 0.0) {
  std::uniform_real_distribution<double> v(-1.0, 1.0);
  DenseBlock b(bs);
  for (index_t r = 0; r < bs; ++r)
    for (index_t c = 0; c < bs; ++c) b(r, c) = v(gen) + (r == c ? diag_boost : 0.0);
  return b;
}

// Block matrix built from a point-wise diagonally dominant matrix; every
// diagonal block is then nonsingular and so are the block pivots.
BcsrMatrix random_block_matrix(index_t nb, index_t bs, std::mt19937_64& gen) {
  return bcsr_from_csr(bilu::test::random_dd_matrix(nb * bs, 3, gen), bs);
}

// expanded U (diagonal and upper blocks) of a factored block matrix
Dense upper_of(const BcsrMatrix& f) {
  const Dense all = bilu::test::to_dense(f);
  const index_t bs = f.block_size();
  Dense u(all.rows, all.cols);
  for (index_t i = 0; i < all.rows; ++i)
    for (index_t j = 0; j < all.cols; ++j)
      if (j / bs >= i / bs) u(i, j) = all(i, j);
  return u;
}

Dense block_diag_of(const BcsrMatrix& f) {
  const Dense all = bilu::test::to_dense(f);
  const index_t bs = f.block_size();
  Dense d(all.rows, all.cols);
  for (index_t i = 0; i < all.rows; ++i)
    for (index_t j = 0; j < all.cols; ++j)
      if (j / bs == i / bs) d(i, j) = all(i, j);
  return d;
}

Dense plus_identity(Dense m) {
  for (index_t i = 0; i < m.rows; ++i) m(i, i) += 1.0;
  return m;
}

}  // namespace

TEST_SUITE("dense blocks") {
  TEST_CASE("invert identity and diagonal") {
    CHECK(block_invert(DenseBlock::identity(4)) == DenseBlock::identity(4));
    CHECK(block_invert(DenseBlock::from_rows({{2, 0}, {0, 4}})) ==
          DenseBlock::from_rows({{0.5, 0}, {0, 0.25}}));
  }

  TEST_CASE("invert [[1,2],[3,4]]") {
    const DenseBlock b = DenseBlock::from_rows({{1, 2}, {3, 4}});
    const DenseBlock inv = block_invert(b);
    const DenseBlock expect = DenseBlock::from_rows({{-2, 1}, {1.5, -0.5}});
    for (std::size_t t = 0; t < 4; ++t)
      CHECK(inv.data()[t] == doctest::Approx(expect.data()[t]).epsilon(1e-14));
    const Dense prod = bilu::test::multiply(dense_of(b), dense_of(inv));
    CHECK(bilu::test::frobenius_diff(prod, Dense::identity(2)) <= 1e-14);
  }

  TEST_CASE("random blocks: B * inv(B) = I") {
    std::mt19937_64 gen(7);
    for (index_t bs = 1; bs <= 8; ++bs) {
      const DenseBlock b = random_block(bs, gen, 3.0);
      const Dense prod = bilu::test::multiply(dense_of(b), dense_of(block_invert(b)));
      CHECK(bilu::test::frobenius_diff(prod, Dense::identity(bs)) <= 1e-12);
    }
  }

  TEST_CASE("pivoting handles a zero leading entry") {
    const DenseBlock b = DenseBlock::from_rows({{0, 1}, {1, 0}});
    CHECK(block_invert(b) == b);
  }

  TEST_CASE("singular blocks are rejected") {
    CHECK_THROWS_AS(block_invert(DenseBlock::from_rows({{1, 2}, {2, 4}})), FactorizationError);
    CHECK_THROWS_AS(block_invert(DenseBlock(3)), FactorizationError);
    CHECK_THROWS_AS(block_invert(DenseBlock::from_rows({{1, 0}, {0, 1e-14}})),
                    FactorizationError);
  }

  TEST_CASE("gemm_sub") {
    std::mt19937_64 gen(8);
    const DenseBlock c = random_block(3, gen), b = random_block(3, gen);
    const DenseBlock cb = block_gemm_sub(c, DenseBlock::identity(3), b);
    for (std::size_t t = 0; t < 9; ++t) CHECK(cb.data()[t] == c.data()[t] - b.data()[t]);
    CHECK(block_gemm_sub(c, DenseBlock(3), b) == c);

    const DenseBlock a = random_block(3, gen);
    const DenseBlock got = block_gemm_sub(c, a, b);
    const Dense prod = bilu::test::multiply(dense_of(a), dense_of(b));
    for (index_t r = 0; r < 3; ++r)
      for (index_t q = 0; q < 3; ++q)
        CHECK(std::abs(got(r, q) - (c(r, q) - prod(r, q))) <= 1e-14);
  }
}

TEST_SUITE("materialize") {
  TEST_CASE("same pattern is a verbatim copy") {
    std::mt19937_64 gen(9);
    const BcsrMatrix a = random_block_matrix(6, 2, gen);
    const BcsrMatrix m = materialize(a, extract_point_pattern(a));
    CHECK(std::equal(m.values().begin(), m.values().end(), a.values().begin(), a.values().end()));
    CHECK(std::equal(m.col_idx().begin(), m.col_idx().end(), a.col_idx().begin(), a.col_idx().end()));
  }

  TEST_CASE("added position holds an all-zero block") {
    BcsrMatrix a(2, 3, 3, {0, 1, 2, 3}, {0, 1, 2}, std::vector<double>(12, 1.0));
    PatternMatrix fill = extract_point_pattern(a);
    fill.insert(2, 0);
    const BcsrMatrix m = materialize(a, fill);
    CHECK(m.nnzb() == 4);
    const index_t slot = m.find(2, 0);
    REQUIRE(slot != npos);
    for (double v : m.block(slot)) CHECK(v == 0.0);
    for (double v : m.block(m.find(2, 2))) CHECK(v == 1.0);
  }

  TEST_CASE("Poisson(4,4,1), bs = 1, k = 2 stores exactly the symbolic pattern") {
    const BcsrMatrix a = bcsr_from_csr(gen_poisson_3d(4, 4, 1), 1);
    const PatternMatrix fill = symbolic_phase(extract_point_pattern(a), {2});
    const BcsrMatrix m = materialize(a, fill);
    CHECK(static_cast<std::size_t>(m.nnzb()) == fill.nnz());
    CHECK(extract_point_pattern(m) == fill);
  }

  TEST_CASE("pattern missing a stored position") {
    BcsrMatrix a(1, 2, 2, {0, 2, 3}, {0, 1, 1}, {1, 2, 3});
    CHECK_THROWS_AS(materialize(a, PatternMatrix({{0}, {1}})), StructuralError);
    CHECK_THROWS_AS(materialize(a, PatternMatrix({{0, 1}, {1}, {2}})), DimensionError);
  }
}

TEST_SUITE("point_ilu0_factorize") {
  TEST_CASE("[[4,2],[2,3]]") {
    const std::vector<Triplet> t{{0, 0, 4}, {0, 1, 2}, {1, 0, 2}, {1, 1, 3}};
    CsrMatrix a = csr_from_triplets(2, 2, t);
    point_ilu0_factorize(a);
    CHECK(std::vector<double>(a.values().begin(), a.values().end()) ==
          std::vector<double>{4, 2, 0.5, 2});
  }

  TEST_CASE("identity") {
    const std::vector<Triplet> t{{0, 0, 1}, {1, 1, 1}, {2, 2, 1}};
    CsrMatrix a = csr_from_triplets(3, 3, t);
    point_ilu0_factorize(a);
    CHECK(std::vector<double>(a.values().begin(), a.values().end()) ==
          std::vector<double>{1, 1, 1});
  }

  TEST_CASE("dense pattern equals unpivoted LU") {
    std::mt19937_64 gen(10);
    for (int trial = 0; trial < 8; ++trial) {
      const index_t n = 2 + static_cast<index_t>(gen() % 49);
      CsrMatrix a = bilu::test::random_dense_dd(n, gen);
      const Dense lu = bilu::test::dense_lu_nopivot(bilu::test::to_dense(a));
      point_ilu0_factorize(a);
      const Dense got = bilu::test::to_dense(a);
      CHECK(bilu::test::frobenius_diff(got, lu) <= 1e-12 * bilu::test::frobenius(lu));
    }
  }

  TEST_CASE("zero pivot") {
    const std::vector<Triplet> t{{0, 0, 1}, {0, 1, 1}, {1, 0, 1}, {1, 1, 1}};
    CsrMatrix a = csr_from_triplets(2, 2, t);
    CHECK_THROWS_AS(point_ilu0_factorize(a), FactorizationError);
    CsrMatrix nodiag = csr_from_triplets(2, 2, std::vector<Triplet>{{0, 0, 1}, {1, 0, 1}});
    CHECK_THROWS_AS(point_ilu0_factorize(nodiag), StructuralError);
  }
}

TEST_SUITE("block_ilu0_factorize") {
  TEST_CASE("block diagonal is untouched") {
    std::mt19937_64 gen(11);
    std::vector<double> vals;
    for (int b = 0; b < 3; ++b) {
      const DenseBlock blk = random_block(3, gen, 4.0);
      vals.insert(vals.end(), blk.data().begin(), blk.data().end());
    }
    BcsrMatrix a(3, 3, 3, {0, 1, 2, 3}, {0, 1, 2}, vals);
    block_ilu0_factorize(a);
    CHECK(std::vector<double>(a.values().begin(), a.values().end()) == vals);
  }

  TEST_CASE("bs = 1 agrees with the point-wise factorization") {
    std::mt19937_64 gen(12);
    for (int trial = 0; trial < 10; ++trial) {
      const index_t n = 5 + static_cast<index_t>(gen() % 100);
      const CsrMatrix a = bilu::test::random_dd_matrix(n, 5, gen);
      const int k = static_cast<int>(gen() % 4);
      const PatternMatrix fill = symbolic_phase(pattern_of(a), {k});
      CsrMatrix point = materialize(a, fill);
      point_ilu0_factorize(point);
      BcsrMatrix block = materialize(bcsr_from_csr(a, 1), fill);
      block_ilu0_factorize(block);
      // block keeps explicit zeros, so compare slot by slot on the same pattern
      CHECK(bilu::test::rel_max_diff(block.values(), point.values()) <= 1e-14);
    }
  }

  TEST_CASE("two block rows with full pattern") {
    std::mt19937_64 gen(13);
    const index_t bs = 3;
    const DenseBlock d1 = random_block(bs, gen, 4.0), b = random_block(bs, gen),
                     c = random_block(bs, gen), d2 = random_block(bs, gen, 4.0);
    std::vector<double> vals;
    for (const DenseBlock* blk : {&d1, &b, &c, &d2})
      vals.insert(vals.end(), blk->data().begin(), blk->data().end());
    BcsrMatrix a(bs, 2, 2, {0, 2, 4}, {0, 1, 0, 1}, vals);
    block_ilu0_factorize(a);

    // hand block elimination: L21 = C D1^-1, U22 = D2 - C D1^-1 B
    const DenseBlock l21 = block_multiply(c, block_invert(d1));
    const DenseBlock u22 = block_gemm_sub(d2, l21, b);
    for (std::size_t t = 0; t < 9; ++t) {
      CHECK(std::abs(a.block(2)[t] - l21.data()[t]) <= 1e-13);
      CHECK(std::abs(a.block(3)[t] - u22.data()[t]) <= 1e-13);
      CHECK(a.block(0)[t] == d1.data()[t]);
      CHECK(a.block(1)[t] == b.data()[t]);
    }
    // and L U reproduces A exactly on a full pattern
    const Dense l = plus_identity([&] {
      Dense m(6, 6);
      for (index_t r = 0; r < 3; ++r)
        for (index_t q = 0; q < 3; ++q) m(3 + r, q) = l21(r, q);
      return m;
    }());
    Dense u(6, 6);
    for (index_t r = 0; r < 3; ++r)
      for (index_t q = 0; q < 3; ++q) {
        u(r, q) = d1(r, q);
        u(r, 3 + q) = b(r, q);
        u(3 + r, 3 + q) = u22(r, q);
      }
    Dense orig(6, 6);
    for (index_t r = 0; r < 3; ++r)
      for (index_t q = 0; q < 3; ++q) {
        orig(r, q) = d1(r, q);
        orig(r, 3 + q) = b(r, q);
        orig(3 + r, q) = c(r, q);
        orig(3 + r, 3 + q) = d2(r, q);
      }
    CHECK(bilu::test::frobenius_diff(bilu::test::multiply(l, u), orig) <= 1e-12);
  }

  TEST_CASE("singular diagonal block names the row") {
    BcsrMatrix a(2, 2, 2, {0, 1, 2}, {0, 1}, {1, 0, 0, 1, 1, 2, 2, 4});
    try {
      block_ilu0_factorize(a);
      FAIL("expected FactorizationError");
    } catch (const FactorizationError& e) {
      CHECK(e.row() == 1);
    }
  }
}

TEST_SUITE("split_ldu") {
  TEST_CASE("block diagonal input") {
    std::mt19937_64 gen(14);
    std::vector<double> vals;
    std::vector<DenseBlock> blocks;
    for (int q = 0; q < 4; ++q) {
      blocks.push_back(random_block(2, gen, 3.0));
      vals.insert(vals.end(), blocks.back().data().begin(), blocks.back().data().end());
    }
    const BcsrMatrix f(2, 4, 4, {0, 1, 2, 3, 4}, {0, 1, 2, 3}, vals);
    const BlockIlukFactors s = split_ldu(f);
    CHECK(s.lower.nnzb() == 0);
    CHECK(s.upper_unit.nnzb() == 0);
    for (int q = 0; q < 4; ++q) CHECK(s.diag_inv[q] == block_invert(blocks[q]));
  }

  TEST_CASE("bs = 1 scales each U row by 1 / u_ii") {
    std::mt19937_64 gen(15);
    const CsrMatrix a = bilu::test::random_dd_matrix(40, 4, gen);
    BcsrMatrix f = materialize(bcsr_from_csr(a, 1), symbolic_phase(pattern_of(a), {1}));
    block_ilu0_factorize(f);
    const BlockIlukFactors s = split_ldu(f);
    for (index_t i = 0; i < 40; ++i) {
      const double uii = f.block(f.find(i, i))[0];
      CHECK(s.diag_inv[i].data()[0] == 1.0 / uii);
      for (index_t t = s.upper_unit.row_ptr()[i]; t < s.upper_unit.row_ptr()[i + 1]; ++t) {
        const index_t j = s.upper_unit.col_idx()[t];
        CHECK(s.upper_unit.block(t)[0] == (1.0 / uii) * f.block(f.find(i, j))[0]);
      }
    }
  }

  TEST_CASE("D (U' + I) reconstructs U") {
    std::mt19937_64 gen(16);
    for (index_t bs : {1, 2, 3, 4}) {
      const BcsrMatrix a = random_block_matrix(10, bs, gen);
      BcsrMatrix f = materialize(a, symbolic_phase(extract_point_pattern(a), {2}));
      block_ilu0_factorize(f);
      const BlockIlukFactors s = split_ldu(f);
      const Dense u = upper_of(f);
      const Dense recon = bilu::test::multiply(
          block_diag_of(f), plus_identity(bilu::test::to_dense(s.upper_unit)));
      CHECK(bilu::test::frobenius_diff(recon, u) <= 1e-12 * bilu::test::frobenius(u));
      for (index_t i = 0; i < s.num_block_rows; ++i) {
        const auto d = f.block(f.find(i, i));
        const DenseBlock dblk(bs, std::vector<double>(d.begin(), d.end()));
        const Dense prod = bilu::test::multiply(dense_of(s.diag_inv[i]), dense_of(dblk));
        CHECK(bilu::test::frobenius_diff(prod, Dense::identity(bs)) <= 1e-10);
      }
    }
  }
}

TEST_SUITE("build_preconditioner") {
  TEST_CASE("block identity") {
    std::vector<double> vals;
    for (int q = 0; q < 3; ++q) {
      const auto id = DenseBlock::identity(2);
      vals.insert(vals.end(), id.data().begin(), id.data().end());
    }
    const BcsrMatrix a(2, 3, 3, {0, 1, 2, 3}, {0, 1, 2}, vals);
    const BlockIlukFactors f = build_preconditioner(a, {2});
    CHECK(f.lower.nnzb() == 0);
    CHECK(f.upper_unit.nnzb() == 0);
    for (const auto& d : f.diag_inv) CHECK(d == DenseBlock::identity(2));
  }

  TEST_CASE("bs = 1 matches the coupled reference") {
    std::mt19937_64 gen(17);
    for (int trial = 0; trial < 12; ++trial) {
      const index_t n = 5 + static_cast<index_t>(gen() % 115);
      const CsrMatrix a = bilu::test::random_dd_matrix(n, 4, gen);
      const int k = static_cast<int>(trial % 4);
      const auto ref = coupled_iluk_oracle(a, {k});
      const BlockIlukFactors f = build_preconditioner(bcsr_from_csr(a, 1), {k});
      // structure: L + diag + U' = surviving pattern
      PatternMatrix got(n);
      for (index_t i = 0; i < n; ++i) {
        got.insert(i, i);
        for (index_t j : f.lower.row_cols(i)) got.insert(i, j);
        for (index_t j : f.upper_unit.row_cols(i)) got.insert(i, j);
      }
      CHECK(got == ref.pattern);
      // values: L directly, D^-1 = 1/u_ii, U' = u_ij / u_ii
      double worst = 0.0, scale = 0.0;
      for (index_t i = 0; i < n; ++i) {
        const double uii = ref.factors.at(i, i);
        for (index_t t = f.lower.row_ptr()[i]; t < f.lower.row_ptr()[i + 1]; ++t) {
          const double r = ref.factors.at(i, f.lower.col_idx()[t]);
          worst = std::max(worst, std::abs(f.lower.block(t)[0] - r));
          scale = std::max(scale, std::abs(r));
        }
        worst = std::max(worst, std::abs(f.diag_inv[i].data()[0] - 1.0 / uii) * std::abs(uii));
        for (index_t t = f.upper_unit.row_ptr()[i]; t < f.upper_unit.row_ptr()[i + 1]; ++t) {
          const double r = ref.factors.at(i, f.upper_unit.col_idx()[t]) / uii;
          worst = std::max(worst, std::abs(f.upper_unit.block(t)[0] - r));
          scale = std::max(scale, std::abs(r));
        }
      }
      CHECK(worst <= 1e-13 * std::max(scale, 1.0));
    }
  }

  TEST_CASE("Poisson(8,8,8) at bs = 2, k = 1: factor pattern is the symbolic pattern") {
    const BcsrMatrix a = bcsr_from_csr(gen_poisson_3d(8, 8, 8), 2);
    const BlockIlukFactors f = build_preconditioner(a, {1});
    PatternMatrix got(a.num_block_rows());
    for (index_t i = 0; i < a.num_block_rows(); ++i) {
      got.insert(i, i);
      for (index_t j : f.lower.row_cols(i)) {
        CHECK(j < i);
        got.insert(i, j);
      }
      for (index_t j : f.upper_unit.row_cols(i)) {
        CHECK(j > i);
        got.insert(i, j);
      }
    }
    CHECK(got == symbolic_phase(extract_point_pattern(a), {1}));
  }

  TEST_CASE("ILU residual vanishes on the pattern (property)") {
    std::mt19937_64 gen(18);
    for (int trial = 0; trial < 8; ++trial) {
      const index_t bs = 1 + static_cast<index_t>(trial % 3);
      const BcsrMatrix a = random_block_matrix(12, bs, gen);
      const int k = trial % 4;
      const BlockIlukFactors f = build_preconditioner(a, {k});
      const Dense l = plus_identity(bilu::test::to_dense(f.lower));
      Dense d(a.num_rows(), a.num_rows());
      for (index_t i = 0; i < f.num_block_rows; ++i) {
        const DenseBlock blk = block_invert(f.diag_inv[i]);
        for (index_t r = 0; r < bs; ++r)
          for (index_t c = 0; c < bs; ++c) d(i * bs + r, i * bs + c) = blk(r, c);
      }
      const Dense up = plus_identity(bilu::test::to_dense(f.upper_unit));
      const Dense prod = bilu::test::multiply(bilu::test::multiply(l, d), up);
      const Dense orig = bilu::test::to_dense(a);
      const PatternMatrix fill = symbolic_phase(extract_point_pattern(a), {k});
      double worst = 0.0;
      for (index_t i = 0; i < orig.rows; ++i)
        for (index_t j = 0; j < orig.cols; ++j)
          if (fill.contains(i / bs, j / bs))
            worst = std::max(worst, std::abs(prod(i, j) - orig(i, j)));
      CHECK(worst <= 1e-12 * bilu::test::frobenius(orig));
    }
  }

  TEST_CASE("errors carry the stage name") {
    BcsrMatrix nodiag(1, 2, 2, {0, 1, 2}, {1, 0}, {1.0, 1.0});
    try {
      build_preconditioner(nodiag, {0});
      FAIL("expected StructuralError");
    } catch (const StructuralError& e) {
      CHECK(std::string(e.what()).rfind("symbolic:", 0) == 0);
    }
    BcsrMatrix singular(1, 2, 2, {0, 2, 4}, {0, 1, 0, 1}, {1, 1, 1, 1});
    try {
      build_preconditioner(singular, {0});
      FAIL("expected FactorizationError");
    } catch (const FactorizationError& e) {
      CHECK(std::string(e.what()).rfind("factorize:", 0) == 0);
      CHECK(e.row() == 1);
    }
  }
}
