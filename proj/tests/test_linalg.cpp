#include "khh/linalg.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace khh;

namespace {

SparseMatrix dense(std::vector<std::vector<long long>> a) {
  std::vector<std::vector<Rational>> q;
  for (auto& row : a) {
    std::vector<Rational> r;
    for (auto v : row) r.emplace_back(v);
    q.push_back(std::move(r));
  }
  if (q.empty()) return SparseMatrix(0, 0);
  return SparseMatrix::from_dense(q);
}

SparseMatrix random_matrix(std::mt19937_64& rng, std::size_t r, std::size_t c, int density_pct) {
  std::uniform_int_distribution<int> pct(0, 99), val(-3, 3), den(1, 3);
  std::vector<std::vector<Rational>> a(r, std::vector<Rational>(c));
  for (auto& row : a)
    for (auto& x : row)
      if (pct(rng) < density_pct) x = Rational(val(rng), den(rng));
  return SparseMatrix::from_dense(a);
}

// Dense Gaussian elimination used as the oracle for the sparse rank.
std::size_t dense_rank(const SparseMatrix& m) {
  std::vector<std::vector<Rational>> a(m.rows(), std::vector<Rational>(m.cols()));
  for (std::size_t j = 0; j < m.cols(); ++j)
    for (const auto& e : m.column(j)) a[e.index][j] = e.value;
  std::size_t r = 0;
  for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
    std::size_t p = r;
    while (p < m.rows() && a[p][c].is_zero()) ++p;
    if (p == m.rows()) continue;
    std::swap(a[p], a[r]);
    for (std::size_t i = r + 1; i < m.rows(); ++i) {
      if (a[i][c].is_zero()) continue;
      Rational f = a[i][c] / a[r][c];
      for (std::size_t k = c; k < m.cols(); ++k) a[i][k] -= f * a[r][k];
    }
    ++r;
  }
  return r;
}

}  // namespace

TEST(Rational, CanonicalForm) {
  Rational a(6, -4);
  EXPECT_EQ(a.str(), "-3/2");
  EXPECT_EQ(Rational(0, 5).str(), "0");
  EXPECT_EQ(Rational::parse("10/4"), Rational(5, 2));
  EXPECT_TRUE((Rational(1, 3) + Rational(2, 3)).is_one());
}

TEST(Rational, OverflowPromotesAndDemotes) {
  Rational big(1LL << 62);
  Rational sq = big * big * big;
  EXPECT_FALSE(sq.is_small());
  Rational back = sq / (big * big);
  EXPECT_TRUE(back.is_small());
  EXPECT_EQ(back, big);
  EXPECT_EQ((sq - sq), Rational(0));
  EXPECT_TRUE((sq - sq).is_small());
}

TEST(Rank, SmallCases) {
  EXPECT_EQ(SparseMatrix(0, 0).rank(), 0u);
  EXPECT_EQ(SparseMatrix::identity(3).rank(), 3u);
  EXPECT_EQ(dense({{1, 2}, {2, 4}}).rank(), 1u);
}

TEST(Kernel, SmallCases) {
  EXPECT_TRUE(kernel_basis(SparseMatrix::identity(2)).empty());
  EXPECT_EQ(kernel_basis(SparseMatrix::zero(2, 3)).size(), 3u);
  auto row = dense({{1, 1, 0}});
  auto k = kernel_basis(row);
  ASSERT_EQ(k.size(), 2u);
  for (const auto& v : k) EXPECT_TRUE(row.apply(v).empty());
}

TEST(HomologyDim, SmallCases) {
  EXPECT_EQ(homology_dim(SparseMatrix::zero(2, 0), SparseMatrix::zero(0, 2)), 2u);
  EXPECT_EQ(homology_dim(SparseMatrix::identity(2), SparseMatrix::zero(0, 2)), 0u);
  EXPECT_EQ(homology_dim(dense({{2}, {0}}), dense({{0, 1}})), 0u);
}

TEST(HomologyDim, RejectsNonComplex) {
  try {
    homology_dim(dense({{1}, {0}}), dense({{1, 0}}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::CompositionNonzero);
  }
}

TEST(Eigenspace, SmallCases) {
  EXPECT_EQ(eigenspace(SparseMatrix::identity(3, Rational(2)), Rational(2)).size(), 3u);
  EXPECT_EQ(eigenspace(dense({{2, 0}, {0, 4}}), Rational(4)).size(), 1u);
  EXPECT_EQ(eigenspace(dense({{0, 1}, {0, 0}}), Rational(0)).size(), 1u);
  try {
    eigenspace(dense({{1, 2, 3}}), Rational(1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotSquare);
  }
}

TEST(LinalgProperties, RankNullityAndTranspose) {
  std::mt19937_64 rng(12345);
  std::uniform_int_distribution<int> dim(0, 9), dens(5, 70);
  for (int trial = 0; trial < 300; ++trial) {
    auto m = random_matrix(rng, dim(rng), dim(rng), dens(rng));
    std::size_t r = m.rank();
    EXPECT_EQ(r, dense_rank(m));
    EXPECT_EQ(r + kernel_basis(m).size(), m.cols());
    EXPECT_EQ(m.transpose().rank(), r);
    for (const auto& v : kernel_basis(m)) EXPECT_TRUE(m.apply(v).empty());
  }
}

TEST(LinalgProperties, ProductAssociativity) {
  std::mt19937_64 rng(777);
  for (int trial = 0; trial < 100; ++trial) {
    auto a = random_matrix(rng, 4, 5, 50);
    auto b = random_matrix(rng, 5, 3, 50);
    auto c = random_matrix(rng, 3, 6, 50);
    EXPECT_EQ((a * b) * c, a * (b * c));
  }
}

TEST(LinalgProperties, LargeRankWithBigIntegers) {
  // Hilbert-like matrix with rapidly growing entries forces the bignum path.
  const std::size_t n = 12;
  std::vector<std::vector<Rational>> a(n, std::vector<Rational>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a[i][j] = Rational(1, static_cast<long long>(i + j + 1));
  EXPECT_EQ(SparseMatrix::from_dense(a).rank(), n);
}
