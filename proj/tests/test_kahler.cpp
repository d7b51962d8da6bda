#include "khh/kahler.hpp"

#include <gtest/gtest.h>

using namespace khh;

namespace {

AlgebraPtr cusp() { return GradedAlgebra::build("vars x:2 y:3\nrel y^2 - x^3\n"); }
AlgebraPtr line() { return GradedAlgebra::build("vars t:1\n"); }

long long binom(int n, int k) {
  if (k < 0 || k > n) return 0;
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Forms on a free algebra with all weights 1: C(n, p) * dim of degree (w - p) monomials.
long long free_forms(int nv, int p, int w) {
  if (w < p) return 0;
  return binom(nv, p) * binom(w - p + nv - 1, nv - 1);
}

}  // namespace

TEST(Omega, CuspLowWeights) {
  auto a = cusp();
  EXPECT_EQ(omega_dims(a, 1, 5), 2u);
  EXPECT_EQ(omega_dims(a, 1, 6), 1u);
}

TEST(Omega, DegreeZeroIsTheAlgebra) {
  for (auto a : {cusp(), line(), GradedAlgebra::build("vars x:1 y:2\n")})
    for (int w = 0; w <= 10; ++w) EXPECT_EQ(omega_dims(a, 0, w), a->dim(w)) << w;
}

TEST(Omega, FreeAlgebraCountsMatchBinomials) {
  for (int nv = 1; nv <= 3; ++nv) {
    std::string text = "vars";
    for (int i = 0; i < nv; ++i) text += " x" + std::to_string(i) + ":1";
    auto a = GradedAlgebra::build(text);
    for (int p = 0; p <= nv + 1; ++p)
      for (int w = 0; w <= 7; ++w)
        EXPECT_EQ(static_cast<long long>(omega_dims(a, p, w)), free_forms(nv, p, w)) << nv << " " << p << " " << w;
  }
}

TEST(Omega, VanishesAboveGeneratorCount) {
  auto a = cusp();
  for (int w = 0; w <= 12; ++w) EXPECT_EQ(omega_dims(a, 3, w), 0u);
}

TEST(DeRham, SquareIsZeroModuloRelations) {
  for (auto a : {cusp(), GradedAlgebra::build("vars x:1 y:1 z:1\nrel z^2 - x*y\n"),
                 GradedAlgebra::build("vars x:1 y:2 z:1\n")}) {
    KahlerModule K(a);
    for (int w = 0; w <= 8; ++w)
      for (int p = 0; p <= 1; ++p) EXPECT_TRUE(K.d_squared_zero(p, w)) << a->canonical_text() << p << w;
  }
}

TEST(DeRham, PreservesRelationSpan) {
  auto a = cusp();
  KahlerModule K(a);
  for (int w = 0; w <= 10; ++w) {
    SparseMatrix img = K.d_matrix(1, w) * K.relations(1, w);
    SparseMatrix R = K.relations(2, w);
    std::vector<SparseVec> cols = R.columns();
    for (const auto& c : img.columns()) cols.push_back(c);
    EXPECT_EQ(rank_of_vectors(std::move(cols), R.rows()), R.rank()) << w;
  }
}

TEST(Hkr, LineIsomorphism) {
  HochschildEngine e(line());
  for (int w = 1; w <= 8; ++w) {
    auto r = hkr_compare(e, 1, w);
    EXPECT_TRUE(r.lands_in_cycles);
    EXPECT_TRUE(r.bijective()) << w;
    EXPECT_EQ(r.hh, 1u);
  }
}

TEST(Hkr, PlaneTopForm) {
  auto a = GradedAlgebra::build("vars x:1 y:1\n");
  HochschildEngine e(a);
  KahlerModule K(a);
  BarComplex bc(a);
  auto cls = e.classes(2, 2);
  std::size_t found = 0;
  for (const auto& c : cls) {
    auto H = hkr_matrix(K, bc, 2, 2, c);
    if (H.cols() == 0) continue;
    ++found;
    auto chain = bc.to_chain(H.column(0), *bc.slice(2, 2, c), 2);
    auto expect = parse_chain(a, "1/2*[x|y] - 1/2*[y|x]");
    EXPECT_TRUE(chain == expect) << chain.str();
  }
  EXPECT_EQ(found, 1u);
  EXPECT_TRUE(hkr_compare(e, 2, 2).bijective());
}

TEST(Hkr, SmoothCorpusBijective) {
  for (std::string text : {"vars x:1\n", "vars x:1 y:1\n", "vars x:1 y:2\n", "vars x:1 y:1 z:1\n"}) {
    auto a = GradedAlgebra::build(text);
    HochschildEngine e(a);
    for (int n = 0; n <= 3; ++n)
      for (int w = 0; w <= 5; ++w) {
        auto r = hkr_compare(e, n, w);
        EXPECT_TRUE(r.lands_in_cycles);
        EXPECT_TRUE(r.bijective()) << text << n << " " << w;
      }
  }
}

TEST(Hkr, CuspImageBoundedBySlice) {
  HochschildEngine e(cusp());
  auto r = hkr_compare(e, 1, 1);
  EXPECT_EQ(r.omega, 0u);
  EXPECT_EQ(r.image, 0u);
  for (int w = 2; w <= 9; ++w) {
    auto s = hkr_compare(e, 1, w);
    EXPECT_TRUE(s.lands_in_cycles);
    EXPECT_LE(s.image, s.hh) << w;
    EXPECT_LE(s.image, s.omega) << w;
  }
}

TEST(Torsion, CuspNormalization) {
  auto a = cusp();
  auto t = line();
  auto nu = GradedHom::parse(a, t, {{"x", "t^2"}, {"y", "t^3"}});
  EXPECT_EQ(torsion_dims(nu, 1, 5), 1u);
  EXPECT_EQ(torsion_dims(nu, 1, 7), 1u);
  std::size_t total = 0;
  for (int w = 0; w <= 16; ++w) total += torsion_dims(nu, 1, w);
  EXPECT_EQ(total, 2u);
}

TEST(Torsion, IdentityHasNone) {
  auto nu = GradedHom::identity(line());
  for (int w = 0; w <= 8; ++w) EXPECT_EQ(torsion_dims(nu, 1, w), 0u);
}

TEST(Smoothness, Verdicts) {
  EXPECT_EQ(jacobian_smooth(GradedAlgebra::build("vars x:1 y:1\n")).verdict, Smoothness::Smooth);
  EXPECT_EQ(jacobian_smooth(GradedAlgebra::build("vars x:1\n")).verdict, Smoothness::Smooth);
  auto c = jacobian_smooth(cusp());
  EXPECT_EQ(c.verdict, Smoothness::Singular);
  EXPECT_EQ(c.krull_dim, 1);
  EXPECT_EQ(c.embedding_dim, 2);
  auto d = jacobian_smooth(GradedAlgebra::build("vars e:1\nrel e^2\n"));
  EXPECT_EQ(d.verdict, Smoothness::Singular);
  EXPECT_FALSE(d.reduced);
  // a graph is still a polynomial ring
  EXPECT_EQ(jacobian_smooth(GradedAlgebra::build("vars x:1 y:2\nrel y - x^2\n")).verdict, Smoothness::Smooth);
}
