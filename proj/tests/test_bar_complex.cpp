#include "khh/bar_complex.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace khh;

namespace {

AlgebraPtr cusp() { return GradedAlgebra::build("algebra cusp\nvars x:2 y:3\nrel y^2 - x^3\n"); }

// Direct evaluation of b on polynomial entries, without the product tables.
BarChain oracle_b(const AlgebraPtr& a, const BarChain& c) {
  BarChain out(a, c.degree() - 1, c.weight());
  auto T = a->tables(c.weight());
  const int n = c.degree();
  for (const auto& [t, k] : c.terms()) {
    std::vector<Polynomial> e;
    for (uint32_t id : t) e.push_back(Polynomial::monomial(a->ring(), T->monomials[id]));
    for (int i = 0; i <= n; ++i) {
      std::vector<Polynomial> f;
      if (i < n) {
        for (int j = 0; j < i; ++j) f.push_back(e[j]);
        f.push_back(a->multiply(e[i], e[i + 1]));
        for (int j = i + 2; j <= n; ++j) f.push_back(e[j]);
      } else {
        f.push_back(a->multiply(e[n], e[0]));
        for (int j = 1; j < n; ++j) f.push_back(e[j]);
      }
      Rational s = (i % 2 == 0) ? k : -k;
      // expand multilinearly
      std::vector<std::pair<Tensor, Rational>> acc{{{}, s}};
      for (const auto& p : f) {
        std::vector<std::pair<Tensor, Rational>> next;
        for (const auto& [tt, cc] : acc)
          for (const auto& [m, v] : p.terms()) {
            Tensor u = tt;
            u.push_back(T->id_of(m));
            next.emplace_back(std::move(u), cc * v);
          }
        acc = std::move(next);
      }
      for (const auto& [tt, cc] : acc) out.add(tt, cc);
    }
  }
  return out;
}

BarChain random_chain(const AlgebraPtr& a, const BarComplex& bc, int n, int w, std::mt19937_64& rng) {
  auto sl = bc.slices(n, w);
  BarChain c(a, n, w);
  if (sl->empty()) return c;
  std::uniform_int_distribution<int> coef(-3, 3);
  auto it = sl->begin();
  std::advance(it, std::uniform_int_distribution<std::size_t>(0, sl->size() - 1)(rng));
  const auto& s = *it->second;
  std::uniform_int_distribution<std::size_t> pick(0, s.size() - 1);
  for (int k = 0; k < 4; ++k) c.add(s.tensor(pick(rng)), Rational(coef(rng)));
  return c;
}

}  // namespace

TEST(BarDifferential, SpecExamples) {
  auto a = cusp();
  BarComplex bc(a);
  // b(a0[a1]) = 0 for commutative inputs
  EXPECT_TRUE(bc.b(parse_chain(a, "x[y]")).is_zero());
  EXPECT_TRUE(bc.b(parse_chain(a, "2x[y] + 3y[x]")).is_zero());
  EXPECT_EQ(bc.b(parse_chain(a, "[y|y]")), parse_chain(a, "2y[y] - [x^3]"));
  EXPECT_EQ(bc.b(parse_chain(a, "[y|y]")).str(), "-[x^3] + 2*y[y]");
}

TEST(ConnesB, SpecExamples) {
  auto a = cusp();
  BarComplex bc(a);
  auto free1 = GradedAlgebra::build("vars x:1\n");
  BarComplex bf(free1);
  EXPECT_TRUE(bf.B(parse_chain(free1, "[x]")).is_zero());
  EXPECT_EQ(bf.B(parse_chain(free1, "x")), parse_chain(free1, "[x]"));
  EXPECT_EQ(bc.B(parse_chain(a, "y")), parse_chain(a, "[y]"));
}

TEST(Shuffle, SpecExamples) {
  auto a = GradedAlgebra::build("vars x:1 y:1\n");
  BarComplex bc(a);
  EXPECT_EQ(bc.shuffle(parse_chain(a, "[x]"), parse_chain(a, "[y]")), parse_chain(a, "[x|y] - [y|x]"));
  EXPECT_EQ(bc.shuffle(parse_chain(a, "x"), parse_chain(a, "y[x|y]")), parse_chain(a, "x*y[x|y]"));
}

TEST(BarDifferential, AgreesWithPolynomialOracle) {
  std::mt19937_64 rng(5);
  for (auto text : {"vars x:2 y:3\nrel y^2 - x^3\n", "vars x:1 y:1 z:1\nrel x*y - z^2\n", "vars e:1\nrel e^2\n"}) {
    auto a = GradedAlgebra::build(text);
    BarComplex bc(a);
    for (int n = 1; n <= 3; ++n)
      for (int w = n; w <= 8; ++w)
        for (int trial = 0; trial < 5; ++trial) {
          auto c = random_chain(a, bc, n, w, rng);
          EXPECT_EQ(bc.b(c), oracle_b(a, c)) << text << " " << c.str();
        }
  }
}

TEST(SliceMatrices, StructuralIdentities) {
  for (auto text : {"vars x:2 y:3\nrel y^2 - x^3\n", "vars x:1 y:1\n", "vars e:1\nrel e^2\n",
                    "vars x:2 y:2 z:2\nrel z^2 - x*y\n"}) {
    auto a = GradedAlgebra::build(text);
    for (auto conv : {Convention::Standard, Convention::Transpose}) {
      BarComplex bc(a, conv);
      for (int w = 0; w <= 8; ++w)
        for (int n = 0; n <= 4; ++n)
          for (const auto& [c, s] : *bc.slices(n, w)) {
            auto bn = bc.b_matrix(n, w, c);
            auto bn1 = bc.b_matrix(n + 1, w, c);
            auto Bn = bc.B_matrix(n, w, c);
            auto Bn1 = bc.B_matrix(n + 1, w, c);
            auto Bm1 = bc.B_matrix(n - 1, w, c);
            EXPECT_TRUE((bn * bn1).is_zero());
            EXPECT_TRUE((Bn1 * Bn).is_zero());
            // bB + Bb on C_n
            EXPECT_TRUE((bn1 * Bn + Bm1 * bn).is_zero()) << text << " n=" << n << " w=" << w;
          }
    }
  }
}

TEST(SliceMatrices, BarPrimeKeepsSquareZeroButBreaksMixedRelation) {
  auto a = cusp();
  BarComplex bc(a, Convention::BarPrime);
  bool mixed_broken = false;
  for (int w = 0; w <= 8; ++w)
    for (int n = 1; n <= 3; ++n)
      for (const auto& [c, s] : *bc.slices(n, w)) {
        EXPECT_TRUE((bc.b_matrix(n, w, c) * bc.b_matrix(n + 1, w, c)).is_zero());
        auto m = bc.b_matrix(n + 1, w, c) * bc.B_matrix(n, w, c) + bc.B_matrix(n - 1, w, c) * bc.b_matrix(n, w, c);
        mixed_broken = mixed_broken || !m.is_zero();
      }
  EXPECT_TRUE(mixed_broken);
}

TEST(ShuffleProperties, DerivationCommutativityAssociativity) {
  std::mt19937_64 rng(99);
  for (auto text : {"vars x:2 y:3\nrel y^2 - x^3\n", "vars x:1 y:1\n"}) {
    auto a = GradedAlgebra::build(text);
    for (auto conv : {Convention::Standard, Convention::Transpose}) {
      BarComplex bc(a, conv);
      for (int trial = 0; trial < 40; ++trial) {
        int p = trial % 3, q = (trial / 3) % 3;
        auto c = random_chain(a, bc, p, p + 2 + trial % 4, rng);
        auto d = random_chain(a, bc, q, q + 1 + trial % 3, rng);
        auto e = random_chain(a, bc, 1, 3, rng);
        auto cd = bc.shuffle(c, d);
        // b(cd) = b(c)d + (-1)^p c b(d)
        BarChain rhs(a, std::max(p + q - 1, 0), cd.weight());
        if (p > 0) rhs = rhs + bc.shuffle(bc.b(c), d);
        if (q > 0) rhs = rhs + bc.shuffle(c, bc.b(d)).scaled(Rational(p % 2 ? -1 : 1));
        EXPECT_EQ(bc.b(cd), rhs);
        EXPECT_EQ(cd, bc.shuffle(d, c).scaled(Rational((p * q) % 2 ? -1 : 1)));
        EXPECT_EQ(bc.shuffle(cd, e), bc.shuffle(c, bc.shuffle(d, e)));
      }
    }
  }
}

TEST(Slices, SizesAndSorting) {
  auto a = GradedAlgebra::build("vars x:1 y:1 z:1\n");
  BarComplex bc(a);
  std::size_t total = 0;
  for (const auto& [c, s] : *bc.slices(2, 4)) {
    total += s->size();
    for (std::size_t k = 0; k + 1 < s->size(); ++k) EXPECT_TRUE(s->tensor(k) < s->tensor(k + 1));
    for (std::size_t k = 0; k < s->size(); ++k) EXPECT_EQ(s->find(s->at(k)), static_cast<int64_t>(k));
  }
  // weights (w0, w1, w2), w1, w2 >= 1, sum 4: count monomials in 3 variables
  auto h = [](int w) { return static_cast<std::size_t>((w + 1) * (w + 2) / 2); };
  std::size_t expect = 0;
  for (int w1 = 1; w1 <= 3; ++w1)
    for (int w2 = 1; w1 + w2 <= 4; ++w2) expect += h(4 - w1 - w2) * h(w1) * h(w2);
  EXPECT_EQ(total, expect);
  auto q = GradedAlgebra::build("algebra Q\nvars\n");
  BarComplex bq(q);
  EXPECT_EQ(bq.slices(0, 0)->size(), 1u);
  EXPECT_TRUE(bq.slices(1, 1)->empty());
}
