#include "khh/graded_algebra.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace khh;

namespace {

AlgebraPtr cusp() { return GradedAlgebra::build("algebra cusp\nvars x:2 y:3\nrel y^2 - x^3\n"); }
AlgebraPtr line() { return GradedAlgebra::build("algebra line\nvars t:1\n"); }

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::SanityFail;
}

// Brute-force dimension of (Q[vars]/I)_w: dim of all monomials of weight w minus
// the rank of the span of {m * r} for relations r and monomials m of weight w - wt(r).
std::size_t brute_dim(const GradedAlgebra& a, int w) {
  const auto& ring = *a.ring();
  std::vector<Monomial> monos;
  std::function<void(std::size_t, int, Monomial&)> rec = [&](std::size_t v, int rem, Monomial& cur) {
    if (v == ring.nvars()) {
      if (rem == 0) monos.push_back(cur);
      return;
    }
    for (int e = 0; e * ring.weights[v] <= rem; ++e) {
      cur[v] = e;
      rec(v + 1, rem - e * ring.weights[v], cur);
    }
    cur[v] = 0;
  };
  Monomial cur(ring.nvars(), 0);
  rec(0, w, cur);
  std::map<Monomial, uint32_t> idx;
  for (auto& m : monos) idx.emplace(m, static_cast<uint32_t>(idx.size()));
  std::vector<SparseVec> cols;
  for (const auto& r : a.relations()) {
    int rw = r.homogeneous_weight();
    if (rw > w) continue;
    std::vector<Monomial> shifts;
    Monomial c2(ring.nvars(), 0);
    monos.clear();
    rec(0, w - rw, c2);
    shifts = monos;
    for (const auto& s : shifts) {
      std::vector<std::pair<uint32_t, Rational>> t;
      for (const auto& [m, c] : r.terms()) t.emplace_back(idx.at(mono_mul(m, s)), c);
      cols.push_back(make_sparse(std::move(t)));
    }
  }
  return idx.size() - rank_of_vectors(cols, idx.size());
}

}  // namespace

TEST(Build, FreeAlgebra) {
  auto a = GradedAlgebra::build("vars x:1; rels:");
  EXPECT_TRUE(a->is_free());
  EXPECT_EQ(a->dim(5), 1u);
  EXPECT_EQ(a->weight_basis(5).monomials, std::vector<Monomial>{{5}});
}

TEST(Build, CuspAndDualNumbers) {
  auto c = cusp();
  EXPECT_EQ(c->weight_basis(1).monomials.size(), 0u);
  EXPECT_EQ(c->weight_basis(6).monomials, std::vector<Monomial>({{3, 0}}));
  auto d = GradedAlgebra::build("algebra dual\nvars e:1\nrel e^2\n");
  EXPECT_EQ(d->dim(1), 1u);
  EXPECT_EQ(d->dim(2), 0u);
  EXPECT_TRUE(d->multiply(d->generator(0), d->generator(0)).is_zero());
}

TEST(Build, Errors) {
  EXPECT_EQ(code_of([] { GradedAlgebra::build("vars x:1 y:2\nrel x^2 - y^2\n"); }),
            ErrorCode::InhomogeneousRelation);
  EXPECT_EQ(code_of([] { GradedAlgebra::build("vars x:0\n"); }), ErrorCode::ZeroWeightGenerator);
  EXPECT_EQ(code_of([] { GradedAlgebra::build("vars x:1\nrel x^^2\n"); }), ErrorCode::ParseError);
  EXPECT_EQ(code_of([] { GradedAlgebra::build("vars x:1\nrel z\n"); }), ErrorCode::ParseError);
  try {
    GradedAlgebra::build("algebra a\nvars x:1\nrel x + )\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3);
    EXPECT_EQ(e.column(), 9);
  }
}

TEST(Multiply, CuspAndIdentity) {
  auto c = cusp();
  auto y = c->generator(1);
  EXPECT_TRUE(c->multiply(y, y) == c->parse("x^3")) << c->multiply(y, y).str();
  auto p = c->parse("x^2*y + 3/2 x^4");
  EXPECT_EQ(c->multiply(c->one(), p), c->normal_form(p));
}

TEST(Hom, ValidationErrors) {
  auto c = cusp();
  auto t = line();
  EXPECT_NO_THROW(GradedHom::parse(c, t, {{"x", "t^2"}, {"y", "t^3"}}));
  EXPECT_NO_THROW(GradedHom::identity(c));
  EXPECT_EQ(code_of([&] { GradedHom::parse(c, t, {{"x", "t"}, {"y", "t^3"}}); }), ErrorCode::WeightMismatch);
  auto q = GradedAlgebra::build("vars u:2 v:3\n");
  EXPECT_EQ(code_of([&] { GradedHom::parse(c, q, {{"x", "u"}, {"y", "v"}}); }), ErrorCode::RelationNotKilled);
}

TEST(HilbertFunction, CuspAndPlane) {
  auto c = cusp();
  EXPECT_EQ(c->dim(0), 1u);
  EXPECT_EQ(c->dim(1), 0u);
  for (int w = 2; w <= 30; ++w) EXPECT_EQ(c->dim(w), 1u) << w;
  auto p = GradedAlgebra::build("vars x:1 y:1\n");
  for (int w = 0; w <= 20; ++w) EXPECT_EQ(p->dim(w), static_cast<std::size_t>(w + 1));
}

TEST(HilbertFunction, MatchesBruteForceOnSeveralIdeals) {
  const char* specs[] = {
      "vars x:2 y:3\nrel y^2 - x^3\n",
      "vars x:1 y:1 z:1\nrel x*y - z^2\nrel x^2 - y*z\n",
      "vars a:1 b:2 c:3\nrel a*c - b^2\nrel a^4*b - c^2 + a^2*b^2\n",
      "vars x:1 y:1\nrel x^2\nrel x*y\n",
      "vars u:2 v:2 w:2\nrel w^2 - u*v\n",
      "vars t:2 s:5\nrel s^2 - t^5\n",
  };
  for (const char* s : specs) {
    auto a = GradedAlgebra::build(s);
    for (int w = 0; w <= 14; ++w) EXPECT_EQ(a->dim(w), brute_dim(*a, w)) << s << " w=" << w;
  }
}

TEST(NormalForm, RingHomomorphismModuloIdeal) {
  auto a = GradedAlgebra::build("vars x:1 y:1 z:1\nrel x*y - z^2\nrel x^2 - y*z\n");
  std::mt19937_64 rng(42);
  std::uniform_int_distribution<int> e(0, 3), c(-3, 3);
  auto rand_poly = [&] {
    Polynomial p = a->zero();
    for (int k = 0; k < 4; ++k) p.add_term(Monomial{e(rng), e(rng), e(rng)}, Rational(c(rng)));
    return p;
  };
  for (int trial = 0; trial < 60; ++trial) {
    auto p = rand_poly(), q = rand_poly();
    auto np = a->normal_form(p), nq = a->normal_form(q);
    EXPECT_EQ(a->normal_form(np), np);
    EXPECT_EQ(a->normal_form(p + q), np + nq);
    EXPECT_EQ(a->normal_form(p * q), a->normal_form(np * nq));
  }
}

TEST(Tables, ProductsAgreeWithNormalForm) {
  auto a = GradedAlgebra::build("vars x:1 y:1 z:1\nrel x*y - z^2\n");
  auto t = a->tables(6);
  for (uint32_t i = 0; i < t->monomials.size(); ++i)
    for (uint32_t j = 0; j < t->monomials.size(); ++j) {
      if (t->weight[i] + t->weight[j] > 6) continue;
      auto [b, e] = t->product(i, j);
      Polynomial got = a->zero();
      for (auto it = b; it != e; ++it) got.add_term(t->monomials[it->id], it->coeff);
      EXPECT_EQ(got, a->multiply(Polynomial::monomial(a->ring(), t->monomials[i]),
                                 Polynomial::monomial(a->ring(), t->monomials[j])));
    }
}

TEST(FineGrading, DetectsExtraGradings) {
  EXPECT_EQ(GradedAlgebra::build("vars x:1 y:1 z:1\n")->fine_rank(), 3u);
  EXPECT_EQ(cusp()->fine_rank(), 1u);
  auto cone = GradedAlgebra::build("vars x:2 y:2 z:2\nrel z^2 - x*y\n");
  EXPECT_EQ(cone->fine_rank(), 2u);
  for (std::size_t k = 0; k < cone->fine_rank(); ++k) {
    std::vector<int> f;
    for (const auto& g : cone->fine_grading()) f.push_back(static_cast<int>(g[k]));
    EXPECT_TRUE(cone->is_grading(f));
  }
}

TEST(Krull, Dimensions) {
  EXPECT_EQ(cusp()->krull_dimension(), 1);
  EXPECT_EQ(GradedAlgebra::build("vars x:1 y:1 z:1\n")->krull_dimension(), 3);
  EXPECT_EQ(GradedAlgebra::build("vars x:2 y:2 z:2\nrel z^2 - x*y\n")->krull_dimension(), 2);
  EXPECT_EQ(GradedAlgebra::build("vars e:1\nrel e^2\n")->krull_dimension(), 0);
  EXPECT_EQ(GradedAlgebra::build("vars x:1\n")->krull_dimension(), 1);
}

TEST(CanonicalText, StableUnderReformatting) {
  auto a = GradedAlgebra::build("algebra c\nvars x:2 y:3\nrel y^2-x^3  # comment\n");
  auto b = GradedAlgebra::build("algebra c; vars x:2 y:3; rel -x*x*x + y*y\n");
  EXPECT_EQ(a->canonical_text(), GradedAlgebra::build(a->canonical_text())->canonical_text());
  EXPECT_EQ(a->groebner_basis(10).size(), b->groebner_basis(10).size());
}
