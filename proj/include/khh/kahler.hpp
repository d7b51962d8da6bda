#pragma once

// Kaehler differentials of a presented graded algebra.  Omega^p in weight w
// is the quotient of the free module on a*dx_I (a a normal monomial, I a
// p-subset of generators) by the span of m * df ∧ dx_J for relations f.

#include "khh/hochschild.hpp"

#include <bit>

namespace khh {

using FormMask = uint32_t;

inline Polynomial partial(const Polynomial& p, std::size_t i) {
  Polynomial r(p.ring());
  for (const auto& [m, c] : p.terms()) {
    if (m[i] == 0) continue;
    Monomial d = m;
    --d[i];
    r.add_term(d, c * Rational(m[i]));
  }
  return r;
}

/// Sign of dx_J ∧ dx_i against the sorted wedge of J ∪ {i}; 0 if i ∈ J.
inline int wedge_sign_right(FormMask J, std::size_t i) {
  if (J & (1u << i)) return 0;
  return std::popcount(J >> (i + 1)) % 2 ? -1 : 1;
}

/// Sign of dx_i ∧ dx_J against the sorted wedge; 0 if i ∈ J.
inline int wedge_sign_left(std::size_t i, FormMask J) {
  if (J & (1u << i)) return 0;
  return std::popcount(J & ((1u << i) - 1)) % 2 ? -1 : 1;
}

struct FormBasis {
  int p = 0, w = 0;
  std::vector<std::pair<FormMask, uint32_t>> elems;  // (I, monomial id)
  std::map<std::pair<FormMask, uint32_t>, uint32_t> index;
};

class KahlerModule {
 public:
  explicit KahlerModule(AlgebraPtr a) : a_(std::move(a)) {
    if (a_->nvars() > 31) throw Error(ErrorCode::Precondition, "too many generators for forms");
  }

  const AlgebraPtr& algebra() const { return a_; }

  int mask_weight(FormMask I) const {
    int s = 0;
    for (std::size_t i = 0; i < a_->nvars(); ++i)
      if (I & (1u << i)) s += a_->ring()->weights[i];
    return s;
  }

  std::vector<FormMask> masks(int p) const {
    std::vector<FormMask> out;
    if (p < 0) return out;
    for (FormMask I = 0; I < (1u << a_->nvars()); ++I)
      if (std::popcount(I) == p) out.push_back(I);
    return out;
  }

  FormBasis basis(int p, int w) const {
    FormBasis b;
    b.p = p;
    b.w = w;
    if (w < 0) return b;
    auto T = a_->tables(w);
    for (FormMask I : masks(p)) {
      int k = w - mask_weight(I);
      if (k < 0) continue;
      for (std::size_t j = 0; j < T->count(k); ++j) {
        uint32_t id = T->first(k) + static_cast<uint32_t>(j);
        b.index.emplace(std::make_pair(I, id), static_cast<uint32_t>(b.elems.size()));
        b.elems.emplace_back(I, id);
      }
    }
    return b;
  }

  /// Coordinates of sum_I coeff_I dx_I; coefficients are reduced first.
  SparseVec coordinates(const FormBasis& b, const std::map<FormMask, Polynomial>& form) const {
    auto T = a_->tables(std::max(b.w, 0));
    std::vector<std::pair<uint32_t, Rational>> acc;
    for (const auto& [I, coeff] : form) {
      const Polynomial nf = a_->normal_form(coeff);
      for (const auto& [m, c] : nf.terms()) {
        auto it = b.index.find({I, T->id_of(m)});
        if (it == b.index.end()) throw Error(ErrorCode::SanityFail, "form leaves its weight");
        acc.emplace_back(it->second, c);
      }
    }
    return make_sparse(std::move(acc));
  }

  /// Columns m * df_r ∧ dx_J spanning the relations in (p, w).
  SparseMatrix relations(int p, int w) const {
    auto b = basis(p, w);
    std::vector<SparseVec> cols;
    if (p < 1) return SparseMatrix(b.elems.size(), std::move(cols));
    auto T = a_->tables(std::max(w, 0));
    for (const auto& f : a_->relations()) {
      const int wf = f.homogeneous_weight();
      std::vector<Polynomial> df;
      for (std::size_t i = 0; i < a_->nvars(); ++i) df.push_back(partial(f, i));
      for (FormMask J : masks(p - 1)) {
        int k = w - wf - mask_weight(J);
        if (k < 0) continue;
        for (std::size_t j = 0; j < T->count(k); ++j) {
          const Monomial& m = T->monomials[T->first(k) + j];
          std::map<FormMask, Polynomial> form;
          for (std::size_t i = 0; i < a_->nvars(); ++i) {
            int s = wedge_sign_left(i, J);
            if (s == 0 || df[i].is_zero()) continue;
            auto it = form.try_emplace(J | (1u << i), a_->zero()).first;
            it->second = it->second + df[i].scaled(Rational(s), m);
          }
          cols.push_back(coordinates(b, form));
        }
      }
    }
    return SparseMatrix(b.elems.size(), std::move(cols));
  }

  std::size_t dim(int p, int w) const {
    if (p < 0 || w < 0) return 0;
    return basis(p, w).elems.size() - relations(p, w).rank();
  }

  /// de Rham d: free (p, w) -> free (p+1, w); well defined modulo relations.
  SparseMatrix d_matrix(int p, int w) const {
    auto src = basis(p, w), dst = basis(p + 1, w);
    auto T = a_->tables(std::max(w, 0));
    std::vector<SparseVec> cols;
    for (const auto& [I, id] : src.elems) {
      Polynomial m = Polynomial::monomial(a_->ring(), T->monomials[id]);
      std::map<FormMask, Polynomial> form;
      for (std::size_t i = 0; i < a_->nvars(); ++i) {
        int s = wedge_sign_left(i, I);
        if (s == 0) continue;
        Polynomial dm = partial(m, i);
        if (dm.is_zero()) continue;
        auto it = form.try_emplace(I | (1u << i), a_->zero()).first;
        it->second = it->second + dm.scaled(Rational(s), a_->ring()->one());
      }
      cols.push_back(coordinates(dst, form));
    }
    return SparseMatrix(dst.elems.size(), std::move(cols));
  }

  /// d∘d lands in the relation span of (p+2, w).
  bool d_squared_zero(int p, int w) const {
    SparseMatrix dd = d_matrix(p + 1, w) * d_matrix(p, w);
    SparseMatrix R = relations(p + 2, w);
    std::vector<SparseVec> cols = R.columns();
    for (const auto& c : dd.columns()) cols.push_back(c);
    return rank_of_vectors(std::move(cols), R.rows()) == R.rank();
  }

 private:
  AlgebraPtr a_;
};

inline std::size_t omega_dims(const AlgebraPtr& a, int p, int w) { return KahlerModule(a).dim(p, w); }

/// Matrix of the antisymmetrization a dx_I -> (1/p!) sum sgn(s) a[x_I(s)]
/// from the free forms of one fine class into the bar slice of that class.
inline SparseMatrix hkr_matrix(const KahlerModule& K, const BarComplex& bc, int n, int w, const FineDegree& c) {
  const auto& a = K.algebra();
  auto s = bc.slice(n, w, c);
  auto b = K.basis(n, w);
  auto T = a->tables(std::max(w, 0));
  Rational inv_fact(1);
  for (int k = 2; k <= n; ++k) inv_fact = inv_fact / Rational(k);
  std::vector<SparseVec> cols;
  Tensor t(n + 1);
  for (const auto& [I, id] : b.elems) {
    std::vector<uint32_t> gens;
    for (std::size_t i = 0; i < a->nvars(); ++i)
      if (I & (1u << i)) gens.push_back(T->id_of(a->generator(i).leading_monomial()));
    t[0] = id;
    std::copy(gens.begin(), gens.end(), t.begin() + 1);
    if (bc.class_of(t.data(), n, *T) != c) continue;
    std::vector<int> perm(n);
    for (int k = 0; k < n; ++k) perm[k] = k;
    std::vector<std::pair<uint32_t, Rational>> acc;
    do {
      int inv = 0;
      for (int x = 0; x < n; ++x)
        for (int y = x + 1; y < n; ++y) inv += perm[x] > perm[y];
      for (int k = 0; k < n; ++k) t[k + 1] = gens[perm[k]];
      int64_t r = s->find(t.data());
      if (r < 0) throw Error(ErrorCode::SanityFail, "HKR image leaves the slice");
      acc.emplace_back(static_cast<uint32_t>(r), inv % 2 ? -inv_fact : inv_fact);
    } while (std::next_permutation(perm.begin(), perm.end()));
    cols.push_back(make_sparse(std::move(acc)));
  }
  return SparseMatrix(s->size(), std::move(cols));
}

struct HkrComparison {
  int n = 0, w = 0;
  std::size_t omega = 0, hh = 0, image = 0;
  bool lands_in_cycles = true;
  bool bijective() const { return omega == hh && image == hh; }
};

/// dim Omega^n, dim HH_n and the rank of HKR on homology at (n, w).
inline HkrComparison hkr_compare(const HochschildEngine& e, int n, int w) {
  KahlerModule K(e.algebra());
  const auto& bc = e.complex();
  HkrComparison r;
  r.n = n;
  r.w = w;
  r.omega = K.dim(n, w);
  r.hh = e.hh_dim(n, w);
  for (const auto& c : e.classes(n, w)) {
    auto H = hkr_matrix(K, bc, n, w, c);
    if (!(bc.b_matrix(n, w, c) * H).is_zero()) r.lands_in_cycles = false;
    auto bi = bc.b_matrix(n + 1, w, c);
    std::vector<SparseVec> cols = bi.columns();
    for (const auto& col : H.columns()) cols.push_back(col);
    r.image += rank_of_vectors(std::move(cols), H.rows()) - bi.rank();
  }
  return r;
}

/// dim of the weight-w kernel of Omega^p_A -> Omega^p_B along a hom A -> B.
inline std::size_t torsion_dims(const GradedHom& f, int p, int w) {
  KahlerModule KA(f.source()), KB(f.target());
  const auto& A = f.source();
  const auto& B = f.target();
  auto ba = KA.basis(p, w), bb = KB.basis(p, w);
  auto TA = A->tables(std::max(w, 0));
  // d f(x_i) as forms on B
  std::vector<std::map<FormMask, Polynomial>> dimg(A->nvars());
  for (std::size_t i = 0; i < A->nvars(); ++i)
    for (std::size_t j = 0; j < B->nvars(); ++j) {
      Polynomial d = partial(f.images()[i], j);
      if (!d.is_zero()) dimg[i].emplace(1u << j, d);
    }
  std::vector<SparseVec> cols = KB.relations(p, w).columns();
  const std::size_t base = SparseMatrix(bb.elems.size(), cols).rank();
  for (const auto& [I, id] : ba.elems) {
    std::map<FormMask, Polynomial> form;
    form.emplace(0u, f.apply(TA->monomials[id]));
    for (std::size_t i = 0; i < A->nvars(); ++i) {
      if (!(I & (1u << i))) continue;
      std::map<FormMask, Polynomial> next;
      for (const auto& [M, coeff] : form)
        for (const auto& [J, d] : dimg[i]) {
          std::size_t j = static_cast<std::size_t>(std::countr_zero(J));
          int s = wedge_sign_right(M, j);
          if (s == 0) continue;
          auto it = next.try_emplace(M | J, B->zero()).first;
          it->second = it->second + (coeff * d).scaled(Rational(s), B->ring()->one());
        }
      form = std::move(next);
    }
    cols.push_back(KB.coordinates(bb, form));
  }
  const std::size_t image = rank_of_vectors(std::move(cols), bb.elems.size()) - base;
  return KA.dim(p, w) - image;
}

enum class Smoothness { Smooth, Singular, Indeterminate };

inline const char* to_string(Smoothness s) {
  switch (s) {
    case Smoothness::Smooth: return "SMOOTH";
    case Smoothness::Singular: return "SINGULAR";
    case Smoothness::Indeterminate: return "INDETERMINATE";
  }
  return "?";
}

struct SmoothnessVerdict {
  Smoothness verdict = Smoothness::Indeterminate;
  int krull_dim = 0;
  int embedding_dim = 0;          // dim m/m^2 at the vertex
  bool reduced = true;            // no nilpotent generator found up to the cutoff
  bool domain = true;             // no zero-divisor among generators found up to the cutoff
  std::vector<int> singular_weights;  // weights of the generators spanning m/m^2
};

/// The singular locus of a positively graded algebra is closed and stable
/// under the weight action, so it is empty iff it misses the vertex.  At the
/// vertex the local ring is regular iff dim m/m^2 equals the Krull dimension.
inline SmoothnessVerdict jacobian_smooth(const AlgebraPtr& a, int probe_weight = 12) {
  SmoothnessVerdict v;
  const std::size_t n = a->nvars();
  std::vector<SparseVec> lin;
  for (const auto& r : a->relations()) {
    std::vector<std::pair<uint32_t, Rational>> t;
    for (const auto& [m, c] : r.terms()) {
      int deg = 0;
      std::size_t which = 0;
      for (std::size_t i = 0; i < n; ++i)
        if (m[i]) deg += m[i], which = i;
      if (deg == 1) t.emplace_back(static_cast<uint32_t>(which), c);
    }
    if (!t.empty()) lin.push_back(make_sparse(std::move(t)));
  }
  const std::size_t r = rank_of_vectors(lin, n);
  v.embedding_dim = static_cast<int>(n - r);
  v.krull_dim = a->krull_dimension();
  auto T = a->tables(probe_weight);
  for (std::size_t i = 0; i < n; ++i) {
    Polynomial g = a->generator(i);
    Polynomial p = g;
    for (int e = 2; e * a->ring()->weights[i] <= probe_weight; ++e) {
      p = a->multiply(p, g);
      if (p.is_zero()) v.reduced = false;
    }
    for (uint32_t id = 1; id < T->monomials.size(); ++id) {
      if (T->weight[id] + a->ring()->weights[i] > probe_weight) break;
      if (a->multiply(g, Polynomial::monomial(a->ring(), T->monomials[id])).is_zero()) v.domain = false;
    }
  }
  if (v.embedding_dim == v.krull_dim && v.reduced && v.domain) {
    v.verdict = Smoothness::Smooth;
  } else {
    v.verdict = Smoothness::Singular;
    for (std::size_t i = 0; i < n; ++i) v.singular_weights.push_back(a->ring()->weights[i]);
  }
  return v;
}

}  // namespace khh
