#pragma once

// The fiber F = fib(HH(A) -> H_cdh(A, HH)) for one-point squares of graded
// singularities, computed per weight as the shifted mapping cone of the map
// of bar complexes induced by nu: A -> Atil.
//
// Square kinds and the model of H_cdh(A, HH) each one uses:
//   identity    A smooth, Atil = A; F = 0.
//   resolution  nu injective, finite conductor on both sides; the reduced
//               exceptional fibre and the centre are both a point, so the
//               descent square degenerates to HH(Atil).
//   quotient r  A = Atil^{mu_r} with mu_r acting by zeta^weight; the model is
//               the invariant part HH(Atil)^{mu_r}, i.e. weights divisible by r.
//   reduction   nu surjective with nilpotent kernel, Atil smooth; cdh does not
//               see nilpotents, so the model is HH(Atil).
//
// Indexing: H^m(F) is homological degree -m of F, and H_k(F) = H_{k+1}(cone).

#include "khh/hochschild.hpp"
#include "khh/kahler.hpp"

#include <numeric>

namespace khh {

enum class SquareKind { Identity, Resolution, Quotient, Reduction };

inline const char* to_string(SquareKind k) {
  switch (k) {
    case SquareKind::Identity: return "identity";
    case SquareKind::Resolution: return "resolution";
    case SquareKind::Quotient: return "quotient";
    case SquareKind::Reduction: return "reduction";
  }
  return "?";
}

struct ResolutionSquare {
  std::string name;
  SquareKind kind = SquareKind::Identity;
  AlgebraPtr a, atil;
  std::shared_ptr<const GradedHom> nu;
  std::vector<Polynomial> conductor_a, conductor_atil;
  bool center_is_exceptional = false;
  int modulus = 1;  // quotient squares: the model lives in weights divisible by this

  /// Weights where the model of H_cdh is HH(Atil) rather than zero.
  bool target_weight(int w) const { return w % modulus == 0; }

  /// Square file: one or two `algebra` blocks followed by square statements
  ///   normalize <target> <gen>-><poly> ...
  ///   conductor <polys in A> | <polys in Atil>     (comma separated)
  ///   center_is_exceptional
  ///   quotient <r>
  ///   reduction
  /// With a single algebra and no `normalize` the square is the identity.
  static ResolutionSquare parse(std::string_view text) {
    auto stmts = split_statements(text);
    static const std::set<std::string> square_kw = {"normalize", "conductor", "center_is_exceptional", "quotient",
                                                    "reduction", "square"};
    std::vector<std::pair<std::size_t, std::size_t>> blocks;
    std::vector<const Statement*> sq;
    for (std::size_t k = 0; k < stmts.size(); ++k) {
      const auto& s = stmts[k];
      if (square_kw.count(s.keyword)) {
        sq.push_back(&s);
      } else if (s.keyword == "algebra" || blocks.empty()) {
        blocks.emplace_back(k, k + 1);
      } else {
        blocks.back().second = k + 1;
      }
    }
    if (blocks.empty() || blocks.size() > 2) throw ParseError("square file needs one or two algebra blocks", 1, 1);
    std::vector<AlgebraPtr> algs;
    for (auto [b, e] : blocks) {
      for (std::size_t k = b; k < e; ++k)
        if (square_kw.count(stmts[k].keyword))
          throw ParseError("square statement inside an algebra block", stmts[k].line, stmts[k].keyword_column);
      algs.push_back(GradedAlgebra::from_statements(stmts, b, e));
    }
    ResolutionSquare r;
    const Statement* normalize = nullptr;
    const Statement* conductor = nullptr;
    for (const Statement* s : sq) {
      if (s->keyword == "normalize") {
        normalize = s;
      } else if (s->keyword == "conductor") {
        conductor = s;
      } else if (s->keyword == "center_is_exceptional") {
        r.center_is_exceptional = true;
      } else if (s->keyword == "quotient") {
        auto w = split_words(*s);
        if (w.size() != 1) throw ParseError("expected 'quotient <r>'", s->line, s->keyword_column);
        try {
          r.modulus = std::stoi(w[0].first);
        } catch (const std::exception&) {
          throw ParseError("bad quotient order", s->line, w[0].second + 1);
        }
        if (r.modulus < 2) throw ParseError("quotient order must be >= 2", s->line, w[0].second + 1);
        r.kind = SquareKind::Quotient;
      } else if (s->keyword == "reduction") {
        r.kind = SquareKind::Reduction;
      } else if (s->keyword == "square") {
        auto w = split_words(*s);
        if (w.size() == 1) r.name = w[0].first;
      }
    }
    if (!normalize) {
      if (algs.size() != 1) throw ParseError("two algebras but no 'normalize' statement", 1, 1);
      if (r.kind != SquareKind::Identity) throw ParseError("quotient/reduction squares need 'normalize'", 1, 1);
      r.a = r.atil = algs[0];
      r.nu = std::make_shared<GradedHom>(GradedHom::identity(algs[0]));
      if (r.name.empty()) r.name = algs[0]->name();
      return r;
    }
    auto words = split_words(*normalize);
    if (words.empty()) throw ParseError("expected 'normalize <target> <gen>-><poly> ...'", normalize->line, 1);
    const std::string target = words[0].first;
    int ti = -1;
    for (std::size_t k = 0; k < algs.size(); ++k)
      if (algs[k]->name() == target) ti = static_cast<int>(k);
    if (ti < 0) throw ParseError("unknown target algebra '" + target + "'", normalize->line, words[0].second + 1);
    r.atil = algs[ti];
    r.a = algs.size() == 2 ? algs[1 - ti] : algs[0];
    std::map<std::string, std::string> assign;
    std::string current;
    for (std::size_t k = 1; k < words.size(); ++k) {
      const auto& [word, col] = words[k];
      auto arrow = word.find("->");
      if (arrow == std::string::npos) {
        if (current.empty()) throw ParseError("expected '<gen>-><poly>'", normalize->line, col + 1);
        assign[current] += " " + word;
        continue;
      }
      current = word.substr(0, arrow);
      if (assign.count(current)) throw ParseError("generator assigned twice", normalize->line, col + 1);
      assign[current] = word.substr(arrow + 2);
    }
    r.nu = std::make_shared<GradedHom>(GradedHom::parse(r.a, r.atil, assign));
    if (r.kind == SquareKind::Identity) r.kind = SquareKind::Resolution;
    if (conductor) {
      auto bar = conductor->rest.find('|');
      if (bar == std::string::npos) throw ParseError("expected 'conductor <A polys> | <Atil polys>'", conductor->line, 1);
      auto polys = [&](const AlgebraPtr& alg, const std::string& s) {
        std::vector<Polynomial> out;
        std::stringstream ss(s);
        std::string piece;
        while (std::getline(ss, piece, ','))
          if (piece.find_first_not_of(" \t") != std::string::npos) out.push_back(alg->normal_form(alg->parse(piece)));
        return out;
      };
      r.conductor_a = polys(r.a, conductor->rest.substr(0, bar));
      r.conductor_atil = polys(r.atil, conductor->rest.substr(bar + 1));
    }
    if (r.name.empty()) r.name = r.a->name();
    return r;
  }
};

using SquarePtr = std::shared_ptr<const ResolutionSquare>;

namespace cdh_detail {

inline Polynomial power(const AlgebraPtr& a, const Polynomial& p, int e) {
  Polynomial r = a->one();
  for (int k = 0; k < e; ++k) r = a->multiply(r, p);
  return r;
}

/// Coordinates of a polynomial in the weight-w standard monomials.
inline SparseVec coords(const AlgebraPtr& a, const Polynomial& p, int w) {
  auto T = a->tables(w);
  std::vector<std::pair<uint32_t, Rational>> acc;
  const Polynomial nf = a->normal_form(p);
  for (const auto& [m, c] : nf.terms()) acc.emplace_back(T->id_of(m) - T->first(w), c);
  return make_sparse(std::move(acc));
}

/// Spanning set of the weight-w part of the ideal generated by `gens`.
inline std::vector<SparseVec> ideal_part(const AlgebraPtr& a, const std::vector<Polynomial>& gens, int w) {
  std::vector<SparseVec> out;
  auto T = a->tables(w);
  for (const auto& g : gens) {
    const int k = w - g.homogeneous_weight();
    if (k < 0) continue;
    for (std::size_t j = 0; j < T->count(k); ++j)
      out.push_back(coords(a, a->multiply(g, Polynomial::monomial(a->ring(), T->monomials[T->first(k) + j])), w));
  }
  return out;
}

/// Matrix of nu: A_w -> Atil_w.
inline SparseMatrix weight_map(const GradedHom& nu, int w) {
  auto T = nu.source()->tables(w);
  std::vector<SparseVec> cols;
  for (std::size_t j = 0; j < T->count(w); ++j)
    cols.push_back(coords(nu.target(), nu.apply(T->monomials[T->first(w) + j]), w));
  return SparseMatrix(nu.target()->dim(w), std::move(cols));
}

inline bool contained(const std::vector<SparseVec>& sub, const std::vector<SparseVec>& in, std::size_t dim) {
  std::vector<SparseVec> both = in;
  both.insert(both.end(), sub.begin(), sub.end());
  return rank_of_vectors(in, dim) == rank_of_vectors(std::move(both), dim);
}

inline std::size_t quotient_dim(const AlgebraPtr& a, const std::vector<Polynomial>& ideal, int w) {
  return a->dim(w) - rank_of_vectors(ideal_part(a, ideal, w), a->dim(w));
}

}  // namespace cdh_detail

/// Checks the square hypotheses on weights <= max_weight; throws
/// SquareInvalid naming the first failure.
inline void validate_square(const ResolutionSquare& sq, int max_weight) {
  using namespace cdh_detail;
  auto fail = [&](const std::string& why) { throw Error(ErrorCode::SquareInvalid, sq.name + ": " + why); };
  if (!sq.a || !sq.atil || !sq.nu) fail("incomplete square");
  if (jacobian_smooth(sq.atil).verdict != Smoothness::Smooth) fail("target algebra is not smooth");
  switch (sq.kind) {
    case SquareKind::Identity:
      if (jacobian_smooth(sq.a).verdict != Smoothness::Smooth) fail("identity square on a singular algebra");
      return;
    case SquareKind::Resolution:
    case SquareKind::Quotient:
      for (int w = 0; w <= max_weight; ++w)
        if (weight_map(*sq.nu, w).rank() != sq.a->dim(w)) fail("nu is not injective in weight " + std::to_string(w));
      break;
    case SquareKind::Reduction:
      break;
  }
  if (sq.kind == SquareKind::Quotient) {
    for (int w = 0; w <= max_weight; ++w) {
      if (!sq.target_weight(w) && sq.a->dim(w) != 0) fail("A has weight " + std::to_string(w) + " outside the invariants");
      if (sq.target_weight(w) && sq.a->dim(w) != sq.atil->dim(w))
        fail("A is not the full invariant ring in weight " + std::to_string(w));
    }
    return;
  }
  if (sq.kind == SquareKind::Reduction) {
    for (int w = 0; w <= max_weight; ++w) {
      auto f = weight_map(*sq.nu, w);
      if (f.rank() != sq.atil->dim(w)) fail("nu is not surjective in weight " + std::to_string(w));
      if (w == 0) continue;
      auto T = sq.a->tables(w);
      for (const auto& k : kernel_basis(f)) {
        Polynomial p(sq.a->ring());
        for (const auto& e : k) p.add_term(T->monomials[T->first(w) + e.index], e.value);
        // weight-homogeneous of positive weight: nilpotent iff some power vanishes
        // below the first weight where A is zero for a full generator-weight run
        bool nil = false;
        for (int e = 2; e * w <= 4 * max_weight && !nil; ++e) nil = power(sq.a, p, e).is_zero();
        if (!nil) fail("kernel of nu is not nilpotent in weight " + std::to_string(w));
      }
    }
    return;
  }
  // resolution
  if (!sq.center_is_exceptional) fail("resolution square without the center_is_exceptional flag");
  if (sq.conductor_a.empty() || sq.conductor_atil.empty()) fail("resolution square without a conductor");
  int maxgen = 1;
  for (int wt : sq.a->ring()->weights) maxgen = std::max(maxgen, wt);
  for (int wt : sq.atil->ring()->weights) maxgen = std::max(maxgen, wt);
  for (int w = 0; w <= max_weight; ++w) {
    auto f = weight_map(*sq.nu, w);
    const std::size_t dt = sq.atil->dim(w);
    // c_Atil lies in nu(A), and nu(c_A) spans the same weight-w subspace
    auto ct = ideal_part(sq.atil, sq.conductor_atil, w);
    if (!contained(ct, f.columns(), dt)) fail("conductor is not contained in A in weight " + std::to_string(w));
    std::vector<SparseVec> ca_img;
    for (const auto& v : ideal_part(sq.a, sq.conductor_a, w)) ca_img.push_back(f.apply(v));
    if (!contained(ca_img, ct, dt) || !contained(ct, ca_img, dt))
      fail("the two conductor presentations differ in weight " + std::to_string(w));
  }
  // finite quotients: both vanish on a full run of generator weights below the cutoff
  for (int w = max_weight - maxgen + 1; w <= max_weight; ++w)
    if (quotient_dim(sq.a, sq.conductor_a, w) != 0 || quotient_dim(sq.atil, sq.conductor_atil, w) != 0)
      fail("conductor quotients are not finite below weight " + std::to_string(max_weight) +
           "; the exceptional fibre cannot be certified to be the centre");
  if (quotient_dim(sq.a, sq.conductor_a, 0) != 1 || quotient_dim(sq.atil, sq.conductor_atil, 0) != 1)
    fail("conductor contains a unit");
}

struct FiberCell {
  int k = 0, w = 0;               // homological degree of F
  std::size_t cone = 0;           // dim H_k(F) from the cone
  std::size_t ker = 0, coker = 0; // ker H_k(A) -> H_k(model), coker H_{k+1}(A) -> H_{k+1}(model)
  bool les_ok() const { return cone == ker + coker; }
};

struct TkFormulaCell {
  int n = 0, i = 0, w = 0;
  std::size_t tk = 0, hh = 0;  // tk_hodge(n, w, i) and dim HH_{n-1}^{(i-1)}(A)_w
  bool equal() const { return tk == hh; }
};

struct TkFormulaReport {
  int n_max = 0, w_max = 0;
  std::vector<TkFormulaCell> cells;
  /// (n, i) -> (sum of tk, sum of hh) over weights
  std::map<std::pair<int, int>, std::pair<std::size_t, std::size_t>> aggregate() const {
    std::map<std::pair<int, int>, std::pair<std::size_t, std::size_t>> out;
    for (const auto& c : cells) {
      auto& a = out[{c.n, c.i}];
      a.first += c.tk;
      a.second += c.hh;
    }
    return out;
  }
  bool cellwise_equal() const {
    return std::all_of(cells.begin(), cells.end(), [](const TkFormulaCell& c) { return c.equal(); });
  }
  bool aggregate_equal() const {
    for (const auto& [k, v] : aggregate())
      if (v.first != v.second) return false;
    return true;
  }
};

class CdhFiber {
 public:
  explicit CdhFiber(SquarePtr sq, EngineOptions opt = {}, int validate_weight = 12)
      : sq_(std::move(sq)),
        opt_(opt),
        ea_(sq_->a, Convention::Standard, opt),
        et_(sq_->atil, Convention::Standard, opt) {
    validate_square(*sq_, validate_weight);
  }

  const ResolutionSquare& square() const { return *sq_; }
  const HochschildEngine& source_engine() const { return ea_; }
  const HochschildEngine& target_engine() const { return et_; }

  /// dim H_k(cone) at weight w.
  std::size_t cone_homology(int k, int w) const {
    if (k < 0 || w < 0) return 0;
    std::size_t total = 0;
    for (const auto& blk : blocks(w, k)) {
      auto dk = cone_matrix(blk, k, w), dk1 = cone_matrix(blk, k + 1, w);
      check_square(blk, k, w);
      total += dk.cols() - dk.rank() - dk1.rank();
    }
    return total;
  }

  /// dim H^m(F) at weight w.
  std::size_t fiber_dims(int m, int w) const { return cone_homology(1 - m, w); }

  /// Cone homology next to the rank bookkeeping of the long exact sequence.
  FiberCell fiber_cell(int k, int w) const {
    FiberCell c;
    c.k = k;
    c.w = w;
    c.cone = cone_homology(k + 1, w);
    c.ker = source_dim(k, w) - induced_rank(k, w);
    c.coker = model_dim(k + 1, w) - induced_rank(k + 1, w);
    return c;
  }

  /// TK_n = H^{1-n}(F) = H_{n-1}(F).
  std::size_t tk(int n, int w) const {
    auto c = fiber_cell(n - 1, w);
    if (!c.les_ok())
      throw Error(ErrorCode::SanityFail, "long exact sequence bookkeeping fails at n=" + std::to_string(n) +
                                             " w=" + std::to_string(w) + ": cone " + std::to_string(c.cone) +
                                             " vs ker " + std::to_string(c.ker) + " + coker " + std::to_string(c.coker));
    return c.cone;
  }

  /// TK_n^{(i)} = H_{n-1}(F^{(i-1)}) for i = 1..n+1; the pieces sum to tk.
  std::size_t tk_hodge(int n, int w, int i) const {
    const int j = i - 1;
    if (j < 0 || n < 0 || w < 0) return 0;
    std::size_t total = 0;
    for (const auto& blk : blocks(w, n)) {
      auto s = hodge_sub(blk, n, w, j), s1 = hodge_sub(blk, n + 1, w, j);
      auto d = cone_matrix(blk, n, w), d1 = cone_matrix(blk, n + 1, w);
      total += subcomplex_homology_dim(s, s1, d, d1);
    }
    return total;
  }

  std::vector<std::size_t> tk_hodge_split(int n, int w) const {
    std::vector<std::size_t> out(n + 2, 0);
    std::size_t sum = 0;
    for (int i = 1; i <= n + 1; ++i) sum += out[i] = tk_hodge(n, w, i);
    const std::size_t whole = tk(n, w);
    if (sum != whole)
      throw Error(ErrorCode::IdempotentSanityFail, "Hodge pieces of TK_" + std::to_string(n) + " at weight " +
                                                       std::to_string(w) + " sum to " + std::to_string(sum) +
                                                       ", expected " + std::to_string(whole));
    return out;
  }

  /// For 1 <= i < n <= n_max: tk_hodge(n, w, i) against dim HH_{n-1}^{(i-1)}(A)_w.
  TkFormulaReport tk_formula_check(int n_max, int w_max) const {
    TkFormulaReport r;
    r.n_max = n_max;
    r.w_max = w_max;
    for (int n = 2; n <= n_max; ++n)
      for (int w = 0; w <= w_max; ++w) {
        auto hh = ea_.hodge_split(n - 1, w);
        for (int i = 1; i < n; ++i) {
          TkFormulaCell c;
          c.n = n;
          c.i = i;
          c.w = w;
          c.tk = tk_hodge(n, w, i);
          c.hh = hh[i - 1];
          r.cells.push_back(c);
        }
      }
    return r;
  }

 private:
  struct Block {
    std::vector<FineDegree> a, t;  // source and target classes
  };

  struct ImageKey {
    int k, w;
    FineDegree c;
    bool operator<(const ImageKey& o) const { return std::tie(k, w, c) < std::tie(o.k, o.w, o.c); }
  };
  // f on one source slice: per source tensor, (target class, target row, coeff)
  using Image = std::vector<std::vector<std::tuple<FineDegree, uint32_t, Rational>>>;

  std::size_t source_dim(int k, int w) const { return k < 0 ? 0 : ea_.hh_dim(k, w); }
  std::size_t model_dim(int k, int w) const { return k < 0 || !sq_->target_weight(w) ? 0 : et_.hh_dim(k, w); }

  std::vector<FineDegree> target_classes(int k, int w) const {
    if (k < 0 || !sq_->target_weight(w)) return {};
    return et_.classes(k, w);
  }

  const Image& image(int k, int w, const FineDegree& c) const {
    {
      std::lock_guard<std::mutex> lk(m_);
      auto it = images_.find({k, w, c});
      if (it != images_.end()) return it->second;
    }
    const auto& A = sq_->a;
    const auto& At = sq_->atil;
    auto s = ea_.complex().slice(k, w, c);
    auto TA = A->tables(w);
    auto TT = At->tables(w);
    // images of standard monomials as (target id, coeff)
    std::map<uint32_t, std::vector<std::pair<uint32_t, Rational>>> mono;
    auto img_of = [&](uint32_t id) -> const std::vector<std::pair<uint32_t, Rational>>& {
      auto it = mono.find(id);
      if (it != mono.end()) return it->second;
      std::vector<std::pair<uint32_t, Rational>> v;
      const Polynomial p = sq_->nu->apply(TA->monomials[id]);
      for (const auto& [m, coef] : p.terms()) v.emplace_back(TT->id_of(m), coef);
      return mono.emplace(id, std::move(v)).first->second;
    };
    Image out(s->size());
    const bool live = sq_->target_weight(w);
    std::map<FineDegree, SlicePtr> tslices;
    Tensor t(k + 1);
    for (std::size_t r = 0; r < s->size() && live; ++r) {
      const uint32_t* src = s->at(r);
      std::vector<const std::vector<std::pair<uint32_t, Rational>>*> parts;
      bool zero = false;
      for (int p = 0; p <= k; ++p) {
        parts.push_back(&img_of(src[p]));
        if (parts.back()->empty()) zero = true;
      }
      if (zero) continue;
      std::map<Tensor, Rational> acc;
      std::vector<std::size_t> idx(k + 1, 0);
      for (;;) {
        Rational coef(1);
        for (int p = 0; p <= k; ++p) {
          t[p] = (*parts[p])[idx[p]].first;
          coef = coef * (*parts[p])[idx[p]].second;
        }
        bool scalar = false;
        for (int p = 1; p <= k; ++p)
          if (TT->weight[t[p]] == 0) scalar = true;
        if (!scalar) acc[t] += coef;
        int p = k;
        while (p >= 0 && ++idx[p] == parts[p]->size()) idx[p--] = 0;
        if (p < 0) break;
      }
      for (const auto& [tt, coef] : acc) {
        if (coef.is_zero()) continue;
        auto cls = et_.complex().class_of(tt.data(), k, *TT);
        auto& sl = tslices[cls];
        if (!sl) sl = et_.complex().slice(k, w, cls);
        int64_t row = sl->find(tt.data());
        if (row < 0) throw Error(ErrorCode::SanityFail, "chain map leaves the target bar complex");
        out[r].emplace_back(cls, static_cast<uint32_t>(row), coef);
      }
    }
    std::lock_guard<std::mutex> lk(m_);
    return images_.emplace(ImageKey{k, w, c}, std::move(out)).first->second;
  }

  /// Connected components of the class graph linked by f, using source
  /// degrees <= k_max.  Each component is a subcomplex of the cone.
  std::vector<Block> blocks(int w, int k_max) const {
    std::map<std::pair<int, FineDegree>, std::pair<int, FineDegree>> parent;
    std::function<std::pair<int, FineDegree>(const std::pair<int, FineDegree>&)> find =
        [&](const std::pair<int, FineDegree>& x) {
          auto it = parent.find(x);
          if (it == parent.end()) {
            parent[x] = x;
            return x;
          }
          if (it->second == x) return x;
          auto r = find(it->second);
          parent[x] = r;
          return r;
        };
    auto unite = [&](const std::pair<int, FineDegree>& x, const std::pair<int, FineDegree>& y) {
      auto a = find(x), b = find(y);
      if (a != b) parent[a] = b;
    };
    const int top = std::max(k_max + 1, 0);
    for (int k = 0; k <= top; ++k) {
      for (const auto& c : ea_.classes(k, w)) {
        find({0, c});
        if (k > k_max) continue;
        for (const auto& col : image(k, w, c))
          for (const auto& [tc, row, coef] : col) unite({0, c}, {1, tc});
      }
      for (const auto& c : target_classes(k, w)) find({1, c});
    }
    std::map<std::pair<int, FineDegree>, Block> comps;
    for (const auto& [node, par] : parent) {
      auto root = find(node);
      auto& b = comps[root];
      (node.first == 0 ? b.a : b.t).push_back(node.second);
    }
    std::vector<Block> out;
    for (auto& [r, b] : comps) out.push_back(std::move(b));
    return out;
  }

  // Cone degree k = C_{k-1}(A) ⊕ C_k(Atil), laid out as source classes then
  // target classes in block order.
  struct Layout {
    std::vector<std::size_t> a_off, t_off;
    std::size_t size = 0;
  };

  Layout layout(const Block& b, int k, int w) const {
    Layout l;
    for (const auto& c : b.a) {
      l.a_off.push_back(l.size);
      l.size += k - 1 >= 0 ? ea_.complex().slice(k - 1, w, c)->size() : 0;
    }
    for (const auto& c : b.t) {
      l.t_off.push_back(l.size);
      l.size += k >= 0 && sq_->target_weight(w) ? et_.complex().slice(k, w, c)->size() : 0;
    }
    return l;
  }

  static std::size_t index_of(const std::vector<FineDegree>& v, const FineDegree& c) {
    auto it = std::find(v.begin(), v.end(), c);
    if (it == v.end()) throw Error(ErrorCode::SanityFail, "cone block is not closed under the chain map");
    return static_cast<std::size_t>(it - v.begin());
  }

  /// d_k: cone_k -> cone_{k-1}, d(a, t) = (-b a, f a + b t).
  SparseMatrix cone_matrix(const Block& b, int k, int w) const {
    Layout src = layout(b, k, w), dst = layout(b, k - 1, w);
    std::vector<SparseVec> cols(src.size);
    for (std::size_t ci = 0; ci < b.a.size() && k - 1 >= 0; ++ci) {
      const auto& c = b.a[ci];
      const std::size_t n = ea_.complex().slice(k - 1, w, c)->size();
      if (n == 0) continue;
      SparseMatrix bm = k - 2 >= 0 ? ea_.complex().b_matrix(k - 1, w, c) : SparseMatrix(0, n);
      const auto& img = image(k - 1, w, c);
      for (std::size_t j = 0; j < n; ++j) {
        std::vector<std::pair<uint32_t, Rational>> acc;
        if (k - 2 >= 0)
          for (const auto& e : bm.column(j)) acc.emplace_back(static_cast<uint32_t>(dst.a_off[ci] + e.index), -e.value);
        for (const auto& [tc, row, coef] : img[j])
          acc.emplace_back(static_cast<uint32_t>(dst.t_off[index_of(b.t, tc)] + row), coef);
        cols[src.a_off[ci] + j] = make_sparse(std::move(acc));
      }
    }
    for (std::size_t ci = 0; ci < b.t.size() && k >= 1 && sq_->target_weight(w); ++ci) {
      const auto& c = b.t[ci];
      auto bm = et_.complex().b_matrix(k, w, c);
      for (std::size_t j = 0; j < bm.cols(); ++j) {
        std::vector<std::pair<uint32_t, Rational>> acc;
        for (const auto& e : bm.column(j)) acc.emplace_back(static_cast<uint32_t>(dst.t_off[ci] + e.index), e.value);
        cols[src.t_off[ci] + j] = make_sparse(std::move(acc));
      }
    }
    return SparseMatrix(dst.size, std::move(cols));
  }

  /// d_k d_{k+1} = 0 encodes b^2 = 0 on both sides and f b = b f.
  void check_square(const Block& b, int k, int w) const {
    if (!opt_.verify) return;
    if (!(cone_matrix(b, k, w) * cone_matrix(b, k + 1, w)).is_zero())
      throw Error(ErrorCode::SanityFail, "nu does not induce a chain map at degree " + std::to_string(k) +
                                             ", weight " + std::to_string(w));
  }

  /// Basis of Hodge piece j of cone_k inside the block layout.
  SparseMatrix hodge_sub(const Block& b, int k, int w, int j) const {
    Layout l = layout(b, k, w);
    std::vector<SparseVec> cols;
    auto add = [&](const SlicePtr& s, std::size_t off) {
      if (s->size() == 0 || j > s->degree()) return;
      auto bases = hodge_bases(*s, HodgeRoute::Idempotent);
      for (const auto& v : bases[j]) {
        std::vector<std::pair<uint32_t, Rational>> acc;
        for (const auto& e : v) acc.emplace_back(static_cast<uint32_t>(off + e.index), e.value);
        cols.push_back(make_sparse(std::move(acc)));
      }
    };
    for (std::size_t ci = 0; ci < b.a.size() && k - 1 >= 0; ++ci) add(ea_.complex().slice(k - 1, w, b.a[ci]), l.a_off[ci]);
    for (std::size_t ci = 0; ci < b.t.size() && k >= 0 && sq_->target_weight(w); ++ci)
      add(et_.complex().slice(k, w, b.t[ci]), l.t_off[ci]);
    return SparseMatrix(l.size, std::move(cols));
  }

  /// Rank of H_k(A) -> H_k(model) at weight w.
  std::size_t induced_rank(int k, int w) const {
    if (k < 0 || !sq_->target_weight(w)) return 0;
    std::size_t total = 0;
    for (const auto& blk : blocks(w, k)) {
      std::vector<SparseVec> base, extra;
      std::vector<std::size_t> off;
      std::size_t dim = 0;
      for (const auto& c : blk.t) {
        off.push_back(dim);
        auto bm = et_.complex().b_matrix(k + 1, w, c);
        for (const auto& col : bm.columns()) {
          std::vector<std::pair<uint32_t, Rational>> acc;
          for (const auto& e : col) acc.emplace_back(static_cast<uint32_t>(dim + e.index), e.value);
          base.push_back(make_sparse(std::move(acc)));
        }
        dim += et_.complex().slice(k, w, c)->size();
      }
      for (const auto& c : blk.a) {
        const std::size_t n = ea_.complex().slice(k, w, c)->size();
        if (n == 0) continue;
        std::vector<SparseVec> z;
        if (k == 0) {
          for (std::size_t j = 0; j < n; ++j) z.push_back(make_sparse({{static_cast<uint32_t>(j), Rational(1)}}));
        } else {
          z = kernel_basis(ea_.complex().b_matrix(k, w, c));
        }
        const auto& img = image(k, w, c);
        for (const auto& v : z) {
          std::vector<std::pair<uint32_t, Rational>> acc;
          for (const auto& e : v)
            for (const auto& [tc, row, coef] : img[e.index])
              acc.emplace_back(static_cast<uint32_t>(off[index_of(blk.t, tc)] + row), coef * e.value);
          extra.push_back(make_sparse(std::move(acc)));
        }
      }
      const std::size_t r0 = rank_of_vectors(base, dim);
      base.insert(base.end(), extra.begin(), extra.end());
      total += rank_of_vectors(std::move(base), dim) - r0;
    }
    return total;
  }

  SquarePtr sq_;
  EngineOptions opt_;
  HochschildEngine ea_, et_;
  mutable std::mutex m_;
  mutable std::map<ImageKey, Image> images_;
};

// ---- cdh cohomology of forms, Picard groups -----------------------------------

/// dim H^q_cdh(A, Omega^p) at weight w for curve squares: H^0 is the pullback
/// of Omega^p(Atil) and Omega^p(centre) over Omega^p(exceptional fibre), H^1
/// the cokernel of the comparison.  Centre and reduced fibre are points.
inline std::size_t cdh_omega(const ResolutionSquare& sq, int p, int q, int w) {
  if (q < 0) return 0;
  if (q >= 2) throw Error(ErrorCode::UnsupportedDimension, "cdh cohomology of forms is computed for q in {0, 1}");
  if (sq.kind == SquareKind::Quotient || sq.a->krull_dimension() > 1)
    throw Error(ErrorCode::UnsupportedDimension, "cdh cohomology of forms is computed for curve squares");
  if (sq.kind == SquareKind::Identity) return q == 0 ? omega_dims(sq.a, p, w) : 0;
  const std::size_t pt = (p == 0 && w == 0) ? 1 : 0;  // Omega^p of a point
  const std::size_t tilde = omega_dims(sq.atil, p, w);
  // restriction Omega^p(Atil)_w -> Omega^p(point)_w is onto (constants)
  const std::size_t rank = std::min<std::size_t>(pt, tilde);
  const std::size_t h0 = tilde + pt - rank;
  const std::size_t h1 = pt - rank;
  return q == 0 ? h0 : h1;
}

/// Pic(A[s_1..s_m]) for a resolution square, per s-degree j: the cokernel of
/// units (Atil/c)[s]^x / ((A/c)[s]^x * Atil[s]^x).  The positive-weight part
/// N of the finite ring Atil/c is nilpotent, log identifies 1 + N[s] with
/// N[s], and Atil[s]^x = Q^x since Atil is a connected graded domain, so each
/// s-monomial contributes sum_w dim (Atil/c)_w - rank((A/c)_w -> (Atil/c)_w).
struct PicReport {
  int m = 0, j_max = 0;
  std::size_t per_monomial = 0;       // contribution of one s-monomial
  std::vector<std::size_t> by_degree; // j -> dim of the s-degree j part
};

inline PicReport pic_conductor(const ResolutionSquare& sq, int m, int j_max) {
  using namespace cdh_detail;
  if (sq.kind != SquareKind::Resolution && sq.kind != SquareKind::Identity)
    throw Error(ErrorCode::SquareInvalid, sq.name + ": the units sequence needs a resolution square");
  PicReport r;
  r.m = m;
  r.j_max = j_max;
  if (sq.kind == SquareKind::Resolution) {
    auto smooth = jacobian_smooth(sq.atil);
    if (!smooth.domain) throw Error(ErrorCode::SquareInvalid, sq.name + ": target is not a domain");
    // both quotients are finite: walk weights until a full generator-weight run is zero
    int maxgen = 1;
    for (int wt : sq.atil->ring()->weights) maxgen = std::max(maxgen, wt);
    int zeros = 0;
    for (int w = 1; zeros < maxgen; ++w) {
      if (w > 256) throw Error(ErrorCode::SquareInvalid, sq.name + ": conductor quotient is not finite");
      auto f = weight_map(*sq.nu, w);
      auto ct = ideal_part(sq.atil, sq.conductor_atil, w);
      const std::size_t dt = sq.atil->dim(w);
      const std::size_t qt = dt - rank_of_vectors(ct, dt);
      zeros = qt == 0 ? zeros + 1 : 0;
      // image of A_w in Atil_w / c_w
      std::vector<SparseVec> cols = ct;
      const std::size_t rc = rank_of_vectors(ct, dt);
      for (const auto& col : f.columns()) cols.push_back(col);
      const std::size_t img = rank_of_vectors(std::move(cols), dt) - rc;
      r.per_monomial += qt - img;
    }
  }
  auto binom = [](int n, int k) {
    if (k < 0 || k > n) return std::size_t{0};
    std::size_t v = 1;
    for (int i = 1; i <= k; ++i) v = v * (n - k + i) / i;
    return v;
  };
  for (int j = 0; j <= j_max; ++j) {
    const std::size_t monomials = m == 0 ? (j == 0 ? 1 : 0) : binom(j + m - 1, m - 1);
    r.by_degree.push_back(monomials * r.per_monomial);
  }
  return r;
}

/// dim (A^+/A)_w with A^+ the seminormalization.  For a resolution square the
/// centre and the reduced exceptional fibre are both the vertex, so
/// A^+ = Q + rad(c Atil) = Q + Atil_{>0}.
inline std::size_t seminormal_gap(const ResolutionSquare& sq, int w) {
  if (sq.kind == SquareKind::Identity || w == 0) return 0;
  return sq.atil->dim(w) - sq.a->dim(w);
}

struct Nk0Row {
  int j = 0;
  std::size_t pic_growth = 0, formula = 0;
};

struct Nk0Report {
  bool supported = true;
  std::string reason;
  std::size_t gap = 0;  // dim A^+/A
  std::vector<Nk0Row> rows;
  bool passed() const {
    if (!supported) return false;
    return std::all_of(rows.begin(), rows.end(), [](const Nk0Row& r) { return r.pic_growth == r.formula; });
  }
};

/// Pic(A[s])/Pic(A) per s-degree against dim(A^+/A) times the degree-j part of sQ[s].
inline Nk0Report nk0_crosscheck(const ResolutionSquare& sq, int j_max, int gap_weight = 64) {
  Nk0Report r;
  if (sq.kind == SquareKind::Reduction) {
    r.supported = false;
    r.reason = "not reduced: seminormalization is not defined here";
    return r;
  }
  if (sq.kind == SquareKind::Quotient) {
    r.supported = false;
    r.reason = "the units sequence needs a finite conductor";
    return r;
  }
  auto pic1 = pic_conductor(sq, 1, j_max);
  for (int w = 1; w <= gap_weight; ++w) r.gap += seminormal_gap(sq, w);
  for (int j = 1; j <= j_max; ++j) {
    Nk0Row row;
    row.j = j;
    row.pic_growth = pic1.by_degree[j];
    row.formula = r.gap;
    r.rows.push_back(row);
  }
  return r;
}

}  // namespace khh
