#pragma once

// Hochschild and cyclic homology per (degree, weight, fine class), the Hodge
// split, the SBI rank check, the polynomial-extension Kuenneth check and the
// cusp cycle search.

#include "khh/bar_complex.hpp"
#include "khh/cache.hpp"
#include "khh/hodge.hpp"
#include "khh/parallel.hpp"

#include <array>
#include <atomic>
#include <functional>
#include <optional>
#include <set>
#include <sstream>

namespace khh {

struct EngineOptions {
  int jobs = 1;
  bool verify = true;  // check b∘b = 0 and D∘D = 0 on every slice pair built
  std::string cache_dir;
};

using ClassFilter = std::function<bool(const FineDegree&)>;

struct SbiCheck {
  int n = 0, w = 0;
  std::size_t hc_n = 0, hc_n2 = 0;
  std::size_t rank_i = 0, rank_s = 0, rank_d = 0;
  bool exact_at_hc_n() const { return hc_n == rank_i + rank_s; }
  bool exact_at_hc_n2() const { return n < 2 || hc_n2 == rank_s + rank_d; }
};

struct CycleCheck {
  bool cycle = false;
  bool nonzero = false;  // cycle and not a boundary
};

inline std::string class_str(const FineDegree& c) {
  std::string s;
  for (std::size_t k = 0; k < c.size(); ++k) s += (k ? "," : "") + std::to_string(c[k]);
  return s;
}

class HochschildEngine {
 public:
  explicit HochschildEngine(AlgebraPtr alg, Convention conv = Convention::Standard, EngineOptions opt = {})
      : alg_(std::move(alg)),
        bc_(alg_, conv),
        opt_(std::move(opt)),
        cache_(opt_.cache_dir, alg_->name(), alg_->canonical_text() + "|" + to_string(conv)) {
    init_symmetry();
  }

  const AlgebraPtr& algebra() const { return alg_; }
  const BarComplex& complex() const { return bc_; }
  Convention convention() const { return bc_.convention(); }
  const EngineOptions& options() const { return opt_; }
  std::size_t squares_checked() const { return squares_checked_.load(); }

  /// Classes with a nonempty degree-n slice at weight w, in increasing order.
  std::vector<FineDegree> classes(int n, int w) const {
    std::vector<FineDegree> out;
    for (const auto& [c, s] : *bc_.slices(n, w)) out.push_back(c);
    return out;
  }

  /// Classes meeting some summand of the total complex in degree n.
  std::vector<FineDegree> total_classes(int n, int w) const {
    std::set<FineDegree> cs;
    for (int k = n; k >= 0; k -= 2)
      for (const auto& [c, s] : *bc_.slices(k, w)) cs.insert(c);
    return {cs.begin(), cs.end()};
  }

  // ---- Hochschild homology -------------------------------------------------

  std::size_t hh_class(int n, int w, const FineDegree& c) const {
    auto s = bc_.slice(n, w, c);
    if (s->size() == 0) return 0;
    const std::string k_out = key("b", n, w, c), k_in = key("b", n + 1, w, c);
    auto r_out = cache_.get(k_out), r_in = cache_.get(k_in);
    if (!r_out || !r_in) {
      auto bo = bc_.b_matrix(n, w, c);
      auto bi = bc_.b_matrix(n + 1, w, c);
      if (opt_.verify) check_zero(bo * bi, "b∘b", n, w, c);
      if (!r_out) cache_.put(k_out, *(r_out = bo.rank()));
      if (!r_in) cache_.put(k_in, *(r_in = bi.rank()));
    }
    return s->size() - *r_out - *r_in;
  }

  std::size_t hh_dim(int n, int w, const ClassFilter& filter = {}) const {
    if (n < 0 || w < 0) return 0;
    return sum_over(filtered(classes(n, w), filter), [&](const FineDegree& c) { return hh_class(n, w, c); });
  }

  /// Cycles whose classes form a basis of the homology of one class.
  std::vector<BarChain> hh_representatives(int n, int w, const FineDegree& c) const {
    auto s = bc_.slice(n, w, c);
    std::vector<BarChain> out;
    if (s->size() == 0) return out;
    IncrementalSpan span;
    const auto bi = bc_.b_matrix(n + 1, w, c);
    for (const auto& col : bi.columns()) span.add(col);
    for (auto& z : kernel_basis(bc_.b_matrix(n, w, c)))
      if (span.add(z)) out.push_back(bc_.to_chain(z, *s, w));
    return out;
  }

  std::vector<BarChain> hh_representatives(int n, int w) const {
    std::vector<BarChain> out;
    for (const auto& c : classes(n, w))
      for (auto& r : hh_representatives(n, w, c)) out.push_back(std::move(r));
    return out;
  }

  /// Splits a homogeneous chain into its fine-class components.
  std::map<FineDegree, BarChain> split_by_class(const BarChain& ch) const {
    std::map<FineDegree, BarChain> out;
    if (ch.is_zero()) return out;
    auto T = alg_->tables(ch.weight());
    for (const auto& [t, k] : ch.terms()) {
      auto c = bc_.class_of(t.data(), ch.degree(), *T);
      auto it = out.try_emplace(c, alg_, ch.degree(), ch.weight()).first;
      it->second.add(t, k);
    }
    return out;
  }

  bool is_boundary(const BarChain& ch) const {
    for (const auto& [c, comp] : split_by_class(ch)) {
      const int n = comp.degree(), w = comp.weight();
      auto s = bc_.slice(n, w, c);
      auto bi = bc_.b_matrix(n + 1, w, c);
      std::vector<SparseVec> cols = bi.columns();
      cols.push_back(bc_.to_vector(comp, *s));
      if (rank_of_vectors(std::move(cols), s->size()) != bi.rank()) return false;
    }
    return true;
  }

  CycleCheck check_cycle(const BarChain& ch) const {
    CycleCheck r;
    r.cycle = bc_.b(ch).is_zero();
    r.nonzero = r.cycle && !is_boundary(ch);
    return r;
  }

  // ---- cyclic homology -----------------------------------------------------

  /// Degrees of the summands of Tot_n: n, n-2, ..., >= 0.
  static std::vector<int> total_degrees(int n) {
    std::vector<int> d;
    for (int k = n; k >= 0; k -= 2) d.push_back(k);
    return d;
  }

  std::size_t total_size(int n, int w, const FineDegree& c) const {
    std::size_t s = 0;
    for (int k : total_degrees(n)) s += bc_.slice(k, w, c)->size();
    return s;
  }

  /// D = b + B from Tot_n to Tot_{n-1}, summands ordered by decreasing degree.
  SparseMatrix total_matrix(int n, int w, const FineDegree& c) const {
    auto src = total_degrees(n), dst = total_degrees(n - 1);
    std::vector<std::size_t> dst_off(dst.size() + 1, 0);
    for (std::size_t q = 0; q < dst.size(); ++q) dst_off[q + 1] = dst_off[q] + bc_.slice(dst[q], w, c)->size();
    std::vector<SparseVec> cols;
    cols.reserve(total_size(n, w, c));
    for (std::size_t p = 0; p < src.size(); ++p) {
      const int k = src[p];
      const std::size_t m = bc_.slice(k, w, c)->size();
      if (m == 0) continue;
      auto bk = bc_.b_matrix(k, w, c);
      std::optional<SparseMatrix> Bk;
      if (p >= 1) Bk = bc_.B_matrix(k, w, c);
      for (std::size_t j = 0; j < m; ++j) {
        SparseVec col;
        if (Bk)
          for (const auto& e : Bk->column(j)) col.push_back({static_cast<uint32_t>(e.index + dst_off[p - 1]), e.value});
        if (k >= 1)
          for (const auto& e : bk.column(j)) col.push_back({static_cast<uint32_t>(e.index + dst_off[p]), e.value});
        cols.push_back(std::move(col));
      }
    }
    return SparseMatrix(dst_off.back(), std::move(cols));
  }

  std::size_t hc_class(int n, int w, const FineDegree& c) const {
    const std::size_t dim = total_size(n, w, c);
    if (dim == 0) return 0;
    const std::string k_out = key("D", n, w, c), k_in = key("D", n + 1, w, c);
    auto r_out = cache_.get(k_out), r_in = cache_.get(k_in);
    if (!r_out || !r_in) {
      auto Do = total_matrix(n, w, c);
      auto Di = total_matrix(n + 1, w, c);
      if (opt_.verify) check_zero(Do * Di, "D∘D", n, w, c);
      if (!r_out) cache_.put(k_out, *(r_out = Do.rank()));
      if (!r_in) cache_.put(k_in, *(r_in = Di.rank()));
    }
    return dim - *r_out - *r_in;
  }

  std::size_t hc_dim(int n, int w, const ClassFilter& filter = {}) const {
    if (n < 0 || w < 0) return 0;
    return sum_over(filtered(total_classes(n, w), filter), [&](const FineDegree& c) { return hc_class(n, w, c); });
  }

  /// Ranks of I: HH_n -> HC_n, S: HC_n -> HC_{n-2} and the connecting map
  /// HC_{n-2} -> HH_{n-1}, induced from the total complex.
  SbiCheck sbi_check(int n, int w) const {
    SbiCheck r;
    r.n = n;
    r.w = w;
    r.hc_n = hc_dim(n, w);
    r.hc_n2 = hc_dim(n - 2, w);
    for (const auto& c : total_classes(n, w)) {
      const std::size_t top = bc_.slice(n, w, c)->size();
      // I
      if (top > 0) {
        auto cyc = kernel_basis(bc_.b_matrix(n, w, c));
        r.rank_i += span_increase(total_matrix(n + 1, w, c), cyc, total_size(n, w, c));
      }
      if (n < 2) continue;
      // S
      {
        std::vector<SparseVec> img;
        for (const auto& z : kernel_basis(total_matrix(n, w, c))) {
          SparseVec v;
          for (const auto& e : z)
            if (e.index >= top) v.push_back({static_cast<uint32_t>(e.index - top), e.value});
          img.push_back(std::move(v));
        }
        r.rank_s += span_increase(total_matrix(n - 1, w, c), img, total_size(n - 2, w, c));
      }
      // connecting map: B on the top summand of Tot_{n-2}
      {
        const std::size_t m = bc_.slice(n - 2, w, c)->size();
        auto B = bc_.B_matrix(n - 2, w, c);
        std::vector<SparseVec> img;
        for (const auto& z : kernel_basis(total_matrix(n - 2, w, c))) {
          SparseVec top_part;
          for (const auto& e : z)
            if (e.index < m) top_part.push_back(e);
          img.push_back(B.apply(top_part));
        }
        r.rank_d += span_increase(bc_.b_matrix(n, w, c), img, bc_.slice(n - 1, w, c)->size());
      }
    }
    return r;
  }

  // ---- Hodge split -----------------------------------------------------------

  /// dim HH_n^{(i)} at one class for i = 0..n via one route.
  std::vector<std::size_t> hodge_class(int n, int w, const FineDegree& c, HodgeRoute route) const {
    std::vector<std::size_t> out(n + 1, 0);
    auto sn = bc_.slice(n, w, c);
    if (sn->size() == 0) return out;
    const char* tag = route == HodgeRoute::Idempotent ? "hE" : "hA";
    bool all = true;
    for (int i = 0; i <= n; ++i) {
      auto v = cache_.get(key(tag + std::to_string(i), n, w, c));
      if (!v) {
        all = false;
        break;
      }
      out[i] = *v;
    }
    if (all) return out;
    auto sn1 = bc_.slice(n + 1, w, c);
    auto bases_n = hodge_bases(*sn, route);
    std::vector<std::vector<SparseVec>> bases_n1(n + 2);
    if (sn1->size() > 0) bases_n1 = hodge_bases(*sn1, route);
    check_complete(bases_n, sn->size(), n, w, c, route);
    check_complete(bases_n1, sn1->size(), n + 1, w, c, route);
    auto bn = bc_.b_matrix(n, w, c), bn1 = bc_.b_matrix(n + 1, w, c);
    for (int i = 0; i <= n; ++i) {
      SparseMatrix S(sn->size(), bases_n[i]);
      SparseMatrix S1(sn1->size(), bases_n1[i]);
      out[i] = subcomplex_homology_dim(S, S1, bn, bn1);
      cache_.put(key(tag + std::to_string(i), n, w, c), out[i]);
    }
    return out;
  }

  std::vector<std::size_t> hodge_dims(int n, int w, HodgeRoute route, const ClassFilter& filter = {}) const {
    std::vector<std::size_t> out(std::max(n, 0) + 1, 0);
    auto cs = filtered(classes(n, w), filter);
    std::vector<std::vector<std::size_t>> parts(cs.size());
    parallel_for(cs.size(), opt_.jobs, [&](std::size_t k) { parts[k] = hodge_class(n, w, cs[k], route); });
    for (const auto& p : parts)
      for (std::size_t i = 0; i < p.size(); ++i) out[i] += p[i];
    return out;
  }

  /// dim HH_n^{(i)}, i = 0..n, computed along both routes; throws
  /// ORACLE_DISAGREEMENT if they differ and SANITY_FAIL if the pieces do not
  /// add up to HH_n.
  std::vector<std::size_t> hodge_split(int n, int w, const ClassFilter& filter = {}) const {
    auto e = hodge_dims(n, w, HodgeRoute::Idempotent, filter);
    auto a = hodge_dims(n, w, HodgeRoute::Adams, filter);
    if (e != a)
      throw Error(ErrorCode::OracleDisagreement, "Hodge dims at n=" + std::to_string(n) + " w=" + std::to_string(w) +
                                                     ": idempotents " + join(e) + " vs Adams " + join(a));
    std::size_t total = 0;
    for (auto v : e) total += v;
    const std::size_t hh = hh_dim(n, w, filter);
    if (total != hh)
      throw Error(ErrorCode::SanityFail, "Hodge pieces at n=" + std::to_string(n) + " w=" + std::to_string(w) +
                                             " add to " + std::to_string(total) + ", HH has " + std::to_string(hh));
    return e;
  }

  // ---- structural checks -----------------------------------------------------

  /// Verifies b∘b, B∘B and bB + Bb on C_n at (w, c); returns false on the
  /// first failing identity and names it in `failed`.
  bool verify_slice(int n, int w, const FineDegree& c, std::string* failed = nullptr) const {
    auto bn = bc_.b_matrix(n, w, c), bn1 = bc_.b_matrix(n + 1, w, c);
    auto Bn = bc_.B_matrix(n, w, c), Bn1 = bc_.B_matrix(n + 1, w, c);
    auto fail = [&](const char* what) {
      if (failed) *failed = std::string(what) + " at n=" + std::to_string(n) + " w=" + std::to_string(w) +
                            " class " + class_str(c);
      return false;
    };
    if (!(bn * bn1).is_zero()) return fail("b∘b");
    if (!(Bn1 * Bn).is_zero()) return fail("B∘B");
    SparseMatrix mixed = bn1 * Bn;
    if (n >= 1) mixed = mixed + bc_.B_matrix(n - 1, w, c) * bn;
    if (!mixed.is_zero()) return fail("bB+Bb");
    return true;
  }

 private:
  template <class F>
  std::size_t sum_over(const std::vector<FineDegree>& cs, F&& f) const {
    std::vector<std::size_t> parts(cs.size(), 0);
    parallel_for(cs.size(), opt_.jobs, [&](std::size_t k) { parts[k] = f(cs[k]); });
    std::size_t s = 0;
    for (auto v : parts) s += v;
    return s;
  }

  static std::vector<FineDegree> filtered(std::vector<FineDegree> cs, const ClassFilter& f) {
    if (!f) return cs;
    std::vector<FineDegree> out;
    for (auto& c : cs)
      if (f(c)) out.push_back(std::move(c));
    return out;
  }

  static std::string join(const std::vector<std::size_t>& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s + "]";
  }

  /// rank([base | extra]) - rank(base)
  static std::size_t span_increase(const SparseMatrix& base, const std::vector<SparseVec>& extra, std::size_t dim) {
    std::vector<SparseVec> cols = base.columns();
    for (const auto& v : extra) cols.push_back(v);
    return rank_of_vectors(std::move(cols), dim) - base.rank();
  }

  void check_zero(const SparseMatrix& m, const char* what, int n, int w, const FineDegree& c) const {
    ++squares_checked_;
    if (!m.is_zero())
      throw Error(ErrorCode::SanityFail, std::string(what) + " != 0 at n=" + std::to_string(n) + " w=" +
                                             std::to_string(w) + " class " + class_str(c) + " (" +
                                             to_string(bc_.convention()) + ")");
  }

  static void check_complete(const std::vector<std::vector<SparseVec>>& bases, std::size_t dim, int n, int w,
                             const FineDegree& c, HodgeRoute route) {
    std::size_t total = 0;
    for (const auto& b : bases) total += b.size();
    if (total != dim)
      throw Error(ErrorCode::IdempotentSanityFail,
                  std::string(route == HodgeRoute::Idempotent ? "idempotent images" : "Adams eigenspaces") +
                      " span " + std::to_string(total) + " of " + std::to_string(dim) + " at n=" + std::to_string(n) +
                      " w=" + std::to_string(w) + " class " + class_str(c));
  }

  // For free algebras whose fine grading is the multidegree, permuting
  // generators of equal weight is an automorphism, so ranks depend only on
  // the class up to sorting within each equal-weight group.
  void init_symmetry() {
    if (!alg_->is_free() || alg_->fine_rank() != alg_->nvars()) return;
    const auto& fg = alg_->fine_grading();
    for (std::size_t i = 0; i < fg.size(); ++i)
      for (std::size_t k = 0; k < fg[i].size(); ++k)
        if (fg[i][k] != (i == k ? 1 : 0)) return;
    std::map<int, std::vector<std::size_t>> by_weight;
    for (std::size_t i = 0; i < alg_->nvars(); ++i) by_weight[alg_->ring()->weights[i]].push_back(i);
    for (auto& [wt, g] : by_weight)
      if (g.size() > 1) groups_.push_back(g);
  }

  FineDegree canonical(const FineDegree& c) const {
    FineDegree r = c;
    for (const auto& g : groups_) {
      std::vector<int64_t> v;
      for (auto i : g) v.push_back(r[i]);
      std::sort(v.begin(), v.end());
      for (std::size_t k = 0; k < g.size(); ++k) r[g[k]] = v[k];
    }
    return r;
  }

  std::string key(const std::string& kind, int n, int w, const FineDegree& c) const {
    return kind + " " + std::to_string(n) + " " + std::to_string(w) + " " + class_str(canonical(c));
  }

  AlgebraPtr alg_;
  BarComplex bc_;
  EngineOptions opt_;
  mutable RankCache cache_;
  std::vector<std::vector<std::size_t>> groups_;
  mutable std::atomic<std::size_t> squares_checked_{0};
};

// ---- Kuenneth check for A -> A[t] ---------------------------------------------

struct KunnethCell {
  std::string table;  // "HH" or "HC"
  int n = 0, w = 0, j = 0;
  long long lhs = -1, rhs = -1;
  std::string error;
  bool ok() const { return error.empty() && lhs == rhs; }
};

struct KunnethReport {
  std::string algebra;
  int n_max = 0, w_max = 0, t_cutoff = 0;
  Convention convention = Convention::Standard;
  std::vector<KunnethCell> cells;
  bool passed() const {
    for (const auto& c : cells)
      if (!c.ok()) return false;
    return true;
  }
  std::vector<KunnethCell> failures() const {
    std::vector<KunnethCell> out;
    for (const auto& c : cells)
      if (!c.ok()) out.push_back(c);
    return out;
  }
};

/// A with a fresh weight-1 generator; returns the algebra and the index of
/// the new generator.
inline std::pair<AlgebraPtr, std::size_t> adjoin_variable(const GradedAlgebra& a) {
  std::string t = "t";
  for (int k = 1; a.ring()->index_of(t) >= 0; ++k) t = "t" + std::to_string(k);
  std::ostringstream os;
  os << "algebra " << a.name() << "_" << t << "\nvars";
  for (std::size_t i = 0; i < a.nvars(); ++i) os << " " << a.ring()->symbols[i] << ":" << a.ring()->weights[i];
  os << " " << t << ":1\n";
  for (const auto& r : a.relations()) os << "rel " << r.str() << "\n";
  return {GradedAlgebra::build(os.str()), a.nvars()};
}

/// Linear functional on fine degrees returning the exponent of generator g.
inline std::vector<Rational> exponent_functional(const GradedAlgebra& a, std::size_t g) {
  const std::size_t r = a.fine_rank(), n = a.nvars();
  // unknowns phi_0..phi_{r-1}, s; equations sum_k phi_k fine[i][k] - s*delta_{ig} = 0
  std::vector<SparseVec> cols;
  for (std::size_t k = 0; k < r; ++k) {
    std::vector<std::pair<uint32_t, Rational>> t;
    for (std::size_t i = 0; i < n; ++i)
      if (a.fine_grading()[i][k] != 0) t.emplace_back(static_cast<uint32_t>(i), Rational(static_cast<long long>(a.fine_grading()[i][k])));
    cols.push_back(make_sparse(std::move(t)));
  }
  cols.push_back(SparseVec{{static_cast<uint32_t>(g), Rational(-1)}});
  for (const auto& v : kernel_basis(SparseMatrix(n, std::move(cols)))) {
    const SparseEntry* s = linalg_detail::find(v, static_cast<uint32_t>(r));
    if (!s) continue;
    std::vector<Rational> phi(r);
    for (const auto& e : v)
      if (e.index < r) phi[e.index] = e.value / s->value;
    return phi;
  }
  throw Error(ErrorCode::Precondition, "generator exponent is not a function of the fine degree");
}

inline int64_t evaluate_functional(const std::vector<Rational>& phi, const FineDegree& c) {
  Rational s;
  for (std::size_t k = 0; k < phi.size(); ++k) s += phi[k] * Rational(static_cast<long long>(c[k]));
  if (!s.is_integer()) throw Error(ErrorCode::SanityFail, "non-integral exponent functional");
  return std::stoll(s.str());
}

/// Compares HH and HC of A[t] with the Kuenneth predictions from A for all
/// n <= n_max, w <= w_max, j <= t_cutoff.  Errors are captured per cell.
inline KunnethReport verify_kunneth(const AlgebraPtr& a, int t_cutoff, int n_max, int w_max,
                                    Convention conv = Convention::Standard, EngineOptions opt = {}) {
  KunnethReport rep;
  rep.algebra = a->name();
  rep.n_max = n_max;
  rep.w_max = w_max;
  rep.t_cutoff = t_cutoff;
  rep.convention = conv;
  auto [at, tg] = adjoin_variable(*a);
  HochschildEngine ea(a, conv, opt), et(at, conv, opt);
  std::vector<Rational> phi;
  std::string phi_error;
  try {
    phi = exponent_functional(*at, tg);
  } catch (const Error& e) {
    phi_error = e.what();
  }
  auto t_degree = [&](int j) { return [&phi, j](const FineDegree& c) { return evaluate_functional(phi, c) == j; }; };
  auto guarded = [](KunnethCell& cell, const std::function<void()>& f) {
    try {
      f();
    } catch (const std::exception& e) {
      cell.error = e.what();
    }
  };
  for (const char* table : {"HH", "HC"})
    for (int n = 0; n <= n_max; ++n)
      for (int w = 0; w <= w_max; ++w)
        for (int j = 0; j <= t_cutoff; ++j) {
          KunnethCell cell;
          cell.table = table;
          cell.n = n;
          cell.w = w;
          cell.j = j;
          if (!phi_error.empty()) {
            cell.error = phi_error;
            rep.cells.push_back(cell);
            continue;
          }
          const bool hh = std::string(table) == "HH";
          guarded(cell, [&] {
            cell.rhs = hh ? static_cast<long long>(ea.hh_dim(n, w) + (j >= 1 ? ea.hh_dim(n - 1, w) : 0))
                          : static_cast<long long>(j == 0 ? ea.hc_dim(n, w) : ea.hh_dim(n, w));
          });
          if (cell.error.empty())
            guarded(cell, [&] {
              cell.lhs = static_cast<long long>(hh ? et.hh_dim(n, w + j, t_degree(j)) : et.hc_dim(n, w + j, t_degree(j)));
            });
          rep.cells.push_back(cell);
        }
  return rep;
}

// ---- cusp cycles -------------------------------------------------------------

struct CuspAttempt {
  Convention convention = Convention::Standard;
  std::array<int, 3> signs{};  // on [y|y], x[x|x], [x^2|x]
  std::string w;
  std::string bw;            // b(w)
  int bw_vs_tz = 0;          // +1 if b(w) = tz, -1 if b(w) = -tz, 0 otherwise
  std::vector<CycleCheck> products;  // z w^{i-1} for i = 2..i_max
  bool success() const {
    for (const auto& p : products)
      if (!p.nonzero) return false;
    return true;
  }
};

struct CuspSlice {
  int i = 0, degree = 0, weight = 0;
  std::size_t dim = 0;
  std::string representative;  // a nonzero class from the kernel basis, if any
};

struct CuspCycleReport {
  int i_max = 1;
  std::string z, tz;
  CycleCheck z_check, tz_check;
  std::vector<CuspAttempt> attempts;
  std::optional<CuspAttempt> found;
  std::vector<CuspSlice> slices;
  bool no_convention_found() const { return !found.has_value(); }
};

/// Searches the sign orbit of w = [y|y] - x[x|x] - [x^2|x] under both bar
/// conventions for a chain w* with z (w*)^{i-1} a nonzero cycle for all
/// 2 <= i <= i_max.  The algebra must present the cusp with generators x, y.
inline CuspCycleReport verify_cusp_cycles(const AlgebraPtr& cusp, int i_max, EngineOptions opt = {}) {
  if (i_max < 1) throw Error(ErrorCode::Precondition, "i_max must be >= 1");
  const auto& ring = *cusp->ring();
  const int xi = ring.index_of("x"), yi = ring.index_of("y");
  if (xi < 0 || yi < 0 || ring.weights[xi] != 2 || ring.weights[yi] != 3 ||
      !(cusp->multiply(cusp->generator(yi), cusp->generator(yi)) == cusp->parse("x^3")))
    throw Error(ErrorCode::Precondition, "expected the cusp with x:2, y:3 and y^2 = x^3");
  CuspCycleReport rep;
  rep.i_max = i_max;
  HochschildEngine std_engine(cusp, Convention::Standard, opt);
  auto z = parse_chain(cusp, "2x[y] + 3y[x]");
  auto tz = parse_chain(cusp, "2y[y] + 3x^2[x]");
  rep.z = z.str();
  rep.tz = tz.str();
  rep.z_check = std_engine.check_cycle(z);
  rep.tz_check = std_engine.check_cycle(tz);
  const char* terms[3] = {"[y|y]", "x[x|x]", "[x^2|x]"};
  for (Convention conv : {Convention::Standard, Convention::Transpose}) {
    HochschildEngine eng(cusp, conv, opt);
    const auto& bc = eng.complex();
    for (int mask = 0; mask < 8; ++mask) {
      CuspAttempt at;
      at.convention = conv;
      BarChain w(cusp, 2, 6);
      for (int k = 0; k < 3; ++k) {
        at.signs[k] = (mask >> k) & 1 ? -1 : 1;
        w = w + parse_chain(cusp, terms[k]).scaled(Rational(at.signs[k]));
      }
      at.w = w.str();
      auto bw = bc.b(w);
      at.bw = bw.str();
      at.bw_vs_tz = bw == tz ? 1 : (bw == tz.scaled(Rational(-1)) ? -1 : 0);
      BarChain p = z;
      for (int i = 2; i <= i_max; ++i) {
        p = bc.shuffle(p, w);
        at.products.push_back(eng.check_cycle(p));
      }
      if (!rep.found && at.success()) rep.found = at;
      rep.attempts.push_back(std::move(at));
    }
  }
  for (int i = 1; i <= i_max; ++i) {
    CuspSlice s;
    s.i = i;
    s.degree = 2 * i - 1;
    s.weight = 5 + 6 * (i - 1);
    s.dim = std_engine.hh_dim(s.degree, s.weight);
    auto reps = std_engine.hh_representatives(s.degree, s.weight);
    if (!reps.empty()) s.representative = reps.front().str();
    rep.slices.push_back(std::move(s));
  }
  return rep;
}

}  // namespace khh
