#pragma once

// Finitely presented connected graded commutative Q-algebras.
//
// Normal forms come from a Groebner basis completed weight by weight: the
// basis is only ever completed through the largest weight anybody asked
// for, which is enough for every normal form of that weight or less.

#include "khh/error.hpp"
#include "khh/linalg.hpp"
#include "khh/polynomial.hpp"
#include "khh/text_format.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

namespace khh {

using FineDegree = std::vector<int64_t>;

/// Immutable snapshot of the standard-monomial bases through some weight,
/// with multiplication of basis monomials tabulated for every pair whose
/// weights sum to at most `max_weight`.
struct MonomialTables {
  int max_weight = -1;
  std::vector<Monomial> monomials;           // by id, grouped by weight
  std::vector<int> weight;                   // by id
  std::vector<uint32_t> weight_offset;       // ids of weight w: [offset[w], offset[w+1])
  std::vector<FineDegree> fine;              // by id
  std::map<Monomial, uint32_t> index;

  struct Term {
    uint32_t id;
    Rational coeff;
  };
  // products[a] covers b in [0, weight_offset[max_weight - weight[a] + 1])
  std::vector<std::vector<std::pair<uint32_t, uint32_t>>> product_span;  // (start, count) into product_terms
  std::vector<Term> product_terms;

  std::size_t count(int w) const {
    if (w < 0 || w > max_weight) return 0;
    return weight_offset[w + 1] - weight_offset[w];
  }
  uint32_t first(int w) const { return weight_offset[w]; }
  uint32_t one() const { return 0; }

  /// Normal form of the product of two basis monomials, as (id, coeff) terms.
  std::pair<const Term*, const Term*> product(uint32_t a, uint32_t b) const {
    const auto& row = product_span[a];
    if (b >= row.size()) throw Error(ErrorCode::Precondition, "MonomialTables: product beyond tabulated weight");
    auto [s, c] = row[b];
    return {product_terms.data() + s, product_terms.data() + s + c};
  }

  uint32_t id_of(const Monomial& m) const {
    auto it = index.find(m);
    if (it == index.end()) throw Error(ErrorCode::Precondition, "MonomialTables: not a standard monomial");
    return it->second;
  }
};

struct WeightBasis {
  int weight = 0;
  std::vector<Monomial> monomials;
};

class GradedAlgebra {
 public:
  GradedAlgebra(std::string name, std::vector<std::string> symbols, std::vector<int> weights,
                std::vector<std::string> relation_texts)
      : name_(std::move(name)) {
    for (std::size_t i = 0; i < weights.size(); ++i)
      if (weights[i] <= 0)
        throw Error(ErrorCode::ZeroWeightGenerator,
                    "generator '" + symbols[i] + "' has non-positive weight " + std::to_string(weights[i]));
    auto ring = std::make_shared<PolyRing>();
    ring->symbols = std::move(symbols);
    ring->weights = std::move(weights);
    ring_ = ring;
    for (const auto& t : relation_texts) add_relation(parse_polynomial(ring_, t), t);
    init();
  }

  /// Parses the plain-text presentation (see README for the grammar).
  static std::shared_ptr<const GradedAlgebra> build(std::string_view text) {
    auto stmts = split_statements(text);
    return from_statements(stmts, 0, stmts.size());
  }

  /// Builds from statements [begin, end): one `algebra` block.
  static std::shared_ptr<const GradedAlgebra> from_statements(const std::vector<Statement>& stmts, std::size_t begin,
                                                              std::size_t end) {
    std::string name = "A";
    std::vector<std::string> syms;
    std::vector<int> weights;
    bool have_vars = false;
    struct Rel {
      std::string text;
      int line, offset;
    };
    std::vector<Rel> rels;
    for (std::size_t k = begin; k < end; ++k) {
      const Statement& s = stmts[k];
      if (s.keyword == "algebra") {
        auto w = split_words(s);
        if (w.size() != 1) throw ParseError("expected 'algebra <name>'", s.line, s.keyword_column);
        name = w[0].first;
      } else if (s.keyword == "vars") {
        have_vars = true;
        for (const auto& [word, col] : split_words(s)) {
          auto colon = word.find(':');
          if (colon == std::string::npos || colon == 0 || colon + 1 == word.size())
            throw ParseError("expected '<symbol>:<weight>'", s.line, col + 1);
          std::string sym = word.substr(0, colon);
          if (!(std::isalpha(static_cast<unsigned char>(sym[0])) || sym[0] == '_'))
            throw ParseError("bad generator symbol '" + sym + "'", s.line, col + 1);
          int wt = 0;
          try {
            std::size_t used = 0;
            wt = std::stoi(word.substr(colon + 1), &used);
            if (used != word.size() - colon - 1) throw std::invalid_argument("trailing");
          } catch (const std::exception&) {
            throw ParseError("bad weight in '" + word + "'", s.line, col + static_cast<int>(colon) + 2);
          }
          if (std::find(syms.begin(), syms.end(), sym) != syms.end())
            throw ParseError("duplicate generator '" + sym + "'", s.line, col + 1);
          syms.push_back(sym);
          weights.push_back(wt);
        }
      } else if (s.keyword == "rel") {
        rels.push_back({s.rest, s.line, s.rest_offset});
      } else if (s.keyword == "rels:" || s.keyword == "rels") {
        // optional comma-separated list on the same statement
        std::string r = s.rest;
        std::size_t st = 0;
        while (st < r.size()) {
          std::size_t comma = r.find(',', st);
          if (comma == std::string::npos) comma = r.size();
          std::string piece = r.substr(st, comma - st);
          if (piece.find_first_not_of(" \t") != std::string::npos)
            rels.push_back({piece, s.line, s.rest_offset + static_cast<int>(st)});
          st = comma + 1;
        }
      } else {
        throw ParseError("unknown statement '" + s.keyword + "'", s.line, s.keyword_column);
      }
    }
    if (!have_vars) {
      int line = begin < end ? stmts[begin].line : 1;
      throw ParseError("missing 'vars' statement", line, 1);
    }
    for (std::size_t i = 0; i < weights.size(); ++i)
      if (weights[i] <= 0)
        throw Error(ErrorCode::ZeroWeightGenerator,
                    "generator '" + syms[i] + "' has non-positive weight " + std::to_string(weights[i]));
    auto ring = std::make_shared<PolyRing>();
    ring->symbols = syms;
    ring->weights = weights;
    std::shared_ptr<const PolyRing> cring = ring;
    std::vector<std::pair<Polynomial, std::string>> parsed;
    for (const auto& r : rels) parsed.emplace_back(parse_polynomial(cring, r.text, r.line, r.offset), r.text);
    auto alg = std::shared_ptr<GradedAlgebra>(new GradedAlgebra(std::move(name), cring));
    for (auto& [p, t] : parsed) alg->add_relation(std::move(p), t);
    alg->init();
    return alg;
  }

  const std::string& name() const { return name_; }
  const std::shared_ptr<const PolyRing>& ring() const { return ring_; }
  std::size_t nvars() const { return ring_->nvars(); }
  const std::vector<Polynomial>& relations() const { return relations_; }
  bool is_free() const { return relations_.empty(); }

  /// Canonical presentation text; equal algebras produce equal strings.
  std::string canonical_text() const {
    std::ostringstream os;
    os << "algebra " << name_ << "\nvars";
    for (std::size_t i = 0; i < nvars(); ++i) os << " " << ring_->symbols[i] << ":" << ring_->weights[i];
    os << "\n";
    for (const auto& r : relations_) os << "rel " << r.str() << "\n";
    return os.str();
  }

  Polynomial zero() const { return Polynomial(ring_); }
  Polynomial one() const { return Polynomial::constant(ring_, Rational(1)); }
  Polynomial generator(std::size_t i) const { return Polynomial::generator(ring_, i); }
  Polynomial parse(std::string_view text) const { return parse_polynomial(ring_, text); }

  Polynomial normal_form(const Polynomial& p) const {
    int wmax = 0;
    for (const auto& [m, c] : p.terms()) wmax = std::max(wmax, ring_->weight(m));
    std::lock_guard<std::mutex> lk(gb_mutex_);
    complete_locked(wmax);
    return reduce_locked(p);
  }

  Polynomial multiply(const Polynomial& p, const Polynomial& q) const { return normal_form(p * q); }

  /// Reduced Groebner basis elements of weight <= w.
  std::vector<Polynomial> groebner_basis(int w) const {
    std::lock_guard<std::mutex> lk(gb_mutex_);
    complete_locked(w);
    return reduced_locked(w);
  }

  /// Fully completed reduced Groebner basis (terminates for homogeneous ideals).
  std::vector<Polynomial> full_groebner_basis() const {
    std::lock_guard<std::mutex> lk(gb_mutex_);
    while (!pairs_.empty() || next_rel_ < pending_.size()) {
      int next = INT32_MAX;
      if (!pairs_.empty()) next = pairs_.begin()->first;
      if (next_rel_ < pending_.size()) next = std::min(next, ring_->weight(pending_[next_rel_].leading_monomial()));
      complete_locked(std::max(next, completed_));
    }
    return reduced_locked(INT32_MAX);
  }

  WeightBasis weight_basis(int w) const {
    WeightBasis b;
    b.weight = w;
    if (w < 0) return b;
    auto t = tables(w);
    for (uint32_t id = t->first(w); id < t->first(w) + t->count(w); ++id) b.monomials.push_back(t->monomials[id]);
    return b;
  }

  std::size_t dim(int w) const { return w < 0 ? 0 : tables(w)->count(w); }

  /// Snapshot of the tables through at least weight w.
  std::shared_ptr<const MonomialTables> tables(int w) const {
    std::lock_guard<std::mutex> lk(table_mutex_);
    if (tables_ && tables_->max_weight >= w) return tables_;
    int target = std::max(w, tables_ ? tables_->max_weight : 0);
    tables_ = build_tables(target);
    return tables_;
  }

  /// Per-generator fine degrees spanning all gradings for which every
  /// relation is homogeneous; the bar complex splits along them.
  const std::vector<FineDegree>& fine_grading() const { return fine_gen_; }
  FineDegree fine_degree(const Monomial& m) const {
    FineDegree d(fine_rank_, 0);
    for (std::size_t i = 0; i < m.size(); ++i)
      for (std::size_t k = 0; k < fine_rank_; ++k) d[k] += static_cast<int64_t>(m[i]) * fine_gen_[i][k];
    return d;
  }
  std::size_t fine_rank() const { return fine_rank_; }

  /// True if `functional` (one integer per generator) is constant on the
  /// terms of every relation, i.e. defines a grading.
  bool is_grading(const std::vector<int>& functional) const {
    for (const auto& r : relations_) {
      bool first = true;
      long long v0 = 0;
      for (const auto& [m, c] : r.terms()) {
        long long v = 0;
        for (std::size_t i = 0; i < m.size(); ++i) v += static_cast<long long>(m[i]) * functional[i];
        if (first) v0 = v, first = false;
        else if (v != v0) return false;
      }
    }
    return true;
  }

  /// Krull dimension via the leading-monomial ideal of the full Groebner basis.
  int krull_dimension() const {
    auto gb = full_groebner_basis();
    const std::size_t n = nvars();
    int best = 0;
    for (uint32_t mask = 0; mask < (1u << n); ++mask) {
      bool ok = true;
      for (const auto& g : gb) {
        const Monomial& lm = g.leading_monomial();
        bool inside = true;
        for (std::size_t i = 0; i < n; ++i)
          if (lm[i] > 0 && !(mask & (1u << i))) inside = false;
        if (inside) {
          ok = false;
          break;
        }
      }
      if (ok) best = std::max(best, __builtin_popcount(mask));
    }
    return best;
  }

 private:
  GradedAlgebra(std::string name, std::shared_ptr<const PolyRing> ring) : name_(std::move(name)), ring_(std::move(ring)) {}

  void add_relation(Polynomial p, const std::string& text) {
    if (p.is_zero()) return;
    int w = p.homogeneous_weight();
    if (w < 0) {
      std::ostringstream os;
      os << "relation '" << text << "' is not homogeneous; term weights:";
      for (const auto& [m, c] : p.terms()) os << " " << ring_->weight(m);
      throw Error(ErrorCode::InhomogeneousRelation, os.str());
    }
    if (w == 0) throw Error(ErrorCode::Precondition, "relation '" + text + "' is a nonzero constant");
    relations_.push_back(std::move(p));
  }

  void init() {
    pending_ = relations_;
    std::stable_sort(pending_.begin(), pending_.end(), [this](const Polynomial& a, const Polynomial& b) {
      return ring_->weight(a.leading_monomial()) < ring_->weight(b.leading_monomial());
    });
    compute_fine_grading();
  }

  void compute_fine_grading() {
    const std::size_t n = nvars();
    std::vector<SparseVec> rows;
    for (const auto& r : relations_) {
      const Monomial& m0 = r.terms().begin()->first;
      for (const auto& [m, c] : r.terms()) {
        std::vector<std::pair<uint32_t, Rational>> t;
        for (std::size_t i = 0; i < n; ++i)
          if (m[i] != m0[i]) t.emplace_back(static_cast<uint32_t>(i), Rational(m[i] - m0[i]));
        if (!t.empty()) rows.push_back(make_sparse(std::move(t)));
      }
    }
    SparseMatrix m = SparseMatrix(n, std::move(rows)).transpose();  // rows: constraints, cols: generators
    auto ker = kernel_basis(m);
    fine_rank_ = ker.size();
    fine_gen_.assign(n, FineDegree(fine_rank_, 0));
    for (std::size_t k = 0; k < ker.size(); ++k) {
      mpz_class l = 1;
      for (const auto& e : ker[k]) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), e.value.denominator().get_mpz_t());
      mpz_class g = 0;
      std::vector<mpz_class> ints(n, 0);
      for (const auto& e : ker[k]) {
        mpq_class v = e.value.to_mpq() * l;
        ints[e.index] = v.get_num();
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), ints[e.index].get_mpz_t());
      }
      for (std::size_t i = 0; i < n; ++i) fine_gen_[i][k] = (g == 0 ? ints[i] : mpz_class(ints[i] / g)).get_si();
    }
  }

  Polynomial reduce_locked(const Polynomial& p) const {
    Polynomial work = p;
    Polynomial result(ring_);
    while (!work.is_zero()) {
      Monomial m = work.leading_monomial();
      Rational c = work.leading_coefficient();
      const Polynomial* red = nullptr;
      for (const auto& g : gb_)
        if (divides(g.leading_monomial(), m)) {
          red = &g;
          break;
        }
      if (red) {
        work = work - red->scaled(c, mono_div(m, red->leading_monomial()));
      } else {
        result.add_term(m, c);
        work = work - Polynomial::monomial(ring_, m, c);
      }
    }
    return result;
  }

  void add_to_basis_locked(Polynomial g) {
    Rational inv = Rational(1) / g.leading_coefficient();
    g = g.scaled(inv, ring_->one());
    std::size_t idx = gb_.size();
    for (std::size_t i = 0; i < idx; ++i) {
      Monomial l = mono_lcm(gb_[i].leading_monomial(), g.leading_monomial());
      pairs_.emplace(ring_->weight(l), std::make_pair(i, idx));
    }
    gb_.push_back(std::move(g));
  }

  void complete_locked(int w) const {
    auto* self = const_cast<GradedAlgebra*>(this);
    for (int v = completed_ + 1; v <= w; ++v) {
      while (next_rel_ < pending_.size() && ring_->weight(pending_[next_rel_].leading_monomial()) == v) {
        Polynomial r = reduce_locked(pending_[next_rel_++]);
        if (!r.is_zero()) self->add_to_basis_locked(std::move(r));
      }
      while (!pairs_.empty() && pairs_.begin()->first <= v) {
        auto [i, j] = pairs_.begin()->second;
        self->pairs_.erase(self->pairs_.begin());
        const Monomial& li = gb_[i].leading_monomial();
        const Monomial& lj = gb_[j].leading_monomial();
        bool coprime = true;
        for (std::size_t k = 0; k < li.size(); ++k)
          if (li[k] > 0 && lj[k] > 0) coprime = false;
        if (coprime) continue;
        Monomial l = mono_lcm(li, lj);
        Polynomial s = gb_[i].scaled(Rational(1), mono_div(l, li)) - gb_[j].scaled(Rational(1), mono_div(l, lj));
        s = reduce_locked(s);
        if (!s.is_zero()) self->add_to_basis_locked(std::move(s));
      }
      self->completed_ = v;
    }
  }

  std::vector<Polynomial> reduced_locked(int w) const {
    std::vector<Polynomial> minimal;
    for (std::size_t i = 0; i < gb_.size(); ++i) {
      const Monomial& lm = gb_[i].leading_monomial();
      if (ring_->weight(lm) > w) continue;
      bool redundant = false;
      for (std::size_t j = 0; j < gb_.size() && !redundant; ++j) {
        if (i == j) continue;
        const Monomial& lj = gb_[j].leading_monomial();
        if (divides(lj, lm) && (lj != lm || j < i)) redundant = true;
      }
      if (!redundant) minimal.push_back(gb_[i]);
    }
    // Tail-reduce each element against the others.
    std::vector<Polynomial> out;
    for (std::size_t i = 0; i < minimal.size(); ++i) {
      const Polynomial& g = minimal[i];
      Polynomial tail = g - Polynomial::monomial(ring_, g.leading_monomial(), g.leading_coefficient());
      Polynomial r = Polynomial::monomial(ring_, g.leading_monomial(), Rational(1)) + reduce_locked(tail);
      out.push_back(std::move(r));
    }
    std::sort(out.begin(), out.end(), [](const Polynomial& a, const Polynomial& b) {
      return a.terms().key_comp()(a.leading_monomial(), b.leading_monomial());
    });
    return out;
  }

  void enumerate(int w, std::size_t var, Monomial& cur, std::vector<Monomial>& out) const {
    if (var == nvars()) {
      if (w == 0) out.push_back(cur);
      return;
    }
    int wt = ring_->weights[var];
    for (int e = 0; e * wt <= w; ++e) {
      cur[var] = e;
      enumerate(w - e * wt, var + 1, cur, out);
    }
    cur[var] = 0;
  }

  std::shared_ptr<const MonomialTables> build_tables(int W) const {
    std::vector<Polynomial> gb;
    {
      std::lock_guard<std::mutex> lk(gb_mutex_);
      complete_locked(W);
      gb = gb_;
    }
    auto t = std::make_shared<MonomialTables>();
    t->max_weight = W;
    t->weight_offset.push_back(0);
    MonomialGreater greater{std::make_shared<const std::vector<int>>(ring_->weights)};
    for (int w = 0; w <= W; ++w) {
      std::vector<Monomial> all;
      Monomial cur(nvars(), 0);
      enumerate(w, 0, cur, all);
      std::vector<Monomial> std_monos;
      for (auto& m : all) {
        bool reducible = false;
        for (const auto& g : gb)
          if (divides(g.leading_monomial(), m)) {
            reducible = true;
            break;
          }
        if (!reducible) std_monos.push_back(std::move(m));
      }
      std::sort(std_monos.begin(), std_monos.end(), greater);
      for (auto& m : std_monos) {
        uint32_t id = static_cast<uint32_t>(t->monomials.size());
        t->index.emplace(m, id);
        t->fine.push_back(fine_degree(m));
        t->weight.push_back(w);
        t->monomials.push_back(std::move(m));
      }
      t->weight_offset.push_back(static_cast<uint32_t>(t->monomials.size()));
    }
    const std::size_t N = t->monomials.size();
    t->product_span.resize(N);
    for (uint32_t a = 0; a < N; ++a) {
      int rem = W - t->weight[a];
      uint32_t limit = t->weight_offset[rem + 1];
      t->product_span[a].resize(limit);
      for (uint32_t b = 0; b < limit; ++b) {
        Polynomial prod = Polynomial::monomial(ring_, mono_mul(t->monomials[a], t->monomials[b]));
        if (!is_free()) {
          std::lock_guard<std::mutex> lk(gb_mutex_);
          prod = reduce_locked(prod);
        }
        auto start = static_cast<uint32_t>(t->product_terms.size());
        for (const auto& [m, c] : prod.terms()) t->product_terms.push_back({t->index.at(m), c});
        t->product_span[a][b] = {start, static_cast<uint32_t>(t->product_terms.size() - start)};
      }
    }
    return t;
  }

  std::string name_;
  std::shared_ptr<const PolyRing> ring_;
  std::vector<Polynomial> relations_;

  std::vector<FineDegree> fine_gen_;
  std::size_t fine_rank_ = 0;

  mutable std::mutex gb_mutex_;
  std::vector<Polynomial> gb_;
  std::vector<Polynomial> pending_;
  mutable std::size_t next_rel_ = 0;
  std::multimap<int, std::pair<std::size_t, std::size_t>> pairs_;
  int completed_ = -1;

  mutable std::mutex table_mutex_;
  mutable std::shared_ptr<const MonomialTables> tables_;
};

using AlgebraPtr = std::shared_ptr<const GradedAlgebra>;

/// Graded algebra map given by generator images.
class GradedHom {
 public:
  GradedHom(AlgebraPtr src, AlgebraPtr dst, std::vector<Polynomial> images)
      : src_(std::move(src)), dst_(std::move(dst)), images_(std::move(images)) {
    if (images_.size() != src_->nvars())
      throw Error(ErrorCode::Precondition, "algebra_hom: need one image per generator");
    for (std::size_t i = 0; i < images_.size(); ++i) {
      images_[i] = dst_->normal_form(images_[i]);
      if (images_[i].is_zero()) continue;
      int w = images_[i].homogeneous_weight();
      if (w != src_->ring()->weights[i])
        throw Error(ErrorCode::WeightMismatch, "image of '" + src_->ring()->symbols[i] + "' has weight " +
                                                   std::to_string(w) + ", expected " +
                                                   std::to_string(src_->ring()->weights[i]));
    }
    for (const auto& r : src_->relations())
      if (!evaluate(r).is_zero())
        throw Error(ErrorCode::RelationNotKilled, "relation '" + r.str() + "' is not sent to zero");
  }

  /// Parses "x->t^2" style assignments; missing generators are an error.
  static GradedHom parse(AlgebraPtr src, AlgebraPtr dst, const std::map<std::string, std::string>& assignments) {
    std::vector<Polynomial> imgs;
    for (const auto& sym : src->ring()->symbols) {
      auto it = assignments.find(sym);
      if (it == assignments.end())
        throw Error(ErrorCode::Precondition, "algebra_hom: no image for generator '" + sym + "'");
      imgs.push_back(dst->parse(it->second));
    }
    return GradedHom(std::move(src), std::move(dst), std::move(imgs));
  }

  static GradedHom identity(AlgebraPtr a) {
    std::vector<Polynomial> imgs;
    for (std::size_t i = 0; i < a->nvars(); ++i) imgs.push_back(a->generator(i));
    return GradedHom(a, a, std::move(imgs));
  }

  const AlgebraPtr& source() const { return src_; }
  const AlgebraPtr& target() const { return dst_; }
  const std::vector<Polynomial>& images() const { return images_; }

  /// Image of a source polynomial, in normal form.
  Polynomial evaluate(const Polynomial& p) const {
    Polynomial acc = dst_->zero();
    for (const auto& [m, c] : p.terms()) {
      Polynomial t = Polynomial::constant(dst_->ring(), c);
      for (std::size_t i = 0; i < m.size(); ++i)
        for (int e = 0; e < m[i]; ++e) t = dst_->normal_form(t * images_[i]);
      acc = acc + t;
    }
    return dst_->normal_form(acc);
  }
  Polynomial apply(const Monomial& m) const {
    return evaluate(Polynomial::monomial(src_->ring(), m));
  }

 private:
  AlgebraPtr src_;
  AlgebraPtr dst_;
  std::vector<Polynomial> images_;
};

inline GradedHom algebra_hom(AlgebraPtr a, AlgebraPtr b, std::vector<Polynomial> images) {
  return GradedHom(std::move(a), std::move(b), std::move(images));
}

}  // namespace khh
