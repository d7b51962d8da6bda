#pragma once

// Normalized Hochschild bar complex, sliced by degree n, weight w and fine
// degree.  A tensor a0[a1|...|an] is stored as n+1 monomial ids of the
// algebra's tables; entries 1..n never have weight 0.
//
// Conventions:
//   standard   b = sum_{i<n} (-1)^i d_i + (-1)^n d_n (wrap), B and shuffle as usual
//   transpose  every operator conjugated by the reversal a0[a1|..|an] -> a0[an|..|a1]
//   bar-prime  b without the wrap term; a deliberately wrong complex

#include "khh/error.hpp"
#include "khh/graded_algebra.hpp"
#include "khh/linalg.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <string>
#include <vector>

namespace khh {

enum class Convention { Standard, Transpose, BarPrime };

inline const char* to_string(Convention c) {
  switch (c) {
    case Convention::Standard: return "standard";
    case Convention::Transpose: return "transpose";
    case Convention::BarPrime: return "bar-prime";
  }
  return "standard";
}

inline Convention parse_convention(std::string_view s) {
  if (s == "standard") return Convention::Standard;
  if (s == "transpose") return Convention::Transpose;
  if (s == "bar-prime") return Convention::BarPrime;
  throw Error(ErrorCode::Precondition, "unknown convention '" + std::string(s) + "'");
}

using Tensor = std::vector<uint32_t>;

namespace bar_detail {

inline void reverse_tail(uint32_t* t, int n) { std::reverse(t + 1, t + n + 1); }

// Terms of the standard b on a degree-n tensor, n >= 1.
template <class Emit>
void standard_boundary(const MonomialTables& T, const uint32_t* t, int n, bool wrap, Emit&& emit) {
  uint32_t buf[64];
  for (int i = 0; i < n; ++i) {
    const int sign = (i % 2 == 0) ? 1 : -1;
    auto [b, e] = T.product(t[i], t[i + 1]);
    for (auto it = b; it != e; ++it) {
      int k = 0;
      for (int j = 0; j < i; ++j) buf[k++] = t[j];
      buf[k++] = it->id;
      for (int j = i + 2; j <= n; ++j) buf[k++] = t[j];
      emit(buf, sign > 0 ? it->coeff : -it->coeff);
    }
  }
  if (!wrap) return;
  const int sign = (n % 2 == 0) ? 1 : -1;
  auto [b, e] = T.product(t[n], t[0]);
  for (auto it = b; it != e; ++it) {
    buf[0] = it->id;
    for (int j = 1; j < n; ++j) buf[j] = t[j];
    emit(buf, sign > 0 ? it->coeff : -it->coeff);
  }
}

template <class Emit>
void boundary(const MonomialTables& T, const uint32_t* t, int n, Convention conv, Emit&& emit) {
  if (n == 0) return;
  if (conv == Convention::Transpose) {
    uint32_t r[64];
    std::copy(t, t + n + 1, r);
    reverse_tail(r, n);
    standard_boundary(T, r, n, true, [&](uint32_t* out, const Rational& c) {
      reverse_tail(out, n - 1);
      emit(out, c);
    });
    return;
  }
  standard_boundary(T, t, n, conv != Convention::BarPrime, emit);
}

template <class Emit>
void standard_connes(const uint32_t* t, int n, Emit&& emit) {
  if (t[0] == 0) return;
  uint32_t buf[64];
  for (int i = 0; i <= n; ++i) {
    buf[0] = 0;
    int k = 1;
    for (int j = i; j <= n; ++j) buf[k++] = t[j];
    for (int j = 0; j < i; ++j) buf[k++] = t[j];
    emit(buf, ((n * i) % 2 == 0) ? Rational(1) : Rational(-1));
  }
}

template <class Emit>
void connes(const uint32_t* t, int n, Convention conv, Emit&& emit) {
  if (conv == Convention::Transpose) {
    uint32_t r[64];
    std::copy(t, t + n + 1, r);
    reverse_tail(r, n);
    standard_connes(r, n, [&](uint32_t* out, const Rational& c) {
      reverse_tail(out, n + 1);
      emit(out, c);
    });
    return;
  }
  standard_connes(t, n, emit);
}

// Signed (p,q)-shuffles of the tails of a and c, with heads multiplied.
template <class Emit>
void standard_shuffle(const MonomialTables& T, const uint32_t* a, int p, const uint32_t* c, int q, Emit&& emit) {
  auto [hb, he] = T.product(a[0], c[0]);
  if (hb == he) return;
  uint32_t buf[64];
  auto rec = [&](auto&& self, int ia, int ic, int inversions) -> void {
    if (ia == p && ic == q) {
      for (auto it = hb; it != he; ++it) {
        buf[0] = it->id;
        emit(buf, (inversions % 2 == 0) ? it->coeff : -it->coeff);
      }
      return;
    }
    const int pos = ia + ic + 1;
    if (ia < p) {
      buf[pos] = a[ia + 1];
      // an entry of a placed after ic entries of c crosses them all
      self(self, ia + 1, ic, inversions + ic);
    }
    if (ic < q) {
      buf[pos] = c[ic + 1];
      self(self, ia, ic + 1, inversions);
    }
  };
  rec(rec, 0, 0, 0);
}

template <class Emit>
void shuffle(const MonomialTables& T, const uint32_t* a, int p, const uint32_t* c, int q, Convention conv,
             Emit&& emit) {
  if (conv == Convention::Transpose) {
    uint32_t ra[64], rc[64];
    std::copy(a, a + p + 1, ra);
    std::copy(c, c + q + 1, rc);
    reverse_tail(ra, p);
    reverse_tail(rc, q);
    standard_shuffle(T, ra, p, rc, q, [&](const uint32_t* out, const Rational& k) {
      uint32_t o[64];
      std::copy(out, out + p + q + 1, o);
      reverse_tail(o, p + q);
      emit(o, k);
    });
    return;
  }
  standard_shuffle(T, a, p, c, q, emit);
}

}  // namespace bar_detail

/// Homogeneous linear combination of normalized bar tensors.
class BarChain {
 public:
  BarChain(AlgebraPtr alg, int degree, int weight) : alg_(std::move(alg)), degree_(degree), weight_(weight) {}

  static BarChain single(AlgebraPtr alg, const std::vector<Monomial>& entries, const Rational& c = Rational(1)) {
    int w = 0;
    for (const auto& m : entries) w += alg->ring()->weight(m);
    auto T = alg->tables(w);
    BarChain ch(alg, static_cast<int>(entries.size()) - 1, w);
    Tensor t;
    for (const auto& m : entries) t.push_back(T->id_of(m));
    ch.add(t, c);
    return ch;
  }

  const AlgebraPtr& algebra() const { return alg_; }
  int degree() const { return degree_; }
  int weight() const { return weight_; }
  const std::map<Tensor, Rational>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  void add(const Tensor& t, const Rational& c) {
    if (c.is_zero()) return;
    if (static_cast<int>(t.size()) != degree_ + 1)
      throw Error(ErrorCode::Precondition, "BarChain: tensor of wrong degree");
    for (std::size_t i = 1; i < t.size(); ++i)
      if (t[i] == 0) return;  // normalized: scalar entry in a bar position
    auto [it, inserted] = terms_.emplace(t, c);
    if (!inserted) {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  BarChain scaled(const Rational& s) const {
    BarChain r(alg_, degree_, weight_);
    if (s.is_zero()) return r;
    for (const auto& [t, c] : terms_) r.terms_.emplace(t, c * s);
    return r;
  }
  friend BarChain operator+(const BarChain& a, const BarChain& b) {
    check_compatible(a, b);
    BarChain r = a.is_zero() ? BarChain(b.alg_, b.degree_, b.weight_) : a;
    for (const auto& [t, c] : b.terms_) r.add(t, c);
    return r;
  }
  friend BarChain operator-(const BarChain& a, const BarChain& b) { return a + b.scaled(Rational(-1)); }
  friend bool operator==(const BarChain& a, const BarChain& b) {
    if (a.terms_.size() != b.terms_.size()) return false;
    auto i = a.terms_.begin();
    auto j = b.terms_.begin();
    for (; i != a.terms_.end(); ++i, ++j)
      if (i->first != j->first || i->second != j->second) return false;
    return true;
  }

  /// e.g. "2*x[y] + 3*y[x]"; unit heads are omitted.
  std::string str() const {
    if (terms_.empty()) return "0";
    auto T = alg_->tables(weight_);
    auto mono = [&](uint32_t id) { return Polynomial::monomial(alg_->ring(), T->monomials[id]).str(); };
    std::ostringstream os;
    bool first = true;
    for (const auto& [t, c] : terms_) {
      Rational a = c.sign() < 0 ? -c : c;
      if (first) {
        if (c.sign() < 0) os << "-";
      } else {
        os << (c.sign() < 0 ? " - " : " + ");
      }
      first = false;
      bool unit_head = t[0] == 0;
      if (!a.is_one()) {
        os << a.str();
        if (!unit_head || degree_ > 0) os << (unit_head ? "" : "*");
      }
      if (!unit_head || (degree_ == 0 && a.is_one())) os << mono(t[0]);
      if (degree_ > 0) {
        os << "[";
        for (int i = 1; i <= degree_; ++i) os << (i > 1 ? "|" : "") << mono(t[i]);
        os << "]";
      }
    }
    return os.str();
  }

 private:
  static void check_compatible(const BarChain& a, const BarChain& b) {
    if (a.alg_ != b.alg_ || a.degree_ != b.degree_ || (a.weight_ != b.weight_ && !a.is_zero() && !b.is_zero()))
      throw Error(ErrorCode::Precondition, "BarChain: incompatible operands");
  }
  AlgebraPtr alg_;
  int degree_;
  int weight_;
  std::map<Tensor, Rational> terms_;
};

/// Parses chains such as "2x[y] + 3y[x]", "[y|y] - x[x|x] - [x^2|x]" or "x^2".
/// Entries may be polynomials; the chain is expanded multilinearly.
inline BarChain parse_chain(const AlgebraPtr& alg, std::string_view text) {
  std::vector<std::pair<int, std::string>> pieces;  // sign, term text
  {
    int depth = 0;
    std::string cur;
    int sign = 1;
    bool any = false;
    for (char ch : text) {
      if (ch == '[' || ch == '(') ++depth;
      if (ch == ']' || ch == ')') --depth;
      if (depth == 0 && (ch == '+' || ch == '-')) {
        if (cur.find_first_not_of(" \t") != std::string::npos) {
          pieces.emplace_back(sign, cur);
          cur.clear();
          sign = 1;
        } else if (any) {
          // consecutive signs, e.g. "- -x"
        }
        if (ch == '-') sign = -sign;
        any = true;
        continue;
      }
      cur.push_back(ch);
    }
    if (cur.find_first_not_of(" \t") != std::string::npos) pieces.emplace_back(sign, cur);
  }
  if (pieces.empty()) throw ParseError("empty chain", 1, 1);
  int degree = -1;
  int weight = -1;
  std::vector<std::pair<std::vector<Polynomial>, Rational>> expanded;
  for (const auto& [sign, piece] : pieces) {
    std::vector<std::string> parts;
    auto lb = piece.find('[');
    std::string head = piece.substr(0, lb);
    if (lb != std::string::npos) {
      auto rb = piece.rfind(']');
      if (rb == std::string::npos || rb < lb) throw ParseError("missing ']' in '" + piece + "'", 1, 1);
      std::string inner = piece.substr(lb + 1, rb - lb - 1);
      std::size_t st = 0;
      while (true) {
        auto bar = inner.find('|', st);
        parts.push_back(inner.substr(st, bar == std::string::npos ? std::string::npos : bar - st));
        if (bar == std::string::npos) break;
        st = bar + 1;
      }
      if (piece.find_first_not_of(" \t", rb + 1) != std::string::npos)
        throw ParseError("trailing text after ']' in '" + piece + "'", 1, 1);
    }
    int d = static_cast<int>(parts.size());
    if (degree >= 0 && d != degree) throw ParseError("chain terms of different degrees", 1, 1);
    degree = d;
    std::string h = head;
    if (h.find_first_not_of(" \t*") == std::string::npos) h = "1";
    while (!h.empty() && (h.back() == ' ' || h.back() == '*')) h.pop_back();
    std::vector<Polynomial> entries;
    entries.push_back(alg->normal_form(alg->parse(h)));
    for (const auto& p : parts) entries.push_back(alg->normal_form(alg->parse(p)));
    expanded.emplace_back(std::move(entries), Rational(sign));
  }
  // all terms must have one weight
  std::vector<std::pair<std::vector<Monomial>, Rational>> monos;
  for (const auto& [entries, s] : expanded) {
    std::vector<std::pair<std::vector<Monomial>, Rational>> acc{{{}, s}};
    for (const auto& e : entries) {
      std::vector<std::pair<std::vector<Monomial>, Rational>> next;
      for (const auto& [ms, c] : acc)
        for (const auto& [m, k] : e.terms()) {
          auto v = ms;
          v.push_back(m);
          next.emplace_back(std::move(v), c * k);
        }
      acc = std::move(next);
    }
    monos.insert(monos.end(), acc.begin(), acc.end());
  }
  for (const auto& [ms, c] : monos) {
    int w = 0;
    for (const auto& m : ms) w += alg->ring()->weight(m);
    if (weight >= 0 && w != weight) throw Error(ErrorCode::Precondition, "chain is not weight-homogeneous");
    weight = w;
  }
  BarChain out(alg, degree, std::max(weight, 0));
  auto T = alg->tables(std::max(weight, 0));
  for (const auto& [ms, c] : monos) {
    Tensor t;
    for (const auto& m : ms) t.push_back(T->id_of(m));
    out.add(t, c);
  }
  return out;
}

/// Sorted tensors of one (degree, weight, fine class) slice.
class SliceIndex {
 public:
  SliceIndex(int degree, std::vector<uint32_t> flat) : n_(degree), flat_(std::move(flat)) {}
  int degree() const { return n_; }
  std::size_t size() const { return flat_.size() / (n_ + 1); }
  const uint32_t* at(std::size_t k) const { return flat_.data() + k * (n_ + 1); }
  Tensor tensor(std::size_t k) const { return Tensor(at(k), at(k) + n_ + 1); }

  /// Position of t, or -1.
  int64_t find(const uint32_t* t) const {
    const std::size_t stride = n_ + 1;
    std::size_t lo = 0, hi = size();
    while (lo < hi) {
      std::size_t mid = (lo + hi) / 2;
      const uint32_t* m = flat_.data() + mid * stride;
      int cmp = 0;
      for (std::size_t j = 0; j < stride; ++j)
        if (m[j] != t[j]) {
          cmp = m[j] < t[j] ? -1 : 1;
          break;
        }
      if (cmp == 0) return static_cast<int64_t>(mid);
      if (cmp < 0) lo = mid + 1;
      else hi = mid;
    }
    return -1;
  }

 private:
  int n_;
  std::vector<uint32_t> flat_;
};

using SlicePtr = std::shared_ptr<const SliceIndex>;

class BarComplex {
 public:
  using SliceMap = std::map<FineDegree, SlicePtr>;

  explicit BarComplex(AlgebraPtr alg, Convention conv = Convention::Standard)
      : alg_(std::move(alg)), conv_(conv) {
    min_weight_ = INT32_MAX;
    for (int w : alg_->ring()->weights) min_weight_ = std::min(min_weight_, w);
  }

  const AlgebraPtr& algebra() const { return alg_; }
  Convention convention() const { return conv_; }

  /// Largest degree with a nonempty weight-w slice.
  int max_degree(int w) const { return alg_->nvars() == 0 ? 0 : w / min_weight_; }

  std::shared_ptr<const SliceMap> slices(int n, int w) const {
    {
      std::lock_guard<std::mutex> lk(mutex_);
      auto it = slices_.find({n, w});
      if (it != slices_.end()) return it->second;
    }
    auto built = enumerate(n, w);
    std::lock_guard<std::mutex> lk(mutex_);
    return slices_.emplace(std::make_pair(n, w), std::move(built)).first->second;
  }

  SlicePtr slice(int n, int w, const FineDegree& c) const {
    if (n < 0 || w < 0) return std::make_shared<SliceIndex>(std::max(n, 0), std::vector<uint32_t>{});
    auto s = slices(n, w);
    auto it = s->find(c);
    if (it == s->end()) return std::make_shared<SliceIndex>(n, std::vector<uint32_t>{});
    return it->second;
  }

  /// Fine class of a tensor.
  FineDegree class_of(const uint32_t* t, int n, const MonomialTables& T) const {
    FineDegree f(alg_->fine_rank(), 0);
    for (int i = 0; i <= n; ++i)
      for (std::size_t k = 0; k < f.size(); ++k) f[k] += T.fine[t[i]][k];
    return f;
  }

  /// b: C_n(c) -> C_{n-1}(c) in the bases of the slice indices.
  SparseMatrix b_matrix(int n, int w, const FineDegree& c) const {
    auto src = slice(n, w, c);
    auto dst = slice(n - 1, w, c);
    if (n == 0) return SparseMatrix(0, src->size());
    auto T = alg_->tables(w);
    std::vector<SparseVec> cols(src->size());
    std::vector<std::pair<uint32_t, Rational>> acc;
    for (std::size_t k = 0; k < src->size(); ++k) {
      acc.clear();
      bar_detail::boundary(*T, src->at(k), n, conv_, [&](const uint32_t* t, const Rational& v) {
        int64_t r = dst->find(t);
        if (r < 0) throw Error(ErrorCode::SanityFail, "b leaves its slice");
        acc.emplace_back(static_cast<uint32_t>(r), v);
      });
      cols[k] = make_sparse(acc);
    }
    return SparseMatrix(dst->size(), std::move(cols));
  }

  /// B: C_n(c) -> C_{n+1}(c).
  SparseMatrix B_matrix(int n, int w, const FineDegree& c) const {
    auto src = slice(n, w, c);
    auto dst = slice(n + 1, w, c);
    std::vector<SparseVec> cols(src->size());
    std::vector<std::pair<uint32_t, Rational>> acc;
    for (std::size_t k = 0; k < src->size(); ++k) {
      acc.clear();
      bar_detail::connes(src->at(k), n, conv_, [&](const uint32_t* t, const Rational& v) {
        int64_t r = dst->find(t);
        if (r < 0) throw Error(ErrorCode::SanityFail, "B leaves its slice");
        acc.emplace_back(static_cast<uint32_t>(r), v);
      });
      cols[k] = make_sparse(acc);
    }
    return SparseMatrix(dst->size(), std::move(cols));
  }

  BarChain b(const BarChain& c) const {
    BarChain out(alg_, std::max(c.degree() - 1, 0), c.weight());
    if (c.degree() == 0) return BarChain(alg_, 0, c.weight());
    auto T = alg_->tables(c.weight());
    Tensor buf(c.degree());
    for (const auto& [t, k] : c.terms())
      bar_detail::boundary(*T, t.data(), c.degree(), conv_, [&](const uint32_t* o, const Rational& v) {
        std::copy(o, o + c.degree(), buf.begin());
        out.add(buf, k * v);
      });
    return out;
  }

  BarChain B(const BarChain& c) const {
    BarChain out(alg_, c.degree() + 1, c.weight());
    Tensor buf(c.degree() + 2);
    for (const auto& [t, k] : c.terms())
      bar_detail::connes(t.data(), c.degree(), conv_, [&](const uint32_t* o, const Rational& v) {
        std::copy(o, o + c.degree() + 2, buf.begin());
        out.add(buf, k * v);
      });
    return out;
  }

  BarChain shuffle(const BarChain& a, const BarChain& c) const {
    const int p = a.degree(), q = c.degree();
    BarChain out(alg_, p + q, a.weight() + c.weight());
    if (p + q + 1 > 64) throw Error(ErrorCode::Precondition, "shuffle: degree too large");
    auto T = alg_->tables(a.weight() + c.weight());
    Tensor buf(p + q + 1);
    for (const auto& [ta, ka] : a.terms())
      for (const auto& [tc, kc] : c.terms()) {
        Rational k = ka * kc;
        bar_detail::shuffle(*T, ta.data(), p, tc.data(), q, conv_, [&](const uint32_t* o, const Rational& v) {
          std::copy(o, o + p + q + 1, buf.begin());
          out.add(buf, k * v);
        });
      }
    return out;
  }

  /// Coordinates of a chain in a slice; throws if a term lies outside it.
  SparseVec to_vector(const BarChain& c, const SliceIndex& s) const {
    std::vector<std::pair<uint32_t, Rational>> acc;
    for (const auto& [t, k] : c.terms()) {
      int64_t r = s.find(t.data());
      if (r < 0) throw Error(ErrorCode::Precondition, "chain term outside the slice");
      acc.emplace_back(static_cast<uint32_t>(r), k);
    }
    return make_sparse(std::move(acc));
  }

  BarChain to_chain(const SparseVec& v, const SliceIndex& s, int w) const {
    BarChain out(alg_, s.degree(), w);
    for (const auto& e : v) out.add(s.tensor(e.index), e.value);
    return out;
  }

  /// Fine class of a homogeneous chain (of its first term).
  FineDegree class_of(const BarChain& c) const {
    if (c.is_zero()) return FineDegree(alg_->fine_rank(), 0);
    auto T = alg_->tables(c.weight());
    return class_of(c.terms().begin()->first.data(), c.degree(), *T);
  }

 private:
  std::shared_ptr<const SliceMap> enumerate(int n, int w) const {
    auto out = std::make_shared<SliceMap>();
    if (n < 0 || w < 0 || n + 1 > 64) return out;
    if (alg_->nvars() == 0) {
      if (n == 0 && w == 0) out->emplace(FineDegree{}, std::make_shared<SliceIndex>(0, std::vector<uint32_t>{0}));
      return out;
    }
    auto T = alg_->tables(w);
    const std::size_t fr = alg_->fine_rank();
    std::map<FineDegree, std::vector<uint32_t>> buckets;
    Tensor cur(n + 1);
    std::vector<FineDegree> partial(n + 2, FineDegree(fr, 0));
    auto rec = [&](auto&& self, int pos, int rem) -> void {
      if (pos == n + 1) {
        if (rem != 0) return;
        auto& b = buckets[partial[pos]];
        b.insert(b.end(), cur.begin(), cur.end());
        return;
      }
      const int later = n - pos;  // positions after this one, each of weight >= min_weight
      const int lo = pos == 0 ? 0 : min_weight_;
      const int hi = rem - later * min_weight_;
      for (int wt = lo; wt <= hi; ++wt) {
        if (pos == n && wt != rem) continue;
        const std::size_t cnt = T->count(wt);
        for (std::size_t k = 0; k < cnt; ++k) {
          uint32_t id = T->first(wt) + static_cast<uint32_t>(k);
          cur[pos] = id;
          for (std::size_t f = 0; f < fr; ++f) partial[pos + 1][f] = partial[pos][f] + T->fine[id][f];
          self(self, pos + 1, rem - wt);
        }
      }
    };
    rec(rec, 0, w);
    for (auto& [c, flat] : buckets) out->emplace(c, std::make_shared<SliceIndex>(n, std::move(flat)));
    return out;
  }

  AlgebraPtr alg_;
  Convention conv_;
  int min_weight_;
  mutable std::mutex mutex_;
  mutable std::map<std::pair<int, int>, std::shared_ptr<const SliceMap>> slices_;
};

}  // namespace khh
