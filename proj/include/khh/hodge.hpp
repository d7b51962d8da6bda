#pragma once

// Eulerian idempotents and the shuffle operator in Q[S_n], acting on bar
// tensors by  sigma . a0[a1|...|an] = sgn(sigma) a0[a_{s^-1(1)}|...|a_{s^-1(n)}],
// i.e. the entry in slot k moves to slot sigma(k).
//
// e^(i) comes from  sum_i e^(i) x^i = sum_sigma binom(x - des(sigma) + n - 1, n) sigma.
// The shuffle operator s_2 = sum_p sum_{(p,n-p)-shuffles} sigma must equal
// sum_i 2^i e^(i); both routes are computed and compared.

#include "khh/bar_complex.hpp"
#include "khh/error.hpp"
#include "khh/linalg.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <vector>

namespace khh {

using Perm = std::vector<int>;

class SymmetricGroup {
 public:
  explicit SymmetricGroup(int n) : n_(n) {
    Perm p(n);
    std::iota(p.begin(), p.end(), 0);
    do {
      index_.emplace(p, static_cast<int>(perms_.size()));
      perms_.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
    for (const auto& q : perms_) {
      int inv = 0, des = 0;
      for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
          if (q[a] > q[b]) ++inv;
      for (int a = 0; a + 1 < n; ++a)
        if (q[a] > q[a + 1]) ++des;
      sign_.push_back(inv % 2 ? -1 : 1);
      des_.push_back(des);
    }
    if (n <= 6) {
      const std::size_t N = perms_.size();
      table_.resize(N * N);
      for (std::size_t a = 0; a < N; ++a)
        for (std::size_t b = 0; b < N; ++b) table_[a * N + b] = compose_slow(a, b);
    }
  }
  int degree() const { return n_; }
  std::size_t order() const { return perms_.size(); }
  const Perm& perm(std::size_t k) const { return perms_[k]; }
  int index(const Perm& p) const { return index_.at(p); }
  int sign(std::size_t k) const { return sign_[k]; }
  int descents(std::size_t k) const { return des_[k]; }
  /// (a b)(k) = a(b(k))
  int compose(std::size_t a, std::size_t b) const {
    if (!table_.empty()) return table_[a * perms_.size() + b];
    return compose_slow(a, b);
  }

 private:
  int compose_slow(std::size_t a, std::size_t b) const {
    Perm r(n_);
    for (int k = 0; k < n_; ++k) r[k] = perms_[a][perms_[b][k]];
    return index(r);
  }

  int n_;
  std::vector<Perm> perms_;
  std::map<Perm, int> index_;
  std::vector<int> sign_, des_;
  std::vector<int> table_;
};

/// Element of Q[S_n] as a dense coefficient vector over the permutations.
class GroupElement {
 public:
  GroupElement() = default;
  explicit GroupElement(std::shared_ptr<const SymmetricGroup> g) : g_(std::move(g)), c_(g_->order()) {}
  static GroupElement identity(std::shared_ptr<const SymmetricGroup> g) {
    GroupElement e(g);
    e.c_[0] = Rational(1);  // the first permutation in lexicographic order is the identity
    return e;
  }
  const SymmetricGroup& group() const { return *g_; }
  const Rational& operator[](std::size_t k) const { return c_[k]; }
  Rational& operator[](std::size_t k) { return c_[k]; }

  friend GroupElement operator+(const GroupElement& a, const GroupElement& b) {
    GroupElement r(a.g_);
    for (std::size_t k = 0; k < r.c_.size(); ++k) r.c_[k] = a.c_[k] + b.c_[k];
    return r;
  }
  friend GroupElement operator*(const GroupElement& a, const GroupElement& b) {
    GroupElement r(a.g_);
    for (std::size_t i = 0; i < a.c_.size(); ++i) {
      if (a.c_[i].is_zero()) continue;
      for (std::size_t j = 0; j < b.c_.size(); ++j) {
        if (b.c_[j].is_zero()) continue;
        r.c_[a.g_->compose(i, j)] += a.c_[i] * b.c_[j];
      }
    }
    return r;
  }
  GroupElement scaled(const Rational& s) const {
    GroupElement r(g_);
    for (std::size_t k = 0; k < c_.size(); ++k) r.c_[k] = c_[k] * s;
    return r;
  }
  friend bool operator==(const GroupElement& a, const GroupElement& b) { return a.c_ == b.c_; }
  bool is_zero() const {
    return std::all_of(c_.begin(), c_.end(), [](const Rational& r) { return r.is_zero(); });
  }

 private:
  std::shared_ptr<const SymmetricGroup> g_;
  std::vector<Rational> c_;
};

struct EulerianTable {
  int n = 0;
  std::shared_ptr<const SymmetricGroup> group;
  std::vector<GroupElement> e;  // e[i], i = 0..n
  GroupElement s2;              // shuffle operator

  /// Throws IDEMPOTENT_SANITY_FAIL unless the e^(i) are complete orthogonal
  /// idempotents and s2 = sum 2^i e^(i).
  void verify() const {
    GroupElement sum(group), psi(group);
    for (int i = 0; i <= n; ++i) {
      sum = sum + e[i];
      psi = psi + e[i].scaled(Rational(1LL << i));
    }
    if (!(sum == GroupElement::identity(group)))
      throw Error(ErrorCode::IdempotentSanityFail, "sum of Eulerian idempotents is not the identity, n=" +
                                                       std::to_string(n));
    for (int i = 0; i <= n; ++i)
      for (int j = 0; j <= n; ++j) {
        GroupElement p = e[i] * e[j];
        bool ok = (i == j) ? (p == e[i]) : p.is_zero();
        if (!ok)
          throw Error(ErrorCode::IdempotentSanityFail, "e^(" + std::to_string(i) + ") e^(" + std::to_string(j) +
                                                           ") wrong, n=" + std::to_string(n));
      }
    if (!(psi == s2))
      throw Error(ErrorCode::IdempotentSanityFail,
                  "shuffle operator differs from sum 2^i e^(i), n=" + std::to_string(n));
  }
};

namespace hodge_detail {

inline EulerianTable build_table(int n) {
  EulerianTable t;
  t.n = n;
  t.group = std::make_shared<SymmetricGroup>(n);
  const auto& G = *t.group;
  // binom(x - d + n - 1, n) as a polynomial in x, for each descent count d
  Rational nfact(1);
  for (int k = 2; k <= n; ++k) nfact = nfact * Rational(k);
  std::vector<std::vector<Rational>> poly(std::max(n, 1));
  for (int d = 0; d < std::max(n, 1); ++d) {
    std::vector<Rational> p{Rational(1)};
    for (int k = 0; k < n; ++k) {
      Rational c(n - 1 - d - k);  // factor (x + c)
      std::vector<Rational> q(p.size() + 1);
      for (std::size_t j = 0; j < p.size(); ++j) {
        q[j + 1] += p[j];
        q[j] += p[j] * c;
      }
      p = std::move(q);
    }
    for (auto& v : p) v = v / nfact;
    poly[d] = std::move(p);
  }
  for (int i = 0; i <= n; ++i) {
    GroupElement e(t.group);
    for (std::size_t k = 0; k < G.order(); ++k) {
      const auto& p = poly[G.descents(k)];
      if (i < static_cast<int>(p.size())) e[k] = p[i];
    }
    t.e.push_back(std::move(e));
  }
  GroupElement s2(t.group);
  for (std::size_t k = 0; k < G.order(); ++k) {
    // a (p, n-p)-shuffle is increasing on [0,p) and on [p,n) for some p
    const Perm& q = G.perm(k);
    for (int p = 0; p <= n; ++p) {
      bool ok = true;
      for (int a = 0; a + 1 < p && ok; ++a) ok = q[a] < q[a + 1];
      for (int a = p; a + 1 < n && ok; ++a) ok = q[a] < q[a + 1];
      if (ok) s2[k] += Rational(1);
    }
  }
  t.s2 = std::move(s2);
  return t;
}

}  // namespace hodge_detail

/// Verified table for degree n (cached; verification runs once per n).
inline const EulerianTable& eulerian(int n) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<EulerianTable>> cache;
  std::lock_guard<std::mutex> lk(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return *it->second;
  if (n < 0 || n > 7) throw Error(ErrorCode::Precondition, "Eulerian idempotents supported for n <= 7");
  auto t = std::make_unique<EulerianTable>(hodge_detail::build_table(n));
  t->verify();
  return *cache.emplace(n, std::move(t)).first->second;
}

/// Orbits of the S_n action on a slice: tensors with equal head and equal
/// multiset of bar entries.  Members are listed in increasing slice order.
inline std::vector<std::vector<uint32_t>> slice_orbits(const SliceIndex& s) {
  const int n = s.degree();
  std::map<Tensor, std::vector<uint32_t>> orbits;
  Tensor key(n + 1);
  for (std::size_t k = 0; k < s.size(); ++k) {
    const uint32_t* t = s.at(k);
    std::copy(t, t + n + 1, key.begin());
    std::sort(key.begin() + 1, key.end());
    orbits[key].push_back(static_cast<uint32_t>(k));
  }
  std::vector<std::vector<uint32_t>> out;
  out.reserve(orbits.size());
  for (auto& [k, v] : orbits) out.push_back(std::move(v));
  return out;
}

/// Matrix of a group-algebra element on a slice.
inline SparseMatrix group_action_matrix(const SliceIndex& s, const GroupElement& x) {
  const int n = s.degree();
  const auto& G = x.group();
  if (G.degree() != n) throw Error(ErrorCode::Precondition, "group_action_matrix: degree mismatch");
  std::vector<SparseVec> cols(s.size());
  Tensor out(n + 1);
  for (std::size_t k = 0; k < s.size(); ++k) {
    const uint32_t* t = s.at(k);
    std::vector<std::pair<uint32_t, Rational>> acc;
    for (std::size_t g = 0; g < G.order(); ++g) {
      if (x[g].is_zero()) continue;
      const Perm& p = G.perm(g);
      out[0] = t[0];
      for (int a = 0; a < n; ++a) out[p[a] + 1] = t[a + 1];
      int64_t r = s.find(out.data());
      if (r < 0) throw Error(ErrorCode::SanityFail, "permutation leaves the slice");
      acc.emplace_back(static_cast<uint32_t>(r), G.sign(g) > 0 ? x[g] : -x[g]);
    }
    cols[k] = make_sparse(std::move(acc));
  }
  return SparseMatrix(s.size(), std::move(cols));
}

enum class HodgeRoute { Idempotent, Adams };

/// For each i = 0..n, a basis (sparse vectors over the slice) of the
/// Hodge piece i of the slice: the image of e^(i) (Idempotent route) or the
/// 2^i-eigenspace of the shuffle operator (Adams route).  Computed orbit by
/// orbit, since both operators preserve orbits.
inline std::vector<std::vector<SparseVec>> hodge_bases(const SliceIndex& s, HodgeRoute route) {
  const int n = s.degree();
  const EulerianTable& tab = eulerian(n);
  const auto& G = *tab.group;
  std::vector<std::vector<SparseVec>> out(n + 1);
  // The local matrices depend only on the equality pattern of the sorted bar
  // entries, so local bases are shared between orbits with the same pattern.
  std::map<std::vector<int>, std::vector<std::vector<SparseVec>>> by_pattern;
  Tensor buf(n + 1);
  for (const auto& members : slice_orbits(s)) {
    const std::size_t m = members.size();
    std::vector<int> pattern(n);
    {
      const uint32_t* t = s.at(members.front());
      std::vector<uint32_t> e(t + 1, t + n + 1);
      std::sort(e.begin(), e.end());
      for (int k = 1; k < n; ++k) pattern[k] = pattern[k - 1] + (e[k] != e[k - 1]);
    }
    auto it = by_pattern.find(pattern);
    if (it == by_pattern.end()) {
      // action table: local index of sigma.t and the sign
      std::vector<std::vector<std::pair<uint32_t, int>>> act(m, std::vector<std::pair<uint32_t, int>>(G.order()));
      for (std::size_t a = 0; a < m; ++a) {
        const uint32_t* t = s.at(members[a]);
        for (std::size_t g = 0; g < G.order(); ++g) {
          const Perm& p = G.perm(g);
          buf[0] = t[0];
          for (int k = 0; k < n; ++k) buf[p[k] + 1] = t[k + 1];
          int64_t r = s.find(buf.data());
          auto pos = std::lower_bound(members.begin(), members.end(), static_cast<uint32_t>(r));
          act[a][g] = {static_cast<uint32_t>(pos - members.begin()), G.sign(g)};
        }
      }
      auto local_matrix = [&](const GroupElement& x) {
        std::vector<SparseVec> cols(m);
        for (std::size_t a = 0; a < m; ++a) {
          std::vector<std::pair<uint32_t, Rational>> acc;
          for (std::size_t g = 0; g < G.order(); ++g)
            if (!x[g].is_zero()) acc.emplace_back(act[a][g].first, act[a][g].second > 0 ? x[g] : -x[g]);
          cols[a] = make_sparse(std::move(acc));
        }
        return SparseMatrix(m, std::move(cols));
      };
      std::vector<std::vector<SparseVec>> local(n + 1);
      if (route == HodgeRoute::Idempotent) {
        for (int i = 0; i <= n; ++i) {
          auto M = local_matrix(tab.e[i]);
          IncrementalSpan span;
          for (const auto& c : M.columns()) span.add(c);
          local[i] = span.basis();
        }
      } else {
        auto S = local_matrix(tab.s2);
        for (int i = 0; i <= n; ++i) local[i] = eigenspace(S, Rational(1LL << i));
      }
      it = by_pattern.emplace(pattern, std::move(local)).first;
    }
    for (int i = 0; i <= n; ++i)
      for (const auto& v : it->second[i]) {
        SparseVec g;
        g.reserve(v.size());
        for (const auto& e : v) g.push_back({members[e.index], e.value});
        out[i].push_back(std::move(g));
      }
  }
  return out;
}

}  // namespace khh
