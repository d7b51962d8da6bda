#pragma once

// Exact sparse linear algebra over Q.
//
// SparseMatrix is column-major and immutable once built; its rank is computed
// at most once and cached.  Rank uses a right-looking elimination with a
// Markowitz-style pivot rule: take a column of least fill, pivot on its row
// that occurs in the fewest live columns, prefer +-1 pivots.

#include "khh/error.hpp"
#include "khh/rational.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <utility>
#include <vector>

namespace khh {

struct SparseEntry {
  uint32_t index;
  Rational value;
};

/// Sorted, zero-free sparse vector.
using SparseVec = std::vector<SparseEntry>;

namespace linalg_detail {

// a + f*b, both sorted.
inline SparseVec axpy(const SparseVec& a, const Rational& f, const SparseVec& b) {
  SparseVec out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].index < b[j].index)) {
      out.push_back(a[i++]);
    } else if (i == a.size() || b[j].index < a[i].index) {
      out.push_back({b[j].index, f * b[j].value});
      ++j;
    } else {
      Rational v = a[i].value + f * b[j].value;
      if (!v.is_zero()) out.push_back({a[i].index, std::move(v)});
      ++i;
      ++j;
    }
  }
  return out;
}

inline const SparseEntry* find(const SparseVec& v, uint32_t idx) {
  auto it = std::lower_bound(v.begin(), v.end(), idx,
                             [](const SparseEntry& e, uint32_t k) { return e.index < k; });
  if (it == v.end() || it->index != idx) return nullptr;
  return &*it;
}

}  // namespace linalg_detail

/// Builds a sorted sparse vector from unsorted (index, value) pairs, summing duplicates.
inline SparseVec make_sparse(std::vector<std::pair<uint32_t, Rational>> terms) {
  std::sort(terms.begin(), terms.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  SparseVec out;
  for (auto& [i, v] : terms) {
    if (!out.empty() && out.back().index == i) {
      out.back().value += v;
      if (out.back().value.is_zero()) out.pop_back();
    } else if (!v.is_zero()) {
      out.push_back({i, std::move(v)});
    }
  }
  return out;
}

/// Rank of the span of the given sparse vectors.  Consumes its input.  If
/// pivots is given, it receives the indices of an independent subset of the
/// input spanning the same space, in increasing order.
inline std::size_t rank_of_vectors(std::vector<SparseVec> cols, std::size_t dim,
                                   std::vector<uint32_t>* pivots = nullptr) {
  using linalg_detail::axpy;
  const std::size_t ncols = cols.size();
  if (ncols == 0 || dim == 0) return 0;

  std::vector<uint32_t> row_cnt(dim, 0);
  std::vector<std::vector<uint32_t>> row_occ(dim);
  std::vector<char> alive(ncols, 1);
  std::size_t max_nnz = 0;
  for (uint32_t c = 0; c < ncols; ++c) {
    for (const auto& e : cols[c]) {
      ++row_cnt[e.index];
      row_occ[e.index].push_back(c);
    }
    max_nnz = std::max(max_nnz, cols[c].size());
  }
  std::vector<std::vector<uint32_t>> bucket(max_nnz + 1);
  for (uint32_t c = 0; c < ncols; ++c) bucket[cols[c].size()].push_back(c);
  std::size_t min_bucket = 0;

  auto push = [&](uint32_t c) {
    std::size_t n = cols[c].size();
    if (n >= bucket.size()) bucket.resize(n + 1);
    bucket[n].push_back(c);
    if (n < min_bucket) min_bucket = n;
  };

  std::size_t rank = 0;
  std::size_t remaining = ncols;
  while (remaining > 0) {
    uint32_t c = UINT32_MAX;
    while (min_bucket < bucket.size()) {
      auto& bk = bucket[min_bucket];
      while (!bk.empty()) {
        uint32_t cand = bk.back();
        bk.pop_back();
        if (alive[cand] && cols[cand].size() == min_bucket) {
          c = cand;
          break;
        }
      }
      if (c != UINT32_MAX) break;
      ++min_bucket;
    }
    if (c == UINT32_MAX) break;
    alive[c] = 0;
    --remaining;
    SparseVec piv = std::move(cols[c]);
    cols[c].clear();
    if (piv.empty()) continue;

    std::size_t best = 0;
    for (std::size_t k = 1; k < piv.size(); ++k) {
      const auto& a = piv[k];
      const auto& b = piv[best];
      if (row_cnt[a.index] < row_cnt[b.index] ||
          (row_cnt[a.index] == row_cnt[b.index] && a.value.is_unit() && !b.value.is_unit()))
        best = k;
    }
    const uint32_t r = piv[best].index;
    const Rational p = piv[best].value;
    ++rank;
    if (pivots) pivots->push_back(c);
    for (const auto& e : piv) --row_cnt[e.index];

    std::vector<uint32_t> occ = std::move(row_occ[r]);
    row_occ[r].clear();
    for (uint32_t c2 : occ) {
      if (!alive[c2]) continue;
      const SparseEntry* hit = linalg_detail::find(cols[c2], r);
      if (!hit) continue;
      Rational f = -(hit->value / p);
      SparseVec& tgt = cols[c2];
      // Row-count bookkeeping: indices gained and lost by the update.
      std::size_t i = 0;
      for (const auto& e : piv) {
        while (i < tgt.size() && tgt[i].index < e.index) ++i;
        if (i < tgt.size() && tgt[i].index == e.index) {
          if ((tgt[i].value + f * e.value).is_zero()) --row_cnt[e.index];
        } else {
          ++row_cnt[e.index];
          row_occ[e.index].push_back(c2);
        }
      }
      tgt = axpy(tgt, f, piv);
      push(c2);
    }
  }
  if (pivots) std::sort(pivots->begin(), pivots->end());
  return rank;
}

class SparseMatrix {
 public:
  SparseMatrix() : SparseMatrix(0, 0) {}
  SparseMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), columns_(cols), cache_(std::make_shared<Cache>()) {}

  /// Takes ownership of columns; each must be sorted, zero-free, in range.
  SparseMatrix(std::size_t rows, std::vector<SparseVec> columns)
      : rows_(rows), cols_(columns.size()), columns_(std::move(columns)),
        cache_(std::make_shared<Cache>()) {
    for (const auto& c : columns_)
      for (const auto& e : c)
        if (e.index >= rows_) throw Error(ErrorCode::Precondition, "SparseMatrix: row index out of range");
  }

  static SparseMatrix from_dense(const std::vector<std::vector<Rational>>& a) {
    std::size_t r = a.size();
    std::size_t c = r ? a[0].size() : 0;
    std::vector<SparseVec> cols(c);
    for (std::size_t j = 0; j < c; ++j)
      for (std::size_t i = 0; i < r; ++i)
        if (!a[i][j].is_zero()) cols[j].push_back({static_cast<uint32_t>(i), a[i][j]});
    return SparseMatrix(r, std::move(cols));
  }
  static SparseMatrix identity(std::size_t n, const Rational& scale = Rational(1)) {
    std::vector<SparseVec> cols(n);
    if (!scale.is_zero())
      for (std::size_t j = 0; j < n; ++j) cols[j].push_back({static_cast<uint32_t>(j), scale});
    return SparseMatrix(n, std::move(cols));
  }
  static SparseMatrix zero(std::size_t rows, std::size_t cols) { return SparseMatrix(rows, cols); }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const SparseVec& column(std::size_t j) const { return columns_[j]; }
  const std::vector<SparseVec>& columns() const { return columns_; }
  std::size_t nnz() const {
    std::size_t n = 0;
    for (const auto& c : columns_) n += c.size();
    return n;
  }
  bool is_zero() const {
    return std::all_of(columns_.begin(), columns_.end(), [](const SparseVec& c) { return c.empty(); });
  }

  Rational at(std::size_t i, std::size_t j) const {
    const SparseEntry* e = linalg_detail::find(columns_[j], static_cast<uint32_t>(i));
    return e ? e->value : Rational();
  }

  SparseMatrix transpose() const {
    std::vector<SparseVec> t(rows_);
    for (std::size_t j = 0; j < cols_; ++j)
      for (const auto& e : columns_[j]) t[e.index].push_back({static_cast<uint32_t>(j), e.value});
    return SparseMatrix(cols_, std::move(t));
  }

  SparseVec apply(const SparseVec& v) const {
    std::vector<std::pair<uint32_t, Rational>> acc;
    for (const auto& e : v)
      for (const auto& m : columns_[e.index]) acc.emplace_back(m.index, e.value * m.value);
    return make_sparse(std::move(acc));
  }

  friend SparseMatrix operator*(const SparseMatrix& a, const SparseMatrix& b) {
    if (a.cols_ != b.rows_) throw Error(ErrorCode::Precondition, "SparseMatrix: dimension mismatch in product");
    std::vector<SparseVec> out(b.cols_);
    for (std::size_t j = 0; j < b.cols_; ++j) out[j] = a.apply(b.columns_[j]);
    return SparseMatrix(a.rows_, std::move(out));
  }
  friend SparseMatrix operator+(const SparseMatrix& a, const SparseMatrix& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_)
      throw Error(ErrorCode::Precondition, "SparseMatrix: dimension mismatch in sum");
    std::vector<SparseVec> out(a.cols_);
    for (std::size_t j = 0; j < a.cols_; ++j) out[j] = linalg_detail::axpy(a.columns_[j], Rational(1), b.columns_[j]);
    return SparseMatrix(a.rows_, std::move(out));
  }
  SparseMatrix scaled(const Rational& s) const {
    std::vector<SparseVec> out(cols_);
    if (!s.is_zero())
      for (std::size_t j = 0; j < cols_; ++j) {
        out[j] = columns_[j];
        for (auto& e : out[j]) e.value *= s;
      }
    return SparseMatrix(rows_, std::move(out));
  }
  friend SparseMatrix operator-(const SparseMatrix& a, const SparseMatrix& b) { return a + b.scaled(Rational(-1)); }

  friend bool operator==(const SparseMatrix& a, const SparseMatrix& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) return false;
    for (std::size_t j = 0; j < a.cols_; ++j) {
      const auto& x = a.columns_[j];
      const auto& y = b.columns_[j];
      if (x.size() != y.size()) return false;
      for (std::size_t k = 0; k < x.size(); ++k)
        if (x[k].index != y[k].index || x[k].value != y[k].value) return false;
    }
    return true;
  }

  /// Horizontal concatenation [a | b].
  static SparseMatrix hcat(const SparseMatrix& a, const SparseMatrix& b) {
    if (a.rows_ != b.rows_) throw Error(ErrorCode::Precondition, "SparseMatrix: row mismatch in hcat");
    std::vector<SparseVec> out(a.columns_);
    out.insert(out.end(), b.columns_.begin(), b.columns_.end());
    return SparseMatrix(a.rows_, std::move(out));
  }

  std::size_t rank() const {
    std::call_once(cache_->rank_once, [this] { cache_->rank = rank_of_vectors(columns_, rows_); });
    return cache_->rank;
  }

 private:
  struct Cache {
    std::once_flag rank_once;
    std::size_t rank = 0;
  };
  std::size_t rows_;
  std::size_t cols_;
  std::vector<SparseVec> columns_;
  std::shared_ptr<Cache> cache_;
};

inline std::size_t rank(const SparseMatrix& m) { return m.rank(); }

/// Reduced row echelon form of the row space of m (rows given as sparse
/// vectors over column indices).  Returns pivot column -> normalized row.
inline std::map<uint32_t, SparseVec> row_echelon(const SparseMatrix& m) {
  using linalg_detail::axpy;
  SparseMatrix rows = m.transpose();  // columns of `rows` are rows of m
  std::map<uint32_t, SparseVec> piv;
  for (const auto& r0 : rows.columns()) {
    SparseVec r = r0;
    std::size_t k = 0;
    while (k < r.size()) {
      auto it = piv.find(r[k].index);
      if (it == piv.end()) {
        ++k;
        continue;
      }
      Rational f = -r[k].value;
      r = axpy(r, f, it->second);
      // entries before k are unchanged because pivot rows start at their pivot
    }
    if (r.empty()) continue;
    // leading entry is a non-pivot column
    Rational inv = Rational(1) / r[0].value;
    for (auto& e : r) e.value *= inv;
    uint32_t lead = r[0].index;
    piv.emplace(lead, std::move(r));
  }
  // Back-substitute so each pivot row is zero in every other pivot column.
  for (auto it = piv.rbegin(); it != piv.rend(); ++it) {
    SparseVec& r = it->second;
    std::size_t k = 1;
    while (k < r.size()) {
      auto jt = piv.find(r[k].index);
      if (jt == piv.end() || jt->first == it->first) {
        ++k;
        continue;
      }
      Rational f = -r[k].value;
      r = axpy(r, f, jt->second);
    }
  }
  return piv;
}

/// Exact basis of the right null space of m.
inline std::vector<SparseVec> kernel_basis(const SparseMatrix& m) {
  auto piv = row_echelon(m);
  std::vector<SparseVec> out;
  std::vector<std::vector<std::pair<uint32_t, Rational>>> acc(m.cols());
  // For each free column f: v = e_f - sum_p R_p[f] e_p.
  for (const auto& [p, row] : piv)
    for (const auto& e : row)
      if (e.index != p) acc[e.index].emplace_back(p, -e.value);
  for (uint32_t f = 0; f < m.cols(); ++f) {
    if (piv.count(f)) continue;
    auto terms = acc[f];
    terms.emplace_back(f, Rational(1));
    out.push_back(make_sparse(std::move(terms)));
  }
  return out;
}

/// Matrix whose columns are the given vectors.
inline SparseMatrix from_columns(std::size_t rows, std::vector<SparseVec> cols) {
  return SparseMatrix(rows, std::move(cols));
}

/// dim ker(d_out) - rank(d_in); requires d_out * d_in == 0 exactly.
inline std::size_t homology_dim(const SparseMatrix& d_in, const SparseMatrix& d_out) {
  if (d_in.rows() != d_out.cols())
    throw Error(ErrorCode::Precondition, "homology_dim: d_in rows != d_out cols");
  if (!(d_out * d_in).is_zero())
    throw Error(ErrorCode::CompositionNonzero, "d_out * d_in != 0");
  return d_out.cols() - d_out.rank() - d_in.rank();
}

/// Basis of ker(m - lambda I).
inline std::vector<SparseVec> eigenspace(const SparseMatrix& m, const Rational& lambda) {
  if (m.rows() != m.cols()) throw Error(ErrorCode::NotSquare, "eigenspace: matrix is not square");
  return kernel_basis(m - SparseMatrix::identity(m.rows(), lambda));
}

/// Homology at degree n of a b-stable subcomplex S, given spanning columns
/// S_n, S_{n+1} and the ambient differentials b_n: C_n->C_{n-1},
/// b_{n+1}: C_{n+1}->C_n.
inline std::size_t subcomplex_homology_dim(const SparseMatrix& s_n, const SparseMatrix& s_n1,
                                           const SparseMatrix& b_n, const SparseMatrix& b_n1) {
  return s_n.rank() - (b_n * s_n).rank() - (b_n1 * s_n1).rank();
}

/// Echelon basis grown one vector at a time; answers span membership.
class IncrementalSpan {
 public:
  /// Reduces v against the current basis; returns the remainder.
  SparseVec reduce(SparseVec v) const {
    std::size_t k = 0;
    while (k < v.size()) {
      auto it = rows_.find(v[k].index);
      if (it == rows_.end()) {
        ++k;
        continue;
      }
      Rational f = -v[k].value;
      v = linalg_detail::axpy(v, f, it->second);
    }
    return v;
  }
  /// Adds v; returns false if v was already in the span.
  bool add(SparseVec v) {
    v = reduce(std::move(v));
    if (v.empty()) return false;
    Rational inv = Rational(1) / v[0].value;
    for (auto& e : v) e.value *= inv;
    uint32_t lead = v[0].index;
    rows_.emplace(lead, std::move(v));
    return true;
  }
  bool contains(const SparseVec& v) const { return reduce(v).empty(); }
  std::size_t dim() const { return rows_.size(); }
  std::vector<SparseVec> basis() const {
    std::vector<SparseVec> out;
    for (const auto& [p, r] : rows_) out.push_back(r);
    return out;
  }

 private:
  std::map<uint32_t, SparseVec> rows_;
};

/// Rank of the map induced on homology by a chain map f: X_n -> Y_n, given
/// a basis of cycles Z(X_n) and the incoming differential of Y at n.
inline std::size_t induced_rank(const SparseMatrix& f, const std::vector<SparseVec>& cycles,
                                const SparseMatrix& dy_in) {
  std::vector<SparseVec> cols = dy_in.columns();
  std::size_t base = dy_in.rank();
  for (const auto& z : cycles) cols.push_back(f.apply(z));
  return rank_of_vectors(std::move(cols), f.rows()) - base;
}

}  // namespace khh
