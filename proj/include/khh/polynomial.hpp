#pragma once

// Commutative polynomials over Q in named generators with positive weights,
// ordered by weighted graded reverse lexicographic order.

#include "khh/error.hpp"
#include "khh/rational.hpp"

#include <cctype>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace khh {

using Monomial = std::vector<int>;

struct PolyRing {
  std::vector<std::string> symbols;
  std::vector<int> weights;

  std::size_t nvars() const { return symbols.size(); }
  int weight(const Monomial& m) const {
    int w = 0;
    for (std::size_t i = 0; i < m.size(); ++i) w += m[i] * weights[i];
    return w;
  }
  int index_of(std::string_view s) const {
    for (std::size_t i = 0; i < symbols.size(); ++i)
      if (symbols[i] == s) return static_cast<int>(i);
    return -1;
  }
  Monomial one() const { return Monomial(nvars(), 0); }
};

/// a > b in weighted grevlex with generators ranked by increasing index:
/// larger weight first; on ties the monomial with the smaller exponent in
/// the first differing generator is larger.  In the cusp, y^2 > x^3.
struct MonomialGreater {
  std::shared_ptr<const std::vector<int>> weights;
  bool operator()(const Monomial& a, const Monomial& b) const {
    int wa = 0, wb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      wa += a[i] * (*weights)[i];
      wb += b[i] * (*weights)[i];
    }
    if (wa != wb) return wa > wb;
    for (std::size_t i = 0; i < a.size(); ++i)
      if (a[i] != b[i]) return a[i] < b[i];
    return false;
  }
};

inline bool divides(const Monomial& a, const Monomial& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] > b[i]) return false;
  return true;
}
inline Monomial mono_mul(const Monomial& a, const Monomial& b) {
  Monomial m(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) m[i] = a[i] + b[i];
  return m;
}
inline Monomial mono_div(const Monomial& a, const Monomial& b) {
  Monomial m(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) m[i] = a[i] - b[i];
  return m;
}
inline Monomial mono_lcm(const Monomial& a, const Monomial& b) {
  Monomial m(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) m[i] = std::max(a[i], b[i]);
  return m;
}

class Polynomial {
 public:
  using Terms = std::map<Monomial, Rational, MonomialGreater>;

  explicit Polynomial(std::shared_ptr<const PolyRing> ring)
      : ring_(std::move(ring)),
        terms_(MonomialGreater{std::make_shared<const std::vector<int>>(ring_->weights)}) {}

  static Polynomial constant(std::shared_ptr<const PolyRing> ring, const Rational& c) {
    Polynomial p(ring);
    if (!c.is_zero()) p.terms_.emplace(ring->one(), c);
    return p;
  }
  static Polynomial monomial(std::shared_ptr<const PolyRing> ring, Monomial m, const Rational& c = Rational(1)) {
    Polynomial p(std::move(ring));
    if (!c.is_zero()) p.terms_.emplace(std::move(m), c);
    return p;
  }
  static Polynomial generator(std::shared_ptr<const PolyRing> ring, std::size_t i) {
    Monomial m = ring->one();
    m[i] = 1;
    return monomial(std::move(ring), std::move(m));
  }

  const std::shared_ptr<const PolyRing>& ring() const { return ring_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  const Monomial& leading_monomial() const { return terms_.begin()->first; }
  const Rational& leading_coefficient() const { return terms_.begin()->second; }

  Rational coefficient(const Monomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? Rational() : it->second;
  }

  void add_term(const Monomial& m, const Rational& c) {
    if (c.is_zero()) return;
    auto [it, inserted] = terms_.emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  /// Weight of every term, or -1 if the polynomial is inhomogeneous or zero.
  int homogeneous_weight() const {
    if (terms_.empty()) return -1;
    int w = ring_->weight(terms_.begin()->first);
    for (const auto& [m, c] : terms_)
      if (ring_->weight(m) != w) return -1;
    return w;
  }

  Polynomial operator-() const {
    Polynomial r(ring_);
    for (const auto& [m, c] : terms_) r.terms_.emplace(m, -c);
    return r;
  }
  friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    Polynomial r = a;
    for (const auto& [m, c] : b.terms_) r.add_term(m, c);
    return r;
  }
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b) {
    Polynomial r = a;
    for (const auto& [m, c] : b.terms_) r.add_term(m, -c);
    return r;
  }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    Polynomial r(a.ring_);
    for (const auto& [ma, ca] : a.terms_)
      for (const auto& [mb, cb] : b.terms_) r.add_term(mono_mul(ma, mb), ca * cb);
    return r;
  }
  Polynomial scaled(const Rational& s, const Monomial& shift) const {
    Polynomial r(ring_);
    if (s.is_zero()) return r;
    for (const auto& [m, c] : terms_) r.terms_.emplace(mono_mul(m, shift), c * s);
    return r;
  }
  Polynomial pow(int e) const {
    Polynomial r = constant(ring_, Rational(1));
    for (int i = 0; i < e; ++i) r = r * *this;
    return r;
  }

  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    if (a.terms_.size() != b.terms_.size()) return false;
    auto i = a.terms_.begin();
    auto j = b.terms_.begin();
    for (; i != a.terms_.end(); ++i, ++j)
      if (i->first != j->first || i->second != j->second) return false;
    return true;
  }
  friend bool operator!=(const Polynomial& a, const Polynomial& b) { return !(a == b); }

  std::string str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [m, c] : terms_) {
      bool is_const = true;
      for (int e : m) is_const = is_const && e == 0;
      Rational a = c.sign() < 0 ? -c : c;
      if (first) {
        if (c.sign() < 0) os << "-";
      } else {
        os << (c.sign() < 0 ? " - " : " + ");
      }
      if (is_const) {
        os << a.str();
      } else {
        if (!a.is_one()) os << a.str() << "*";
        bool firstvar = true;
        for (std::size_t i = 0; i < m.size(); ++i) {
          if (m[i] == 0) continue;
          if (!firstvar) os << "*";
          os << ring_->symbols[i];
          if (m[i] > 1) os << "^" << m[i];
          firstvar = false;
        }
      }
      first = false;
    }
    return os.str();
  }

 private:
  std::shared_ptr<const PolyRing> ring_;
  Terms terms_;
};

/// Recursive-descent parser for polynomial expressions:
///   expr := ['+'|'-'] term (('+'|'-') term)*
///   term := factor (['*'] factor)*
///   factor := primary ['^' integer]
///   primary := integer ['/' integer] | symbol | '(' expr ')'
class PolynomialParser {
 public:
  PolynomialParser(std::shared_ptr<const PolyRing> ring, std::string_view text, int line, int column_offset)
      : ring_(std::move(ring)), s_(text), line_(line), col0_(column_offset) {}

  Polynomial parse() {
    Polynomial p = expr();
    skip_ws();
    if (pos_ < s_.size()) fail("unexpected character '" + std::string(1, s_[pos_]) + "'");
    return p;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, line_, col0_ + static_cast<int>(pos_) + 1);
  }
  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool peek(char c) {
    skip_ws();
    return pos_ < s_.size() && s_[pos_] == c;
  }
  bool starts_factor() {
    skip_ws();
    if (pos_ >= s_.size()) return false;
    char c = s_[pos_];
    return std::isdigit(static_cast<unsigned char>(c)) || std::isalpha(static_cast<unsigned char>(c)) ||
           c == '_' || c == '(';
  }

  Polynomial expr() {
    Polynomial acc(ring_);
    bool neg = false;
    if (peek('+')) {
      ++pos_;
    } else if (peek('-')) {
      ++pos_;
      neg = true;
    }
    Polynomial t = term();
    acc = neg ? -t : t;
    while (true) {
      if (peek('+')) {
        ++pos_;
        acc = acc + term();
      } else if (peek('-')) {
        ++pos_;
        acc = acc - term();
      } else {
        break;
      }
    }
    return acc;
  }

  Polynomial term() {
    Polynomial acc = factor();
    while (true) {
      if (peek('*')) {
        ++pos_;
        acc = acc * factor();
      } else if (starts_factor()) {
        acc = acc * factor();
      } else {
        break;
      }
    }
    return acc;
  }

  Polynomial factor() {
    Polynomial base = primary();
    if (peek('^')) {
      ++pos_;
      skip_ws();
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (start == pos_) fail("expected exponent after '^'");
      int e = std::stoi(std::string(s_.substr(start, pos_ - start)));
      base = base.pow(e);
    }
    return base;
  }

  Polynomial primary() {
    skip_ws();
    if (pos_ >= s_.size()) fail("unexpected end of expression");
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      Polynomial p = expr();
      if (!peek(')')) fail("expected ')'");
      ++pos_;
      return p;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      std::string num(s_.substr(start, pos_ - start));
      if (pos_ < s_.size() && s_[pos_] == '/') {
        ++pos_;
        std::size_t ds = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (ds == pos_) fail("expected denominator after '/'");
        num += "/" + std::string(s_.substr(ds, pos_ - ds));
      }
      Rational r;
      try {
        r = Rational::parse(num);
      } catch (const std::exception&) {
        fail("bad number '" + num + "'");
      }
      return Polynomial::constant(ring_, r);
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
        ++pos_;
      std::string sym(s_.substr(start, pos_ - start));
      int idx = ring_->index_of(sym);
      if (idx < 0) {
        pos_ = start;
        fail("unknown generator '" + sym + "'");
      }
      return Polynomial::generator(ring_, static_cast<std::size_t>(idx));
    }
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  std::shared_ptr<const PolyRing> ring_;
  std::string_view s_;
  std::size_t pos_ = 0;
  int line_;
  int col0_;
};

inline Polynomial parse_polynomial(std::shared_ptr<const PolyRing> ring, std::string_view text, int line = 1,
                                   int column_offset = 0) {
  return PolynomialParser(std::move(ring), text, line, column_offset).parse();
}

}  // namespace khh
