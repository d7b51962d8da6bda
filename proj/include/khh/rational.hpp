#pragma once

// Exact rationals with a machine-word fast path.
//
// Values whose numerator and denominator fit in int64 are stored inline;
// anything larger is promoted to a GMP mpq and demoted again as soon as it
// fits.  Bar-complex matrices are dominated by small integers, so almost
// all elimination traffic stays on the inline path.

#include <gmpxx.h>

#include <cstdint>
#include <memory>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace khh {

namespace detail {

inline unsigned __int128 gcd_u128(unsigned __int128 a, unsigned __int128 b) {
  while (b != 0) {
    unsigned __int128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

inline unsigned __int128 abs_i128(__int128 v) {
  return v < 0 ? static_cast<unsigned __int128>(-(v + 1)) + 1
               : static_cast<unsigned __int128>(v);
}

inline bool fits_i64(__int128 v) {
  return v >= static_cast<__int128>(INT64_MIN) && v <= static_cast<__int128>(INT64_MAX);
}

inline void set_mpz_i128(mpz_class& z, __int128 v) {
  bool neg = v < 0;
  unsigned __int128 u = abs_i128(v);
  auto hi = static_cast<uint64_t>(u >> 64);
  auto lo = static_cast<uint64_t>(u);
  mpz_import(z.get_mpz_t(), 1, 1, sizeof(uint64_t), 0, 0, &hi);
  z <<= 64;
  mpz_class l;
  mpz_import(l.get_mpz_t(), 1, 1, sizeof(uint64_t), 0, 0, &lo);
  z += l;
  if (neg) z = -z;
}

}  // namespace detail

class Rational {
 public:
  Rational() = default;
  Rational(long long n) : num_(n) {}  // NOLINT(implicit)
  Rational(int n) : num_(n) {}        // NOLINT(implicit)
  Rational(long long n, long long d) {
    if (d == 0) throw std::domain_error("Rational: zero denominator");
    assign_i128(n, d);
  }
  explicit Rational(const mpq_class& q) { assign_mpq(q); }

  Rational(const Rational& o) : num_(o.num_), den_(o.den_) {
    if (o.big_) big_ = std::make_unique<mpq_class>(*o.big_);
  }
  Rational(Rational&&) noexcept = default;
  Rational& operator=(const Rational& o) {
    if (this != &o) {
      num_ = o.num_;
      den_ = o.den_;
      big_ = o.big_ ? std::make_unique<mpq_class>(*o.big_) : nullptr;
    }
    return *this;
  }
  Rational& operator=(Rational&&) noexcept = default;

  /// Parses "p", "-p", "p/q".
  static Rational parse(std::string_view s) {
    std::string str(s);
    mpq_class q;
    if (q.set_str(str, 10) != 0) throw std::invalid_argument("Rational: cannot parse '" + str + "'");
    if (q.get_den() == 0) throw std::domain_error("Rational: zero denominator");
    q.canonicalize();
    return Rational(q);
  }

  bool is_zero() const { return !big_ && num_ == 0; }
  bool is_one() const { return !big_ && num_ == 1 && den_ == 1; }
  /// |value| == 1
  bool is_unit() const { return !big_ && den_ == 1 && (num_ == 1 || num_ == -1); }
  bool is_small() const { return !big_; }
  bool is_integer() const { return big_ ? big_->get_den() == 1 : den_ == 1; }
  int sign() const {
    if (big_) return sgn(*big_);
    return num_ > 0 ? 1 : (num_ < 0 ? -1 : 0);
  }

  mpq_class to_mpq() const {
    if (big_) return *big_;
    mpq_class q;
    mpz_set_si(q.get_num_mpz_t(), num_);
    mpz_set_si(q.get_den_mpz_t(), den_);
    return q;
  }
  mpz_class numerator() const { return to_mpq().get_num(); }
  mpz_class denominator() const { return to_mpq().get_den(); }

  std::string str() const {
    if (big_) return big_->get_str();
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

  Rational operator-() const {
    Rational r(*this);
    if (r.big_) {
      *r.big_ = -*r.big_;
    } else if (r.num_ == INT64_MIN) {
      r.assign_i128(-static_cast<__int128>(r.num_), r.den_);
    } else {
      r.num_ = -r.num_;
    }
    return r;
  }

  friend Rational operator+(const Rational& a, const Rational& b) {
    if (!a.big_ && !b.big_) {
      if (a.den_ == 1 && b.den_ == 1) {
        Rational r;
        r.assign_i128(static_cast<__int128>(a.num_) + b.num_, 1);
        return r;
      }
      __int128 n = static_cast<__int128>(a.num_) * b.den_ + static_cast<__int128>(b.num_) * a.den_;
      __int128 d = static_cast<__int128>(a.den_) * b.den_;
      Rational r;
      r.assign_i128(n, d);
      return r;
    }
    return Rational(mpq_class(a.to_mpq() + b.to_mpq()));
  }
  friend Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }
  friend Rational operator*(const Rational& a, const Rational& b) {
    if (!a.big_ && !b.big_) {
      if (a.num_ == 0 || b.num_ == 0) return Rational();
      __int128 n = static_cast<__int128>(a.num_) * b.num_;
      __int128 d = static_cast<__int128>(a.den_) * b.den_;
      Rational r;
      r.assign_i128(n, d);
      return r;
    }
    return Rational(mpq_class(a.to_mpq() * b.to_mpq()));
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.is_zero()) throw std::domain_error("Rational: division by zero");
    if (!a.big_ && !b.big_) {
      __int128 n = static_cast<__int128>(a.num_) * b.den_;
      __int128 d = static_cast<__int128>(a.den_) * b.num_;
      Rational r;
      r.assign_i128(n, d);
      return r;
    }
    return Rational(mpq_class(a.to_mpq() / b.to_mpq()));
  }
  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }
  Rational& operator/=(const Rational& o) { return *this = *this / o; }

  friend bool operator==(const Rational& a, const Rational& b) {
    if (!a.big_ && !b.big_) return a.num_ == b.num_ && a.den_ == b.den_;
    if (a.big_ && b.big_) return *a.big_ == *b.big_;
    return false;  // canonical: a value is big iff it does not fit
  }
  friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
  friend bool operator<(const Rational& a, const Rational& b) {
    if (!a.big_ && !b.big_)
      return static_cast<__int128>(a.num_) * b.den_ < static_cast<__int128>(b.num_) * a.den_;
    return a.to_mpq() < b.to_mpq();
  }
  friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
  friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
  friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

 private:
  void assign_i128(__int128 n, __int128 d) {
    big_.reset();
    if (d < 0) {
      n = -n;
      d = -d;
    }
    if (n == 0) {
      num_ = 0;
      den_ = 1;
      return;
    }
    if (d != 1) {
      unsigned __int128 g = detail::gcd_u128(detail::abs_i128(n), static_cast<unsigned __int128>(d));
      if (g > 1) {
        n /= static_cast<__int128>(g);
        d /= static_cast<__int128>(g);
      }
    }
    if (detail::fits_i64(n) && detail::fits_i64(d)) {
      num_ = static_cast<int64_t>(n);
      den_ = static_cast<int64_t>(d);
      return;
    }
    mpq_class q;
    detail::set_mpz_i128(q.get_num(), n);
    detail::set_mpz_i128(q.get_den(), d);
    num_ = 0;
    den_ = 1;
    big_ = std::make_unique<mpq_class>(std::move(q));
  }

  void assign_mpq(const mpq_class& q) {
    if (mpz_fits_slong_p(q.get_num_mpz_t()) && mpz_fits_slong_p(q.get_den_mpz_t())) {
      num_ = mpz_get_si(q.get_num_mpz_t());
      den_ = mpz_get_si(q.get_den_mpz_t());
      big_.reset();
    } else {
      num_ = 0;
      den_ = 1;
      big_ = std::make_unique<mpq_class>(q);
    }
  }

  int64_t num_ = 0;
  int64_t den_ = 1;
  std::unique_ptr<mpq_class> big_;
};

}  // namespace khh
