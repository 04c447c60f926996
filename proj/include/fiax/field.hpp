#pragma once

#include <gmpxx.h>

#include <cassert>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace fiax {

// Ground field for all computation: Q when p == 0, otherwise F_p, p prime.
struct Field {
  unsigned long p = 0;

  bool is_rational() const { return p == 0; }
  bool operator==(const Field& o) const { return p == o.p; }
  bool operator!=(const Field& o) const { return p != o.p; }
  std::string str() const { return p == 0 ? std::string("rational") : "p=" + std::to_string(p); }
};

// Exact scalar. Rational values use arbitrary-precision mpq; prime-field
// values keep the canonical representative in [0, p).
class Scalar {
 public:
  Scalar() = default;  // rational zero
  explicit Scalar(const Field& f) : fld_(f) {}
  Scalar(const Field& f, long v) : fld_(f) {
    if (f.is_rational())
      q_ = v;
    else
      r_ = reduce(v, f.p);
  }
  static Scalar from_mpq(mpq_class v) {
    Scalar s;
    s.q_ = std::move(v);
    s.q_.canonicalize();
    return s;
  }

  const Field& field() const { return fld_; }
  bool is_zero() const { return fld_.is_rational() ? q_ == 0 : r_ == 0; }
  bool is_one() const { return fld_.is_rational() ? q_ == 1 : r_ == 1; }

  Scalar& operator+=(const Scalar& o) {
    assert(fld_ == o.fld_);
    if (fld_.is_rational())
      q_ += o.q_;
    else {
      r_ += o.r_;
      if (r_ >= fld_.p) r_ -= fld_.p;
    }
    return *this;
  }
  Scalar& operator-=(const Scalar& o) {
    assert(fld_ == o.fld_);
    if (fld_.is_rational())
      q_ -= o.q_;
    else
      r_ = (r_ >= o.r_) ? r_ - o.r_ : r_ + fld_.p - o.r_;
    return *this;
  }
  Scalar& operator*=(const Scalar& o) {
    assert(fld_ == o.fld_);
    if (fld_.is_rational())
      q_ *= o.q_;
    else
      r_ = (unsigned long)(((unsigned __int128)r_ * o.r_) % fld_.p);
    return *this;
  }
  friend Scalar operator+(Scalar a, const Scalar& b) { return a += b; }
  friend Scalar operator-(Scalar a, const Scalar& b) { return a -= b; }
  friend Scalar operator*(Scalar a, const Scalar& b) { return a *= b; }
  friend Scalar operator/(Scalar a, const Scalar& b) { return a *= b.inv(); }
  Scalar operator-() const {
    Scalar s(fld_);
    return s -= *this;
  }
  bool operator==(const Scalar& o) const {
    assert(fld_ == o.fld_);
    return fld_.is_rational() ? q_ == o.q_ : r_ == o.r_;
  }
  bool operator!=(const Scalar& o) const { return !(*this == o); }

  Scalar inv() const {
    if (is_zero()) throw std::domain_error("Scalar: division by zero");
    if (fld_.is_rational()) return from_mpq(1 / q_);
    // extended Euclid on (r, p); p prime so any nonzero r is a unit
    long a = (long)r_, m = (long)fld_.p, x0 = 1, x1 = 0;
    long b = m;
    while (b != 0) {
      long t = a / b;
      a -= t * b;
      std::swap(a, b);
      x0 -= t * x1;
      std::swap(x0, x1);
    }
    Scalar s(fld_);
    s.r_ = reduce(x0, fld_.p);
    return s;
  }

  // Parses "n", "-n" or "a/b"; mod-p input is reduced canonically.
  static Scalar parse(const Field& f, const std::string& text);
  std::string str() const {
    return fld_.is_rational() ? q_.get_str() : std::to_string(r_);
  }

  const mpq_class& rat() const {
    assert(fld_.is_rational());
    return q_;
  }
  unsigned long rep() const {
    assert(!fld_.is_rational());
    return r_;
  }

 private:
  static unsigned long reduce(long v, unsigned long p) {
    long m = v % (long)p;
    return (unsigned long)(m < 0 ? m + (long)p : m);
  }
  Field fld_{};
  mpq_class q_{0};
  unsigned long r_ = 0;
};

inline Scalar Scalar::parse(const Field& f, const std::string& text) {
  auto slash = text.find('/');
  auto to_long = [](const std::string& s) {
    size_t pos = 0;
    long v = std::stol(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("bad integer: " + s);
    return v;
  };
  if (slash == std::string::npos) return Scalar(f, to_long(text));
  long num = to_long(text.substr(0, slash));
  long den = to_long(text.substr(slash + 1));
  if (den == 0) throw std::invalid_argument("zero denominator: " + text);
  return Scalar(f, num) / Scalar(f, den);
}

}  // namespace fiax
