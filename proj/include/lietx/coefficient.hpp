#pragma once

// Coefficient types for truncated series.
//
// Two coefficient rings are supported:
//   * Complex       -- std::complex<double>, the default for numeric runs;
//   * ExactComplex  -- Gaussian rationals p + i q with p, q arbitrary-precision
//                      rationals (GMP), used for identity checks without rounding.
//
// Generic code only uses the free functions below (is_zero, ratio, to_complex,
// ...) so both rings can be swapped through a template parameter.

#include <cctype>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>

#include <gmpxx.h>

namespace lietx {

using Complex = std::complex<double>;

/// Storage-pruning threshold for floating coefficients.
inline constexpr double kFloatZero = 1e-14;

class ExactComplex {
 public:
  ExactComplex() = default;
  ExactComplex(int v) : re_(v) {}  // NOLINT(google-explicit-constructor)
  ExactComplex(long v) : re_(v) {}  // NOLINT(google-explicit-constructor)
  ExactComplex(mpq_class re, mpq_class im = 0) : re_(std::move(re)), im_(std::move(im)) {
    re_.canonicalize();
    im_.canonicalize();
  }

  const mpq_class& real() const { return re_; }
  const mpq_class& imag() const { return im_; }

  bool is_zero() const { return sgn(re_) == 0 && sgn(im_) == 0; }

  ExactComplex& operator+=(const ExactComplex& o) {
    re_ += o.re_;
    im_ += o.im_;
    return *this;
  }
  ExactComplex& operator-=(const ExactComplex& o) {
    re_ -= o.re_;
    im_ -= o.im_;
    return *this;
  }
  ExactComplex& operator*=(const ExactComplex& o) {
    if (sgn(im_) == 0 && sgn(o.im_) == 0) {
      re_ *= o.re_;
      return *this;
    }
    mpq_class r = re_ * o.re_ - im_ * o.im_;
    mpq_class i = re_ * o.im_ + im_ * o.re_;
    re_ = std::move(r);
    im_ = std::move(i);
    return *this;
  }
  ExactComplex& operator/=(const ExactComplex& o) {
    if (o.is_zero()) throw std::domain_error("ExactComplex: division by zero");
    if (sgn(o.im_) == 0) {
      re_ /= o.re_;
      im_ /= o.re_;
      return *this;
    }
    mpq_class den = o.re_ * o.re_ + o.im_ * o.im_;
    mpq_class r = (re_ * o.re_ + im_ * o.im_) / den;
    mpq_class i = (im_ * o.re_ - re_ * o.im_) / den;
    re_ = std::move(r);
    im_ = std::move(i);
    return *this;
  }

  friend ExactComplex operator+(ExactComplex a, const ExactComplex& b) { return a += b; }
  friend ExactComplex operator-(ExactComplex a, const ExactComplex& b) { return a -= b; }
  friend ExactComplex operator*(ExactComplex a, const ExactComplex& b) { return a *= b; }
  friend ExactComplex operator/(ExactComplex a, const ExactComplex& b) { return a /= b; }
  friend ExactComplex operator-(const ExactComplex& a) { return ExactComplex(-a.re_, -a.im_); }
  friend bool operator==(const ExactComplex& a, const ExactComplex& b) {
    return a.re_ == b.re_ && a.im_ == b.im_;
  }
  friend bool operator!=(const ExactComplex& a, const ExactComplex& b) { return !(a == b); }

  friend std::ostream& operator<<(std::ostream& os, const ExactComplex& c) {
    return os << '(' << c.re_.get_str() << ',' << c.im_.get_str() << ')';
  }

 private:
  mpq_class re_{0};
  mpq_class im_{0};
};

template <class C>
inline constexpr bool is_exact_v = std::is_same_v<C, ExactComplex>;

inline bool is_zero(const Complex& c) { return std::abs(c) < kFloatZero; }
inline bool is_zero(const ExactComplex& c) { return c.is_zero(); }

inline Complex to_complex(const Complex& c) { return c; }
inline Complex to_complex(const ExactComplex& c) {
  return {c.real().get_d(), c.imag().get_d()};
}

inline double magnitude(const Complex& c) { return std::abs(c); }
inline double magnitude(const ExactComplex& c) { return std::abs(to_complex(c)); }

inline Complex conjugate(const Complex& c) { return std::conj(c); }
inline ExactComplex conjugate(const ExactComplex& c) { return {c.real(), -c.imag()}; }

/// p/q, formed exactly before conversion to the coefficient ring.
template <class C>
C ratio(long p, long q) {
  if (q == 0) throw std::domain_error("ratio: zero denominator");
  if constexpr (is_exact_v<C>) {
    mpq_class r(p, q);
    r.canonicalize();
    return C(r);
  } else {
    mpq_class r(p, q);
    r.canonicalize();
    return C(r.get_d(), 0.0);
  }
}

template <class C>
C from_rational(const mpq_class& q) {
  if constexpr (is_exact_v<C>) {
    return C(q);
  } else {
    return C(q.get_d(), 0.0);
  }
}

template <class C>
C from_rational(const mpq_class& re, const mpq_class& im) {
  if constexpr (is_exact_v<C>) {
    return C(re, im);
  } else {
    return C(re.get_d(), im.get_d());
  }
}

/// Converts a double; exact mode uses the exact binary value.
template <class C>
C from_complex(const Complex& z) {
  if constexpr (is_exact_v<C>) {
    return C(mpq_class(z.real()), mpq_class(z.imag()));
  } else {
    return z;
  }
}

template <class C>
C imaginary_unit() {
  if constexpr (is_exact_v<C>) {
    return C(mpq_class(0), mpq_class(1));
  } else {
    return C(0.0, 1.0);
  }
}

/// base^e for integer e (negative powers invert).
template <class C>
C power(const C& base, int e) {
  C result(1);
  C b = e < 0 ? C(1) / base : base;
  unsigned n = static_cast<unsigned>(e < 0 ? -e : e);
  while (n != 0) {
    if (n & 1U) result *= b;
    n >>= 1U;
    if (n != 0) b *= b;
  }
  return result;
}

/// Parses "p/q", "-3", "0.25", "1e-3" into an exact rational.
inline mpq_class parse_rational(std::string_view text) {
  std::string s(text);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  size_t start = 0;
  while (start < s.size() && std::isspace(static_cast<unsigned char>(s[start]))) ++start;
  s = s.substr(start);
  if (s.empty()) throw std::invalid_argument("parse_rational: empty string");
  if (auto slash = s.find('/'); slash != std::string::npos) {
    mpz_class num, den;
    if (num.set_str(s.substr(0, slash), 10) != 0 || den.set_str(s.substr(slash + 1), 10) != 0)
      throw std::invalid_argument("parse_rational: bad fraction '" + s + "'");
    if (den == 0) throw std::invalid_argument("parse_rational: zero denominator");
    mpq_class q(num, den);
    q.canonicalize();
    return q;
  }
  // decimal with optional exponent
  int exp10 = 0;
  std::string mant = s;
  if (auto e = s.find_first_of("eE"); e != std::string::npos) {
    mant = s.substr(0, e);
    exp10 = std::stoi(s.substr(e + 1));
  }
  bool neg = false;
  if (!mant.empty() && (mant[0] == '-' || mant[0] == '+')) {
    neg = mant[0] == '-';
    mant = mant.substr(1);
  }
  std::string digits;
  for (char ch : mant) {
    if (ch == '.') {
      continue;
    }
    if (!std::isdigit(static_cast<unsigned char>(ch)))
      throw std::invalid_argument("parse_rational: bad number '" + s + "'");
    digits.push_back(ch);
  }
  if (digits.empty()) throw std::invalid_argument("parse_rational: bad number '" + s + "'");
  if (auto dot = mant.find('.'); dot != std::string::npos) exp10 -= static_cast<int>(mant.size() - dot - 1);
  mpz_class num(digits, 10);
  if (neg) num = -num;
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(std::abs(exp10)));
  mpq_class q = exp10 >= 0 ? mpq_class(num * scale) : mpq_class(num, scale);
  q.canonicalize();
  return q;
}

}  // namespace lietx
