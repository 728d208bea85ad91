#pragma once

// Deterministic random series and fields with small rational coefficients, so
// the same draw is exact in rational mode and exactly representable in float mode.

#include <cstdint>
#include <random>
#include <vector>

#include "lietx/lietx.hpp"

namespace lietx::testing {

class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}

  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen_); }

  /// p/q + i p'/q' with |p| <= 4, q in {1, 2, 4}; imaginary part only when complex.
  template <class C>
  C coefficient(bool complex = true) {
    auto part = [this]() {
      int p = integer(-4, 4);
      if (p == 0) p = 1;
      return mpq_class(p, 1 << integer(0, 2));
    };
    mpq_class re = part();
    mpq_class im = complex && integer(0, 1) ? part() : mpq_class(0);
    re.canonicalize();
    im.canonicalize();
    return from_rational<C>(re, im);
  }

 private:
  std::mt19937_64 gen_;
};

/// Random exponent of total degree d over the polynomial variables.
inline Exponent random_monomial(Rng& rng, Layout layout, int degree) {
  Exponent e;
  for (int i = 0; i < degree; ++i) {
    const int lane = layout.angles + rng.integer(0, layout.vars - 1);
    e.set(lane, e[lane] + 1);
  }
  return e;
}

template <class C>
Series<C> random_homogeneous(Rng& rng, Layout layout, int degree, int terms) {
  Series<C> f(layout);
  for (int t = 0; t < terms; ++t) f.add(random_monomial(rng, layout, degree), rng.coefficient<C>());
  return f;
}

template <class C>
Field<C> random_poly_field(Rng& rng, Layout layout, int degree, int terms) {
  Field<C> v(layout);
  for (int j = 0; j < layout.size(); ++j) v[j] = random_homogeneous<C>(rng, layout, degree, terms);
  return v;
}

/// X_s homogeneous of degree s + 1.
template <class C>
GeneratingSequence<C> random_poly_sequence(Rng& rng, Layout layout, int N, int terms) {
  GeneratingSequence<C> X = zero_sequence<C>(layout, N);
  for (int s = 1; s <= N; ++s) X[s] = random_poly_field<C>(rng, layout, s + 1, terms);
  return X;
}

/// Scalar with piece p homogeneous of degree base + p.
template <class C>
Graded<Series<C>> random_graded_scalar(Rng& rng, Layout layout, int N, int base, int terms) {
  Graded<Series<C>> g(N, Series<C>(layout));
  for (int p = 0; p <= N; ++p) g[p] = random_homogeneous<C>(rng, layout, base + p, terms);
  return g;
}

template <class C>
Graded<Field<C>> random_graded_field(Rng& rng, Layout layout, int N, int base, int terms) {
  Graded<Field<C>> g(N, Field<C>(layout));
  for (int p = 0; p <= N; ++p) g[p] = random_poly_field<C>(rng, layout, base + p, terms);
  return g;
}

/// Random Fourier-Taylor exponent: modes in [-K, K], action degree <= degree.
inline Exponent random_fourier_monomial(Rng& rng, Layout layout, int K, int degree) {
  Exponent e;
  for (int j = 0; j < layout.angles; ++j) e.set(j, rng.integer(-K, K));
  const int d = rng.integer(0, degree);
  for (int i = 0; i < d && layout.vars > 0; ++i) {
    const int lane = layout.angles + rng.integer(0, layout.vars - 1);
    e.set(lane, e[lane] + 1);
  }
  return e;
}

template <class C>
Series<C> random_fourier_series(Rng& rng, Layout layout, int K, int degree, int terms, bool real = false) {
  Series<C> f(layout);
  for (int t = 0; t < terms; ++t) {
    const Exponent e = random_fourier_monomial(rng, layout, K, degree);
    const C c = rng.coefficient<C>();
    f.add(e, c);
    if (real) f.add(e.negated_prefix(layout.angles), conjugate(c));
  }
  return f;
}

template <class C>
Field<C> random_fourier_field(Rng& rng, Layout layout, int K, int degree, int terms, bool real = false) {
  Field<C> v(layout);
  for (int j = 0; j < layout.size(); ++j) v[j] = random_fourier_series<C>(rng, layout, K, degree, terms, real);
  return v;
}

/// Fourier series with c_{-k} = sign * c_k (sign = +1 even, -1 odd in the angles).
template <class C>
Series<C> random_parity_series(Rng& rng, Layout layout, int K, int degree, int terms, int sign) {
  Series<C> f(layout);
  for (int t = 0; t < terms; ++t) {
    const Exponent e = random_fourier_monomial(rng, layout, K, degree);
    const C c = rng.coefficient<C>();
    f.add(e, c);
    f.add(e.negated_prefix(layout.angles), sign > 0 ? c : C(0) - c);
  }
  return f;
}

/// Field of type (+,-) (plus = true) or (-,+).
template <class C>
Field<C> random_typed_field(Rng& rng, Layout layout, int K, int degree, int terms, bool plus) {
  Field<C> v(layout);
  for (int j = 0; j < layout.size(); ++j) {
    const bool angle = j < layout.angles;
    v[j] = random_parity_series<C>(rng, layout, K, degree, terms, (angle == plus) ? 1 : -1);
  }
  return v;
}

/// Order-s Fourier-Taylor generating sequence with |k| <= s K1.
template <class C>
GeneratingSequence<C> random_fourier_sequence(Rng& rng, Layout layout, int N, int K1, int degree, int terms) {
  GeneratingSequence<C> X = zero_sequence<C>(layout, N);
  for (int s = 1; s <= N; ++s) X[s] = random_fourier_field<C>(rng, layout, K1, degree, terms);
  return X;
}

}  // namespace lietx::testing
