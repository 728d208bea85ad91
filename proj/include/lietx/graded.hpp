#pragma once

// Order-graded containers.
//
// Graded<T> holds one piece per perturbation order s = 0..N. For polynomial
// generating fields the order-s piece is homogeneous of degree s+1; for
// Fourier-Taylor data the order is the power of the small parameter. Targets
// (functions, fields, coordinate images) are graded by the number of order
// units carried, so that an operator raising order by s moves piece p to p+s.

#include <algorithm>
#include <span>
#include <stdexcept>
#include <vector>

#include "lietx/image.hpp"

namespace lietx {

template <class T>
class Graded {
 public:
  Graded() = default;
  Graded(int max_order, const T& zero) : pieces_(static_cast<size_t>(max_order + 1), zero) {
    if (max_order < 0) throw std::invalid_argument("Graded: negative max order");
  }
  /// Graded object with `value` at order `at` and zeros elsewhere.
  static Graded single(int max_order, const T& value, int at = 0) {
    Graded g(max_order, T::zero(value.layout()));
    if (at <= max_order) g[at] = value;
    return g;
  }

  int max_order() const { return static_cast<int>(pieces_.size()) - 1; }
  const Layout& layout() const { return pieces_.front().layout(); }

  T& operator[](int s) { return pieces_.at(static_cast<size_t>(s)); }
  const T& operator[](int s) const { return pieces_.at(static_cast<size_t>(s)); }

  auto begin() const { return pieces_.begin(); }
  auto end() const { return pieces_.end(); }

  bool empty() const {
    return std::all_of(pieces_.begin(), pieces_.end(), [](const T& t) { return t.empty(); });
  }

  T zero_piece() const { return T::zero(layout()); }

  Graded& operator+=(const Graded& o) {
    const int n = std::min(max_order(), o.max_order());
    pieces_.resize(static_cast<size_t>(n + 1));
    for (int s = 0; s <= n; ++s) (*this)[s] += o[s];
    return *this;
  }
  Graded& operator-=(const Graded& o) {
    const int n = std::min(max_order(), o.max_order());
    pieces_.resize(static_cast<size_t>(n + 1));
    for (int s = 0; s <= n; ++s) (*this)[s] -= o[s];
    return *this;
  }
  template <class S>
  Graded& operator*=(const S& c) {
    for (auto& p : pieces_) p *= c;
    return *this;
  }
  friend Graded operator+(Graded a, const Graded& b) { return a += b; }
  friend Graded operator-(Graded a, const Graded& b) { return a -= b; }

  Graded truncated(int max_order) const {
    Graded g = *this;
    if (max_order < g.max_order()) g.pieces_.resize(static_cast<size_t>(max_order + 1));
    return g;
  }

  /// Copy with exactly max_order + 1 pieces (zero padded or truncated).
  Graded resized(int max_order) const {
    Graded g(max_order, zero_piece());
    for (int s = 0; s <= std::min(max_order, this->max_order()); ++s) g[s] = (*this)[s];
    return g;
  }

  /// Sum of all pieces.
  T flatten() const {
    T out = zero_piece();
    for (const auto& p : pieces_) out += p;
    return out;
  }

 private:
  std::vector<T> pieces_;
};

/// Per-order max |a_s - b_s| over orders both objects carry.
template <class T>
std::vector<double> order_differences(const Graded<T>& a, const Graded<T>& b) {
  const int n = std::min(a.max_order(), b.max_order());
  std::vector<double> d(static_cast<size_t>(n + 1));
  for (int s = 0; s <= n; ++s) d[static_cast<size_t>(s)] = max_abs_difference(a[s], b[s]);
  return d;
}

template <class T>
double max_abs_difference(const Graded<T>& a, const Graded<T>& b) {
  double m = 0.0;
  for (double d : order_differences(a, b)) m = std::max(m, d);
  return m;
}

/// Graded product of scalar series truncated at the smaller max order.
template <class C>
Graded<Series<C>> product(const Graded<Series<C>>& a, const Graded<Series<C>>& b) {
  const int n = std::min(a.max_order(), b.max_order());
  Graded<Series<C>> r(n, Series<C>(a.layout()));
  for (int p = 0; p <= n; ++p) {
    if (a[p].empty()) continue;
    for (int q = 0; p + q <= n; ++q) {
      if (b[q].empty()) continue;
      r[p + q] += a[p] * b[q];
    }
  }
  return r;
}

/// Graded commutator truncated at the smaller max order.
template <class C>
Graded<Field<C>> commutator(const Graded<Field<C>>& a, const Graded<Field<C>>& b) {
  const int n = std::min(a.max_order(), b.max_order());
  Graded<Field<C>> r(n, Field<C>(a.layout()));
  for (int p = 0; p <= n; ++p) {
    if (a[p].empty()) continue;
    for (int q = 0; p + q <= n; ++q) {
      if (b[q].empty()) continue;
      r[p + q] += commutator(a[p], b[q]);
    }
  }
  return r;
}

/// Numeric value sum_s eps^s piece_s(point).
template <class T>
std::vector<Complex> evaluate(const Graded<T>& g, std::span<const Complex> point, double eps = 1.0) {
  std::vector<Complex> out;
  double w = 1.0;
  for (int s = 0; s <= g.max_order(); ++s, w *= eps) {
    if (g[s].empty()) continue;
    auto v = evaluate(g[s], point);
    if (out.empty()) out.assign(v.size(), Complex(0.0, 0.0));
    for (size_t j = 0; j < v.size(); ++j) out[j] += w * v[j];
  }
  if (out.empty()) out.assign(static_cast<size_t>(g.layout().size()), Complex(0.0, 0.0));
  return out;
}

}  // namespace lietx
