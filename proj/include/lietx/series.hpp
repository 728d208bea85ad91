#pragma once

// Sparse scalar series on T^angles x C^vars:
//
//   f(phi, x) = sum_{(k, a)} c_{k,a} exp(i <k, phi>) x^a
//
// With angles == 0 this is an ordinary sparse multivariate polynomial. Terms
// are keyed by packed exponents; zero coefficients are never stored.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "lietx/coefficient.hpp"
#include "lietx/exponent.hpp"

namespace lietx {

template <class C>
class Series {
 public:
  using Coefficient = C;
  using Terms = std::map<Exponent, C>;

  Series() = default;
  explicit Series(Layout layout) : layout_(layout) {
    if (layout.size() > Exponent::kMaxLanes)
      throw DimensionError("Series: at most " + std::to_string(Exponent::kMaxLanes) + " variables");
  }

  static Series zero(Layout layout) { return Series(layout); }

  static Series constant(Layout layout, const C& c) {
    Series s(layout);
    s.add(Exponent{}, c);
    return s;
  }

  /// Polynomial variable x_var (var indexes the polynomial block).
  static Series variable(Layout layout, int var, const C& c = C(1)) {
    Exponent e;
    e.set(layout.angles + var, 1);
    return monomial(layout, e, c);
  }

  static Series monomial(Layout layout, const Exponent& e, const C& c) {
    Series s(layout);
    s.add(e, c);
    return s;
  }

  const Layout& layout() const { return layout_; }
  const Terms& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  size_t size() const { return terms_.size(); }

  C coefficient(const Exponent& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? C(0) : it->second;
  }

  void add(const Exponent& e, const C& c) {
    if (is_zero(c)) return;
    auto [it, inserted] = terms_.try_emplace(e, c);
    if (!inserted) {
      it->second += c;
      if (is_zero(it->second)) terms_.erase(it);
    }
  }

  /// Replaces the coefficient (removing it when zero).
  void set(const Exponent& e, const C& c) {
    if (is_zero(c))
      terms_.erase(e);
    else
      terms_[e] = c;
  }

  Series& operator+=(const Series& o) {
    require_same(layout_, o.layout_, "Series::+=");
    for (const auto& [e, c] : o.terms_) add(e, c);
    return *this;
  }
  Series& operator-=(const Series& o) {
    require_same(layout_, o.layout_, "Series::-=");
    for (const auto& [e, c] : o.terms_) add(e, -c);
    return *this;
  }
  Series& operator*=(const C& s) {
    if (is_zero(s)) {
      terms_.clear();
      return *this;
    }
    for (auto it = terms_.begin(); it != terms_.end();) {
      it->second *= s;
      if (is_zero(it->second))
        it = terms_.erase(it);
      else
        ++it;
    }
    return *this;
  }

  friend Series operator+(Series a, const Series& b) { return a += b; }
  friend Series operator-(Series a, const Series& b) { return a -= b; }
  friend Series operator-(Series a) {
    for (auto& [e, c] : a.terms_) c = -c;
    return a;
  }
  friend Series operator*(const C& s, Series a) { return a *= s; }
  friend Series operator*(Series a, const C& s) { return a *= s; }

  friend Series operator*(const Series& a, const Series& b) {
    require_same(a.layout_, b.layout_, "Series::*");
    Series r(a.layout_);
    if (a.empty() || b.empty()) return r;
    for (const auto& [ea, ca] : a.terms_) {
      for (const auto& [eb, cb] : b.terms_) {
        auto [it, inserted] = r.terms_.try_emplace(ea + eb, ca * cb);
        if (!inserted) it->second += ca * cb;
      }
    }
    r.prune();
    return r;
  }

  friend bool operator==(const Series& a, const Series& b) {
    return a.layout_ == b.layout_ && a.terms_ == b.terms_;
  }

  /// Partial derivative along coordinate l: i k_l on angle lanes, d/dx on polynomial lanes.
  Series derivative(int l) const {
    if (l < 0 || l >= layout_.size()) throw DimensionError("Series::derivative: coordinate out of range");
    Series r(layout_);
    if (layout_.is_angle(l)) {
      const C iu = imaginary_unit<C>();
      for (const auto& [e, c] : terms_) {
        if (e[l] == 0) continue;
        r.terms_.emplace(e, c * iu * C(e[l]));
      }
    } else {
      for (const auto& [e, c] : terms_) {
        const int p = e[l];
        if (p == 0) continue;
        Exponent d = e;
        d.set(l, p - 1);
        r.terms_.emplace(d, c * C(p));
      }
    }
    r.prune();
    return r;
  }

  /// Total degree in the polynomial block of one exponent.
  int term_degree(const Exponent& e) const {
    int d = 0;
    for (int l = layout_.angles; l < layout_.size(); ++l) d += e[l];
    return d;
  }

  /// Max polynomial degree, -1 when empty.
  int degree() const {
    int d = -1;
    for (const auto& [e, c] : terms_) d = std::max(d, term_degree(e));
    return d;
  }

  bool homogeneous(int d) const {
    for (const auto& [e, c] : terms_)
      if (term_degree(e) != d) return false;
    return true;
  }

  /// max |k|_1 over stored Fourier indices.
  int max_mode() const {
    int m = 0;
    for (const auto& [e, c] : terms_) m = std::max(m, e.abs_sum(0, layout_.angles));
    return m;
  }

  /// Drops terms of polynomial degree > max_degree; returns the number dropped.
  size_t truncate_degree(int max_degree) {
    size_t dropped = 0;
    for (auto it = terms_.begin(); it != terms_.end();) {
      if (term_degree(it->first) > max_degree) {
        it = terms_.erase(it);
        ++dropped;
      } else {
        ++it;
      }
    }
    return dropped;
  }

  /// Drops Fourier modes with |k|_1 > cutoff; returns the number dropped.
  size_t truncate_modes(int cutoff) {
    size_t dropped = 0;
    for (auto it = terms_.begin(); it != terms_.end();) {
      if (it->first.abs_sum(0, layout_.angles) > cutoff) {
        it = terms_.erase(it);
        ++dropped;
      } else {
        ++it;
      }
    }
    return dropped;
  }

  /// Terms whose polynomial degree equals d.
  Series degree_part(int d) const {
    Series r(layout_);
    for (const auto& [e, c] : terms_)
      if (term_degree(e) == d) r.terms_.emplace(e, c);
    return r;
  }

  /// f(-phi, x).
  Series reflected() const {
    Series r(layout_);
    for (const auto& [e, c] : terms_) r.terms_.emplace(e.negated_prefix(layout_.angles), c);
    return r;
  }

  /// Real on the real torus with real actions: c_{-k,a} = conj(c_{k,a}).
  bool is_real() const {
    for (const auto& [e, c] : terms_) {
      if (!is_zero(coefficient(e.negated_prefix(layout_.angles)) - conjugate(c))) return false;
    }
    return true;
  }

  /// Value at a point; the first `angles` entries are angles, the rest polynomial variables.
  Complex evaluate(std::span<const Complex> point) const {
    if (static_cast<int>(point.size()) != layout_.size())
      throw DimensionError("Series::evaluate: point dimension mismatch");
    Complex sum(0.0, 0.0);
    for (const auto& [e, c] : terms_) {
      Complex t = to_complex(c);
      Complex phase_arg(0.0, 0.0);
      for (int l = 0; l < layout_.angles; ++l) phase_arg += static_cast<double>(e[l]) * point[l];
      if (layout_.angles > 0) t *= std::exp(Complex(0.0, 1.0) * phase_arg);
      for (int l = layout_.angles; l < layout_.size(); ++l) {
        if (e[l] != 0) t *= std::pow(point[l], e[l]);
      }
      sum += t;
    }
    return sum;
  }

  /// Largest coefficient magnitude (0 when empty).
  double max_abs() const {
    double m = 0.0;
    for (const auto& [e, c] : terms_) m = std::max(m, magnitude(c));
    return m;
  }

 private:
  void prune() {
    for (auto it = terms_.begin(); it != terms_.end();) {
      if (is_zero(it->second))
        it = terms_.erase(it);
      else
        ++it;
    }
  }

  Layout layout_{};
  Terms terms_;
};

/// max |a - b| over coefficients.
template <class C>
double max_abs_difference(const Series<C>& a, const Series<C>& b) {
  return (a - b).max_abs();
}

}  // namespace lietx
