#pragma once

#include <algorithm>
#include <span>
#include <vector>

#include "lietx/series.hpp"

namespace lietx {

/// Vector field (or vector of functions) with one Series per coordinate;
/// components follow the layout order: angle block first, then the polynomial
/// (action) block.
template <class C>
class Field {
 public:
  using Coefficient = C;

  Field() = default;
  explicit Field(Layout layout) : layout_(layout), comps_(static_cast<size_t>(layout.size()), Series<C>(layout)) {}

  static Field zero(Layout layout) { return Field(layout); }

  /// Builds a field from components; all must share the layout.
  static Field from_components(Layout layout, std::vector<Series<C>> comps) {
    if (static_cast<int>(comps.size()) != layout.size()) throw DimensionError("Field: component count mismatch");
    for (const auto& c : comps) require_same(layout, c.layout(), "Field::from_components");
    Field f(layout);
    f.comps_ = std::move(comps);
    return f;
  }

  const Layout& layout() const { return layout_; }
  int dimension() const { return layout_.size(); }

  Series<C>& operator[](int j) { return comps_.at(static_cast<size_t>(j)); }
  const Series<C>& operator[](int j) const { return comps_.at(static_cast<size_t>(j)); }
  const std::vector<Series<C>>& components() const { return comps_; }

  bool empty() const {
    for (const auto& c : comps_)
      if (!c.empty()) return false;
    return true;
  }

  Field& operator+=(const Field& o) {
    require_same(layout_, o.layout_, "Field::+=");
    for (size_t j = 0; j < comps_.size(); ++j) comps_[j] += o.comps_[j];
    return *this;
  }
  Field& operator-=(const Field& o) {
    require_same(layout_, o.layout_, "Field::-=");
    for (size_t j = 0; j < comps_.size(); ++j) comps_[j] -= o.comps_[j];
    return *this;
  }
  Field& operator*=(const C& s) {
    for (auto& c : comps_) c *= s;
    return *this;
  }
  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator-(Field a) {
    for (auto& c : a.comps_) c = -c;
    return a;
  }
  friend Field operator*(const C& s, Field a) { return a *= s; }
  friend bool operator==(const Field& a, const Field& b) { return a.layout_ == b.layout_ && a.comps_ == b.comps_; }

  /// Max polynomial degree over components (-1 when zero).
  int degree() const {
    int d = -1;
    for (const auto& c : comps_) d = std::max(d, c.degree());
    return d;
  }
  bool homogeneous(int d) const {
    for (const auto& c : comps_)
      if (!c.homogeneous(d)) return false;
    return true;
  }
  int max_mode() const {
    int m = 0;
    for (const auto& c : comps_) m = std::max(m, c.max_mode());
    return m;
  }
  double max_abs() const {
    double m = 0.0;
    for (const auto& c : comps_) m = std::max(m, c.max_abs());
    return m;
  }
  bool is_real() const {
    for (const auto& c : comps_)
      if (!c.is_real()) return false;
    return true;
  }

 private:
  Layout layout_{};
  std::vector<Series<C>> comps_;
};

/// L_X f = sum_l X_l df/dx_l.
template <class C>
Series<C> lie_derivative(const Field<C>& X, const Series<C>& f) {
  require_same(X.layout(), f.layout(), "lie_derivative");
  Series<C> r(f.layout());
  if (f.empty()) return r;
  for (int l = 0; l < X.dimension(); ++l) {
    if (X[l].empty()) continue;
    Series<C> d = f.derivative(l);
    if (d.empty()) continue;
    r += X[l] * d;
  }
  return r;
}

/// Commutator {X, V}: (L_X V)_j = sum_l (X_l dV_j/dx_l - V_l dX_j/dx_l).
/// For Fourier-Taylor layouts the angle/action block structure falls out of the
/// coordinate ordering: derivatives along angle lanes multiply by i k_l.
template <class C>
Field<C> commutator(const Field<C>& X, const Field<C>& V) {
  require_same(X.layout(), V.layout(), "commutator");
  const int n = X.dimension();
  Field<C> r(X.layout());
  if (X.empty() || V.empty()) return r;
  for (int l = 0; l < n; ++l) {
    const bool xl = !X[l].empty();
    const bool vl = !V[l].empty();
    if (!xl && !vl) continue;
    for (int j = 0; j < n; ++j) {
      if (xl && !V[j].empty()) {
        Series<C> d = V[j].derivative(l);
        if (!d.empty()) r[j] += X[l] * d;
      }
      if (vl && !X[j].empty()) {
        Series<C> d = X[j].derivative(l);
        if (!d.empty()) r[j] -= V[l] * d;
      }
    }
  }
  return r;
}

/// L_X V for a vector field V is the commutator.
template <class C>
Field<C> lie_derivative(const Field<C>& X, const Field<C>& V) {
  return commutator(X, V);
}

template <class C>
std::vector<Complex> evaluate(const Field<C>& f, std::span<const Complex> point) {
  std::vector<Complex> out;
  out.reserve(static_cast<size_t>(f.dimension()));
  for (int j = 0; j < f.dimension(); ++j) out.push_back(f[j].evaluate(point));
  return out;
}

template <class C>
double max_abs_difference(const Field<C>& a, const Field<C>& b) {
  return (a - b).max_abs();
}

}  // namespace lietx
