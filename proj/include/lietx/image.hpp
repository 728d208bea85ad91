#pragma once

#include <algorithm>
#include <span>
#include <vector>

#include "lietx/field.hpp"

namespace lietx {

/// Image of the coordinate functions. Angle component j is
/// identity * phi_j + displacement_j + offset_j; other components are
/// displacement_j alone.
///
/// phi is not periodic, so it cannot be stored as a Series and is carried as the
/// coefficient `identity`. `offset` holds constant angle
/// shifts that are not representable in the coefficient ring (a rotation by an
/// irrational angle in exact mode). Lie derivatives annihilate both constants.
template <class C>
class Image {
 public:
  using Coefficient = C;

  Image() = default;
  explicit Image(Layout layout)
      : layout_(layout), identity_(0), displacement_(layout), offset_(static_cast<size_t>(layout.angles)) {}

  static Image zero(Layout layout) { return Image(layout); }
  /// The coordinate functions: phi_j on angle lanes, x_j as monomials elsewhere.
  static Image coordinates(Layout layout) {
    Image im(layout);
    im.identity_ = C(1);
    for (int j = layout.angles; j < layout.size(); ++j)
      im.displacement_[j] = Series<C>::variable(layout, j - layout.angles);
    return im;
  }
  static Image from_displacement(Field<C> d, const C& identity = C(0)) {
    Image im(d.layout());
    im.identity_ = identity;
    im.displacement_ = std::move(d);
    return im;
  }

  const Layout& layout() const { return layout_; }
  const C& identity() const { return identity_; }
  C& identity() { return identity_; }
  const Field<C>& displacement() const { return displacement_; }
  Field<C>& displacement() { return displacement_; }
  const std::vector<Complex>& offset() const { return offset_; }
  std::vector<Complex>& offset() { return offset_; }

  bool empty() const {
    if (!is_zero(identity_) || !displacement_.empty()) return false;
    return std::all_of(offset_.begin(), offset_.end(), [](const Complex& z) { return z == Complex(0.0, 0.0); });
  }

  Image& operator+=(const Image& o) {
    require_same(layout_, o.layout_, "Image::+=");
    identity_ += o.identity_;
    displacement_ += o.displacement_;
    for (size_t i = 0; i < offset_.size(); ++i) offset_[i] += o.offset_[i];
    return *this;
  }
  Image& operator-=(const Image& o) {
    require_same(layout_, o.layout_, "Image::-=");
    identity_ -= o.identity_;
    displacement_ -= o.displacement_;
    for (size_t i = 0; i < offset_.size(); ++i) offset_[i] -= o.offset_[i];
    return *this;
  }
  Image& operator*=(const C& s) {
    identity_ *= s;
    displacement_ *= s;
    const Complex z = to_complex(s);
    for (auto& o : offset_) o *= z;
    return *this;
  }
  friend Image operator+(Image a, const Image& b) { return a += b; }
  friend Image operator-(Image a, const Image& b) { return a -= b; }
  friend Image operator*(const C& s, Image a) { return a *= s; }

  double max_abs() const {
    double m = std::max(magnitude(identity_), displacement_.max_abs());
    for (const auto& o : offset_) m = std::max(m, std::abs(o));
    return m;
  }

 private:
  Layout layout_{};
  C identity_{0};
  Field<C> displacement_;
  std::vector<Complex> offset_;
};

/// L_X of each component with the scalar rule; L_X phi_j = X_j.
template <class C>
Image<C> lie_derivative(const Field<C>& X, const Image<C>& im) {
  require_same(X.layout(), im.layout(), "lie_derivative(Image)");
  Image<C> r(im.layout());
  if (!is_zero(im.identity())) {
    for (int j = 0; j < im.layout().angles; ++j) r.displacement()[j] = im.identity() * X[j];
  }
  for (int j = 0; j < im.layout().size(); ++j) {
    const auto& dj = im.displacement()[j];
    if (!dj.empty()) r.displacement()[j] += lie_derivative(X, dj);
  }
  return r;
}

template <class C>
std::vector<Complex> evaluate(const Image<C>& im, std::span<const Complex> point) {
  std::vector<Complex> out = evaluate(im.displacement(), point);
  const Complex id = to_complex(im.identity());
  for (size_t j = 0; j < im.offset().size(); ++j) out[j] += id * point[j];
  for (size_t j = 0; j < im.offset().size(); ++j) out[j] += im.offset()[j];
  return out;
}

template <class C>
double max_abs_difference(const Image<C>& a, const Image<C>& b) {
  return (a - b).max_abs();
}

}  // namespace lietx
