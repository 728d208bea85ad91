#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace lietx {

/// Variable layout shared by series and fields: `angles` Fourier variables
/// (indices in Z) followed by `vars` polynomial variables (exponents >= 0).
/// A polynomial field on C^n has {0, n}; a Fourier-Taylor field on T^n x G has {n, m}.
struct Layout {
  int angles = 0;
  int vars = 0;

  int size() const { return angles + vars; }
  bool is_angle(int coordinate) const { return coordinate < angles; }
  bool fourier() const { return angles > 0; }

  friend bool operator==(const Layout&, const Layout&) = default;
};

inline std::string to_string(const Layout& l) {
  return "{angles=" + std::to_string(l.angles) + ", vars=" + std::to_string(l.vars) + "}";
}

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline void require_same(const Layout& a, const Layout& b, const char* where) {
  if (!(a == b))
    throw DimensionError(std::string(where) + ": layout mismatch " + to_string(a) + " vs " + to_string(b));
}

/// Packed exponent vector: up to eight signed 8-bit lanes in one 64-bit word.
/// Lanes are stored with a +128 bias so that the packed integer order is the
/// lexicographic order of the lane values (lane 0 most significant).
class Exponent {
 public:
  static constexpr int kMaxLanes = 8;

  Exponent() = default;
  Exponent(std::initializer_list<int> lanes) {
    if (lanes.size() > kMaxLanes) throw std::out_of_range("Exponent: too many lanes");
    int i = 0;
    for (int v : lanes) set(i++, v);
  }
  explicit Exponent(const std::vector<int>& lanes) {
    if (lanes.size() > kMaxLanes) throw std::out_of_range("Exponent: too many lanes");
    for (int i = 0; i < static_cast<int>(lanes.size()); ++i) set(i, lanes[i]);
  }

  int operator[](int lane) const { return static_cast<int>((bits_ >> shift(lane)) & 0xffU) - 128; }

  void set(int lane, int value) {
    if (value < -128 || value > 127) throw std::out_of_range("Exponent: lane value out of range");
    const uint64_t mask = uint64_t{0xff} << shift(lane);
    bits_ = (bits_ & ~mask) | (static_cast<uint64_t>(value + 128) << shift(lane));
  }

  uint64_t bits() const { return bits_; }

  friend Exponent operator+(const Exponent& a, const Exponent& b) {
    Exponent r;
    for (int i = 0; i < kMaxLanes; ++i) r.set(i, a[i] + b[i]);
    return r;
  }

  /// Copy with lanes [0, count) negated (used for k -> -k on Fourier lanes).
  Exponent negated_prefix(int count) const {
    Exponent r = *this;
    for (int i = 0; i < count; ++i) r.set(i, -(*this)[i]);
    return r;
  }

  /// Sum of |lane| over [begin, end).
  int abs_sum(int begin, int end) const {
    int s = 0;
    for (int i = begin; i < end; ++i) s += (*this)[i] < 0 ? -(*this)[i] : (*this)[i];
    return s;
  }

  bool zero_range(int begin, int end) const {
    for (int i = begin; i < end; ++i)
      if ((*this)[i] != 0) return false;
    return true;
  }

  friend bool operator==(const Exponent& a, const Exponent& b) { return a.bits_ == b.bits_; }
  friend bool operator!=(const Exponent& a, const Exponent& b) { return a.bits_ != b.bits_; }
  friend bool operator<(const Exponent& a, const Exponent& b) { return a.bits_ < b.bits_; }

 private:
  static constexpr uint64_t kZero = 0x8080808080808080ULL;
  static int shift(int lane) {
    if (lane < 0 || lane >= kMaxLanes) throw std::out_of_range("Exponent: lane index");
    return 56 - 8 * lane;
  }

  uint64_t bits_ = kZero;
};

inline std::vector<int> lanes(const Exponent& e, int begin, int end) {
  std::vector<int> out;
  out.reserve(static_cast<size_t>(end - begin));
  for (int i = begin; i < end; ++i) out.push_back(e[i]);
  return out;
}

}  // namespace lietx
