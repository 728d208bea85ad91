#pragma once

// Lie series, Lie transforms and compositions of Lie series.
//
// A generating sequence X = {X_1, ..., X_N} stores X_s as piece s of a
// Graded<Field>; piece 0 is unused. Targets are Graded objects (or plain values,
// placed at order 0). L_{X_j} maps target order p to p + j and everything above
// the truncation order N is discarded.

#include <algorithm>
#include <map>
#include <vector>

#include <gmpxx.h>

#include "lietx/graded.hpp"

namespace lietx {

template <class C>
using GeneratingSequence = Graded<Field<C>>;

/// Sequence whose element j is a whole graded field (label j, pieces of order >= j).
/// Arises from commuting a transform past a generic sequence.
template <class C>
using LabeledSequence = std::vector<Graded<Field<C>>>;

template <class C>
GeneratingSequence<C> zero_sequence(Layout layout, int N) {
  return GeneratingSequence<C>(N, Field<C>(layout));
}

/// Single field X placed at order r.
template <class C>
GeneratingSequence<C> single_sequence(const Field<C>& X, int r, int N) {
  return GeneratingSequence<C>::single(N, X, r);
}

template <class T>
Graded<T> at_order_zero(const T& target, int N) {
  return Graded<T>::single(N, target, 0);
}

/// L_X g for a field X of order r; result truncated at g's max order.
template <class C, class T>
Graded<T> lie_derivative(const Field<C>& X, int r, const Graded<T>& g) {
  Graded<T> out(g.max_order(), g.zero_piece());
  if (X.empty()) return out;
  for (int p = 0; p + r <= g.max_order(); ++p) {
    if (g[p].empty()) continue;
    out[p + r] = lie_derivative(X, g[p]);
  }
  return out;
}

/// L_X g for a graded field X (pieces of any order).
template <class C, class T>
Graded<T> lie_derivative(const Graded<Field<C>>& X, const Graded<T>& g) {
  Graded<T> out(g.max_order(), g.zero_piece());
  for (int r = 0; r <= X.max_order(); ++r) {
    if (X[r].empty()) continue;
    for (int p = 0; p + r <= g.max_order(); ++p) {
      if (g[p].empty()) continue;
      out[p + r] += lie_derivative(X[r], g[p]);
    }
  }
  return out;
}

namespace detail {

template <class C, class T>
Graded<T> apply_generator(const GeneratingSequence<C>& X, int j, const Graded<T>& g) {
  if (j > X.max_order() || X[j].empty()) return Graded<T>(g.max_order(), g.zero_piece());
  return lie_derivative(X[j], j, g);
}

template <class C, class T>
Graded<T> apply_generator(const LabeledSequence<C>& X, int j, const Graded<T>& g) {
  if (j >= static_cast<int>(X.size()) || X[j].empty()) return Graded<T>(g.max_order(), g.zero_piece());
  return lie_derivative(X[j], g);
}

template <class C>
bool generator_empty(const GeneratingSequence<C>& X, int j) {
  return j > X.max_order() || X[j].empty();
}

template <class C>
bool generator_empty(const LabeledSequence<C>& X, int j) {
  return j >= static_cast<int>(X.size()) || X[j].empty();
}

template <class C, class T>
void add_scaled(Graded<T>& acc, const Graded<T>& term, const C& w) {
  for (int p = 0; p <= acc.max_order(); ++p) {
    if (term[p].empty()) continue;
    T t = term[p];
    t *= w;
    acc[p] += t;
  }
}

}  // namespace detail

/// exp(L_X) target with X of order r, summed until L_X^p target leaves the range.
template <class C, class T>
Graded<T> exp_lie(const Field<C>& X, int r, const Graded<T>& target, int N) {
  Graded<T> result = target.resized(N);
  if (X.empty() || r > N) return result;
  Graded<T> term = result;
  for (long p = 1;; ++p) {
    term = lie_derivative(X, r, term);
    if (term.empty()) break;
    term *= ratio<C>(1, p);
    result += term;
  }
  return result;
}

template <class C, class T>
Graded<T> exp_lie(const Field<C>& X, int r, const T& target, int N) {
  return exp_lie(X, r, at_order_zero(target, N), N);
}

/// Memoized images E_s(target) of the Lie-transform operators,
/// E_0 = 1, E_s = sum_{j=1}^{s} (j/s) L_{X_j} E_{s-j}.
///
/// The generator is held by reference; element j may be filled in after
/// construction as long as E_s is only requested once X_1..X_s are final.
template <class Generator, class T>
class LieOperatorTrace {
 public:
  using Coefficient = typename T::Coefficient;

  LieOperatorTrace(const Generator& X, Graded<T> target, int N) : X_(&X), N_(N) {
    E_.push_back(target.resized(N));
  }

  int max_order() const { return N_; }

  const Graded<T>& E(int s) {
    while (static_cast<int>(E_.size()) <= s) {
      const int t = static_cast<int>(E_.size());
      Graded<T> acc(N_, E_[0].zero_piece());
      for (int j = 1; j <= t; ++j) {
        if (detail::generator_empty(*X_, j) || E_[t - j].empty()) continue;
        detail::add_scaled(acc, detail::apply_generator(*X_, j, E_[t - j]), ratio<Coefficient>(j, t));
      }
      E_.push_back(std::move(acc));
    }
    return E_[s];
  }

  /// sum_{s=0}^{N} E_s(target).
  Graded<T> sum() {
    Graded<T> out = E(0);
    for (int s = 1; s <= N_; ++s) out += E(s);
    return out;
  }

 private:
  const Generator* X_;
  int N_;
  std::vector<Graded<T>> E_;
};

template <class Generator, class T>
Graded<T> lie_transform_apply_generic(const Generator& X, const Graded<T>& target, int N) {
  LieOperatorTrace<Generator, T> trace(X, target, N);
  return trace.sum();
}

template <class C, class T>
Graded<T> lie_transform_apply(const GeneratingSequence<C>& X, const Graded<T>& target, int N) {
  return lie_transform_apply_generic(X, target, N);
}

template <class C, class T>
Graded<T> lie_transform_apply(const GeneratingSequence<C>& X, const T& target, int N) {
  return lie_transform_apply(X, at_order_zero(target, N), N);
}

template <class C, class T>
Graded<T> lie_transform_apply_labeled(const LabeledSequence<C>& X, const Graded<T>& target, int N) {
  return lie_transform_apply_generic(X, target, N);
}

namespace detail {

// G_s g = -sum_j (j/s) G_{s-j} L_{X_j} g, expanded recursively.
template <class C, class T>
Graded<T> inverse_term(const GeneratingSequence<C>& X, int s, const Graded<T>& g) {
  if (s == 0) return g;
  Graded<T> acc(g.max_order(), g.zero_piece());
  for (int j = 1; j <= s; ++j) {
    if (generator_empty(X, j)) continue;
    Graded<T> lg = apply_generator(X, j, g);
    if (lg.empty()) continue;
    add_scaled(acc, inverse_term(X, s - j, lg), ratio<C>(-j, s));
  }
  return acc;
}

}  // namespace detail

/// T_X^{-1} target = sum_s G_s target.
template <class C, class T>
Graded<T> lie_transform_inverse_apply(const GeneratingSequence<C>& X, const Graded<T>& target, int N) {
  const Graded<T> g = target.resized(N);
  Graded<T> out = g;
  for (int s = 1; s <= N; ++s) out += detail::inverse_term(X, s, g);
  return out;
}

template <class C, class T>
Graded<T> lie_transform_inverse_apply(const GeneratingSequence<C>& X, const T& target, int N) {
  return lie_transform_inverse_apply(X, at_order_zero(target, N), N);
}

enum class SeriesOrder {
  ascending,   // exp(L_{X_1}) acts on the target first, exp(L_{X_r}) last
  descending,  // exp(L_{X_r}) acts first, exp(L_{X_1}) last
};

/// Composition of Lie series built from X_1..X_up_to.
template <class C, class T>
Graded<T> compose_lie_series_apply(const GeneratingSequence<C>& X, const Graded<T>& target, int N, int up_to,
                                   SeriesOrder order = SeriesOrder::ascending) {
  Graded<T> g = target.resized(N);
  up_to = std::min(up_to, X.max_order());
  if (order == SeriesOrder::ascending) {
    for (int r = 1; r <= up_to; ++r) g = exp_lie(X[r], r, g, N);
  } else {
    for (int r = up_to; r >= 1; --r) g = exp_lie(X[r], r, g, N);
  }
  return g;
}

template <class C, class T>
Graded<T> compose_lie_series_apply(const GeneratingSequence<C>& X, const T& target, int N, int up_to,
                                   SeriesOrder order = SeriesOrder::ascending) {
  return compose_lie_series_apply(X, at_order_zero(target, N), N, up_to, order);
}

/// Words of E_s with indices sorted non-increasingly (leftmost largest), weights
/// aggregated exactly. Key: sorted word; value: total weight.
inline std::map<std::vector<int>, mpq_class> reordered_words(int s) {
  std::map<std::vector<int>, mpq_class> out;
  // compositions of s with weight prod (k_i / remaining_i)
  std::vector<int> word;
  auto rec = [&](auto&& self, int remaining, mpq_class w) -> void {
    if (remaining == 0) {
      std::vector<int> key = word;
      std::sort(key.begin(), key.end(), std::greater<>());
      out[key] += w;
      return;
    }
    for (int k = 1; k <= remaining; ++k) {
      word.push_back(k);
      mpq_class f(k, remaining);
      f.canonicalize();
      self(self, remaining - k, w * f);
      word.pop_back();
    }
  };
  if (s > 0) rec(rec, s, mpq_class(1));
  return out;
}

/// :E_s: target, the order-s operator of the composition of Lie series.
template <class C, class T>
Graded<T> reordered_E(const GeneratingSequence<C>& X, int s, const Graded<T>& target, int N) {
  Graded<T> g0 = target.resized(N);
  if (s == 0) return g0;
  Graded<T> acc(N, g0.zero_piece());
  for (const auto& [word, w] : reordered_words(s)) {
    Graded<T> g = g0;
    for (auto it = word.rbegin(); it != word.rend() && !g.empty(); ++it) g = detail::apply_generator(X, *it, g);
    if (g.empty()) continue;
    detail::add_scaled(acc, g, from_rational<C>(w));
  }
  return acc;
}

template <class C, class T>
Graded<T> reordered_E(const GeneratingSequence<C>& X, int s, const T& target, int N) {
  return reordered_E(X, s, at_order_zero(target, N), N);
}

}  // namespace lietx
