#pragma once

// Homological equations and the two normalization drivers.
//
// Both drivers produce X and Z with
//
//   T_W o R o U = U o T_Z o R,
//
// where U is the Lie transform T_X (transform driver) or the composition
// exp(L_{X_1}) o ... o exp(L_{X_N}) (series driver). At each order the solver
// returns Xt, Z with D Xt + Z = Psi (D = R - 1) and the drivers use X_s = -Xt,
// i.e. Z_s - D X_s = Psi_s.

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "lietx/represent.hpp"

namespace lietx {

class ResonanceError : public std::runtime_error {
 public:
  ResonanceError(const std::string& what, int order, std::vector<int> mode)
      : std::runtime_error(what), order_(order), mode_(std::move(mode)) {}
  int order() const { return order_; }
  const std::vector<int>& mode() const { return mode_; }

 private:
  int order_;
  std::vector<int> mode_;
};

class SymmetryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SolverOptions {
  /// Float mode: |d| below this is an exact resonance.
  double resonance_tolerance = 1e-10;
  /// Float mode: |d| below this triggers a near-resonance warning.
  double divisor_floor = 1e-6;
};

struct ResonantMode {
  int order = 0;
  /// Component j (linear case) or -1 (Fourier mode, all components).
  int component = 0;
  std::vector<int> exponent;
  Complex divisor;
};

struct Diagnostics {
  /// Smallest |divisor| met while solving.
  double min_divisor = std::numeric_limits<double>::infinity();
  /// Kronecker case: smallest |e^{i<k,omega>} - 1| over 0 < |k|_1 <= box_max_mode.
  double box_min_divisor = std::numeric_limits<double>::infinity();
  int box_max_mode = 0;
  std::vector<ResonantMode> resonant_modes;
  std::vector<std::string> warnings;
  TruncationReport truncation;
};

enum class Driver { transform, series };

inline const char* to_string(Driver d) { return d == Driver::transform ? "transform" : "series"; }

/// D = R - 1 acting on vector fields, diagonal on monomials (linear case) or on
/// Fourier modes with a constant angle-action coupling (Kronecker case).
template <class C>
class HomologicalOperator {
 public:
  explicit HomologicalOperator(UnperturbedPart<C> R, SolverOptions options = {}) : R_(std::move(R)), opt_(options) {
    if (const auto* K = std::get_if<KroneckerPart<C>>(&R_)) {
      twist_.assign(static_cast<size_t>(K->angles), std::vector<C>(static_cast<size_t>(K->actions), C(0)));
    }
  }

  /// Constant coupling matrix used in the angle block (n x m). Only the
  /// constant-frequency solver reads it; R itself keeps its own Jacobian.
  void set_twist(std::vector<std::vector<C>> B) { twist_ = std::move(B); }
  const std::vector<std::vector<C>>& twist() const { return twist_; }

  const UnperturbedPart<C>& unperturbed() const { return R_; }
  const SolverOptions& options() const { return opt_; }

  /// lambda^k / lambda_j - 1 on x^k e_j.
  C divisor(const Exponent& k, int j) const {
    const auto& L = std::get<LinearPart<C>>(R_);
    if constexpr (is_exact_v<C>) {
      C f = power(L.eigenvalues[j], -1);
      for (int l = 0; l < L.dimension(); ++l)
        if (k[l] != 0) f *= power(L.eigenvalues[l], k[l]);
      return f - C(1);
    } else {
      Complex a = -L.logs[j];
      for (int l = 0; l < L.dimension(); ++l) a += static_cast<double>(k[l]) * L.logs[l];
      return std::exp(a) - 1.0;
    }
  }

  /// rho^k - 1 on Fourier mode k.
  C divisor(const Exponent& k) const {
    const auto& K = std::get<KroneckerPart<C>>(R_);
    return K.rotation(k) - C(1);
  }

  bool resonant(const C& d) const {
    if constexpr (is_exact_v<C>)
      return is_zero(d);
    else
      return std::abs(d) < opt_.resonance_tolerance;
  }

  /// D v, for checking D Xt + Z = Psi.
  Field<C> apply(const Field<C>& v) const {
    if (std::holds_alternative<LinearPart<C>>(R_)) return apply_R(R_, v) - v;
    const auto& K = std::get<KroneckerPart<C>>(R_);
    Field<C> out = apply_R(R_, v) - v;
    for (int j = 0; j < K.angles; ++j)
      for (int l = 0; l < K.actions; ++l) {
        if (is_zero(twist_[j][l]) || v[K.angles + l].empty()) continue;
        out[j] -= twist_[j][l] * apply_R(R_, v[K.angles + l]);
      }
    return out;
  }

 private:
  UnperturbedPart<C> R_;
  SolverOptions opt_;
  std::vector<std::vector<C>> twist_;
};

template <class C>
struct HomologicalSolution {
  Field<C> X;  // Xt, with D Xt + Z = Psi
  Field<C> Z;
};

namespace detail {

inline std::string mode_string(const std::vector<int>& k) {
  std::ostringstream os;
  os << '[';
  for (size_t i = 0; i < k.size(); ++i) os << (i ? "," : "") << k[i];
  os << ']';
  return os.str();
}

inline void note_divisor(Diagnostics* diag, double mag, double floor, int order, const std::vector<int>& k, int j) {
  if (!diag) return;
  diag->min_divisor = std::min(diag->min_divisor, mag);
  if (mag < floor) {
    std::ostringstream os;
    os << "order " << order << ": near-resonant divisor " << mag << " at mode " << mode_string(k);
    if (j >= 0) os << " component " << j + 1;
    diag->warnings.push_back(os.str());
  }
}

/// Scans the Fourier box 0 < |k|_1 <= kmax; skipped when it exceeds 10^6 modes.
template <class C>
void note_mode_box(const HomologicalOperator<C>& D, const UnperturbedPart<C>& R, int kmax, Diagnostics& diag) {
  const auto* K = std::get_if<KroneckerPart<C>>(&R);
  if (!K || kmax <= 0) return;
  const int n = K->angles;
  double count = 1.0;
  for (int i = 0; i < n; ++i) count *= 2.0 * kmax + 1.0;
  if (count > 1e6) return;
  std::vector<int> k(static_cast<size_t>(n), -kmax);
  diag.box_max_mode = kmax;
  for (;;) {
    int norm = 0;
    for (int v : k) norm += std::abs(v);
    if (norm > 0 && norm <= kmax) {
      Exponent e;
      for (int i = 0; i < n; ++i) e.set(i, k[i]);
      diag.box_min_divisor = std::min(diag.box_min_divisor, std::abs(to_complex(D.divisor(e))));
    }
    int i = 0;
    while (i < n && k[i] == kmax) k[i++] = -kmax;
    if (i == n) break;
    ++k[i];
  }
}

}  // namespace detail

/// Monomialwise solve of D Xt + Z = Psi: resonant monomials go to Z.
template <class C>
HomologicalSolution<C> solve_homological_linear(const HomologicalOperator<C>& D, const Field<C>& psi, int order = 0,
                                                Diagnostics* diag = nullptr) {
  const Layout layout = psi.layout();
  HomologicalSolution<C> out{Field<C>(layout), Field<C>(layout)};
  for (int j = 0; j < psi.dimension(); ++j) {
    for (const auto& [k, c] : psi[j].terms()) {
      const C d = D.divisor(k, j);
      const std::vector<int> kv = lanes(k, 0, layout.size());
      if (D.resonant(d)) {
        out.Z[j].add(k, c);
        if (diag) diag->resonant_modes.push_back({order, j, kv, to_complex(d)});
        continue;
      }
      detail::note_divisor(diag, magnitude(d), D.options().divisor_floor, order, kv, j);
      out.X[j].add(k, c / d);
    }
  }
  return out;
}

/// Modewise solve for a Kronecker part with constant frequencies:
///   k = 0:  Z = (alpha_0, beta_0)
///   k != 0: b = beta/(e-1),  a = alpha/(e-1) + e B beta/(e-1)^2,  e = rho^k.
template <class C>
HomologicalSolution<C> solve_homological_kronecker(const HomologicalOperator<C>& D, const Field<C>& psi,
                                                   int order = 0, Diagnostics* diag = nullptr) {
  const auto& K = std::get<KroneckerPart<C>>(D.unperturbed());
  const Layout layout = psi.layout();
  const int n = K.angles;
  const int m = K.actions;
  HomologicalSolution<C> out{Field<C>(layout), Field<C>(layout)};

  // group by Fourier index
  std::map<Exponent, std::vector<Series<C>>> modes;
  for (int c = 0; c < psi.dimension(); ++c) {
    for (const auto& [e, v] : psi[c].terms()) {
      Exponent k;
      for (int j = 0; j < n; ++j) k.set(j, e[j]);
      auto it = modes.find(k);
      if (it == modes.end())
        it = modes.emplace(k, std::vector<Series<C>>(static_cast<size_t>(n + m), Series<C>(layout))).first;
      it->second[c].add(e, v);
    }
  }

  for (const auto& [k, comps] : modes) {
    const std::vector<int> kv = lanes(k, 0, n);
    if (k.zero_range(0, n)) {
      for (int c = 0; c < n + m; ++c) out.Z[c] += comps[c];
      continue;
    }
    const C e = K.rotation(k);
    const C d = e - C(1);
    if (D.resonant(d)) {
      if (diag) diag->resonant_modes.push_back({order, -1, kv, to_complex(d)});
      throw ResonanceError("order " + std::to_string(order) + ": resonant Fourier mode k = " + detail::mode_string(kv),
                           order, kv);
    }
    const double mag = magnitude(d);
    if (!K.constant()) {
      if (mag < D.options().divisor_floor)
        throw ResonanceError("order " + std::to_string(order) + ": divisor below floor at mode k = " +
                                 detail::mode_string(kv) + " for action-dependent frequencies",
                             order, kv);
      continue;
    }
    detail::note_divisor(diag, mag, D.options().divisor_floor, order, kv, -1);
    const C inv = C(1) / d;
    const C cross = e * inv * inv;
    for (int l = 0; l < m; ++l) {
      const auto& beta = comps[n + l];
      if (beta.empty()) continue;
      out.X[n + l] += inv * beta;
      for (int j = 0; j < n; ++j)
        if (!is_zero(D.twist()[j][l])) out.X[j] += (cross * D.twist()[j][l]) * beta;
    }
    for (int j = 0; j < n; ++j)
      if (!comps[j].empty()) out.X[j] += inv * comps[j];
  }
  if (!K.constant())
    throw ResonanceError("order " + std::to_string(order) +
                             ": the normal form solver needs constant frequencies (omega depends on the actions)",
                         order, {});
  return out;
}

template <class C>
HomologicalSolution<C> solve_homological(const HomologicalOperator<C>& D, const Field<C>& psi, int order = 0,
                                         Diagnostics* diag = nullptr) {
  if (is_kronecker(D.unperturbed())) return solve_homological_kronecker(D, psi, order, diag);
  return solve_homological_linear(D, psi, order, diag);
}

template <class C>
struct NormalFormResult {
  Driver driver = Driver::transform;
  int order = 0;
  GeneratingSequence<C> X;
  GeneratingSequence<C> Z;
  /// Second factorization of the input map, x' = T_W o R x.
  GeneratingSequence<C> W;
  Diagnostics diagnostics;
};

/// Apply the normalizing transformation of a result to a target.
template <class C, class T>
Graded<T> apply_transform(const NormalFormResult<C>& r, const Graded<T>& target, int N) {
  if (r.driver == Driver::transform) return lie_transform_apply(r.X, target, N);
  return compose_lie_series_apply(r.X, target, N, N, SeriesOrder::descending);
}

/// Coordinate image of the normal form map, T_Z o R x.
template <class C>
Graded<Image<C>> normal_form_image(const UnperturbedPart<C>& R, const GeneratingSequence<C>& Z, int N) {
  return lie_transform_apply(Z, apply_R(R, Image<C>::coordinates(layout_of(R))), N);
}

namespace detail {

template <class C>
size_t cut_modes(Field<C>& f, int cutoff) {
  if (!f.layout().fourier() || cutoff <= 0) return 0;
  size_t d = 0;
  for (int j = 0; j < f.dimension(); ++j) d += f[j].truncate_modes(cutoff);
  return d;
}

template <class C>
using OrderCheck = std::function<void(int, const Field<C>&, const HomologicalSolution<C>&, const Field<C>&)>;

}  // namespace detail

/// Single Lie transform driver:
///   Psi_s = W_s - sum_{j<s} (j/s) (E^X_{s-j} Z_j - E^W_{s-j} R X_j),  Z_s - D X_s = Psi_s.
///
/// Starts from the factorization x' = T_W o R x; K1 is the order-1 Fourier cutoff.
template <class C>
NormalFormResult<C> normalize_lie_transform(const UnperturbedPart<C>& R, const GeneratingSequence<C>& W, int N,
                                            int K1, SolverOptions options = {},
                                            const detail::OrderCheck<C>& check = {}) {
  const Layout layout = layout_of(R);
  NormalFormResult<C> res;
  res.driver = Driver::transform;
  res.order = N;
  res.W = W.resized(N);
  res.X = zero_sequence<C>(layout, N);
  res.Z = zero_sequence<C>(layout, N);
  GeneratingSequence<C> RX = zero_sequence<C>(layout, N);
  HomologicalOperator<C> D(R, options);

  detail::note_mode_box(D, R, N * K1, res.diagnostics);

  using Trace = LieOperatorTrace<GeneratingSequence<C>, Field<C>>;
  std::vector<std::optional<Trace>> zx(static_cast<size_t>(N + 1));
  std::vector<std::optional<Trace>> rw(static_cast<size_t>(N + 1));

  for (int s = 1; s <= N; ++s) {
    Field<C> psi = res.W[s];
    for (int j = 1; j < s; ++j) {
      Field<C> t(layout);
      if (zx[j]) t += zx[j]->E(s - j)[s];
      if (rw[j]) t -= rw[j]->E(s - j)[s];
      if (t.empty()) continue;
      t *= ratio<C>(j, s);
      psi -= t;
    }
    res.diagnostics.truncation.fourier_dropped += detail::cut_modes(psi, s * K1);
    HomologicalSolution<C> sol = solve_homological(D, psi, s, &res.diagnostics);
    res.X[s] = -sol.X;
    res.Z[s] = sol.Z;
    RX[s] = apply_R(R, res.X[s], false, &res.diagnostics.truncation);
    if (check) check(s, psi, sol, res.X[s]);
    if (!res.Z[s].empty()) zx[s].emplace(res.X, Graded<Field<C>>::single(N, res.Z[s], s), N);
    if (!RX[s].empty()) rw[s].emplace(res.W, Graded<Field<C>>::single(N, RX[s], s), N);
  }
  return res;
}

template <class C>
NormalFormResult<C> normalize_lie_transform(const MapSpec<C>& spec, SolverOptions options = {},
                                            const detail::OrderCheck<C>& check = {}) {
  Factorization<C> fac = factor_map(spec);
  NormalFormResult<C> res =
      normalize_lie_transform(spec.unperturbed, fac.W, spec.order, effective_cutoff(spec), options, check);
  res.diagnostics.truncation.merge(fac.report);
  return res;
}

/// One step of the composition-of-Lie-series driver. W is normal below order r;
/// returns W' with W'_r = Z_r and, for s > r,
///   W'_s = W_s + (r/s) E^W_{s-r} R X_r - sum_{i=1}^{(s-1)/r} (s - i r)/(s i!) L_{X_r}^i W'_{s-i r},
/// so that T_W o R o exp(L_{X_r}) = exp(L_{X_r}) o T_{W'} o R to order N.
template <class C>
GeneratingSequence<C> lie_series_update(const UnperturbedPart<C>& R, const GeneratingSequence<C>& W, int r,
                                        const Field<C>& Xr, const Field<C>& Zr, int K1 = 0,
                                        TruncationReport* report = nullptr) {
  const int N = W.max_order();
  GeneratingSequence<C> next = W;
  next[r] = Zr;
  if (Xr.empty() || r >= N) return next;
  const Field<C> RXr = apply_R(R, Xr, false, report);
  LieOperatorTrace<GeneratingSequence<C>, Field<C>> trace(W, Graded<Field<C>>::single(N, RXr, r), N);
  for (int s = r + 1; s <= N; ++s) {
    Field<C> ws = W[s];
    Field<C> t = trace.E(s - r)[s];
    if (!t.empty()) {
      t *= ratio<C>(r, s);
      ws += t;
    }
    mpq_class fact(1);
    for (int i = 1; i <= (s - 1) / r; ++i) {
      fact *= i;
      Field<C> l = next[s - i * r];
      for (int p = 0; p < i && !l.empty(); ++p) l = commutator(Xr, l);
      if (l.empty()) continue;
      mpq_class w(s - i * r, s);
      w /= fact;
      l *= from_rational<C>(w);
      ws -= l;
    }
    const size_t cut = detail::cut_modes(ws, s * K1);
    if (report) report->fourier_dropped += cut;
    next[s] = std::move(ws);
  }
  return next;
}

/// Composition-of-Lie-series driver: step r solves Z_r - D X_r = W_r and
/// conjugates by exp(L_{X_r}) (see lie_series_update).
template <class C>
NormalFormResult<C> normalize_lie_series(const UnperturbedPart<C>& R, const GeneratingSequence<C>& W0, int N, int K1,
                                         SolverOptions options = {}) {
  const Layout layout = layout_of(R);
  NormalFormResult<C> res;
  res.driver = Driver::series;
  res.order = N;
  res.W = W0.resized(N);
  res.X = zero_sequence<C>(layout, N);
  HomologicalOperator<C> D(R, options);

  detail::note_mode_box(D, R, N * K1, res.diagnostics);

  GeneratingSequence<C> W = res.W;
  for (int r = 1; r <= N; ++r) {
    Field<C> psi = W[r];
    res.diagnostics.truncation.fourier_dropped += detail::cut_modes(psi, r * K1);
    HomologicalSolution<C> sol = solve_homological(D, psi, r, &res.diagnostics);
    res.X[r] = -sol.X;
    W = lie_series_update(R, W, r, res.X[r], sol.Z, K1, &res.diagnostics.truncation);
  }
  res.Z = zero_sequence<C>(layout, N);
  for (int s = 1; s <= N; ++s) res.Z[s] = W[s];
  return res;
}

template <class C>
NormalFormResult<C> normalize_lie_series(const MapSpec<C>& spec, SolverOptions options = {}) {
  Factorization<C> fac = factor_map(spec);
  NormalFormResult<C> res = normalize_lie_series(spec.unperturbed, fac.W, spec.order, effective_cutoff(spec), options);
  res.diagnostics.truncation.merge(fac.report);
  return res;
}

template <class C>
NormalFormResult<C> normalize(const MapSpec<C>& spec, Driver driver, SolverOptions options = {}) {
  return driver == Driver::transform ? normalize_lie_transform(spec, options) : normalize_lie_series(spec, options);
}

enum class SymmetryType { plus_minus, minus_plus, none };

inline const char* to_string(SymmetryType t) {
  switch (t) {
    case SymmetryType::plus_minus:
      return "(+,-)";
    case SymmetryType::minus_plus:
      return "(-,+)";
    default:
      return "none";
  }
}

namespace detail {

template <class C>
bool even(const Series<C>& f) {
  return (f.reflected() - f).empty();
}
template <class C>
bool odd(const Series<C>& f) {
  return (f.reflected() + f).empty();
}

}  // namespace detail

/// (+,-): angle block even in phi, action block odd; (-,+): the reverse.
/// The zero field has both types.
template <class C>
bool has_symmetry(const Field<C>& v, SymmetryType t) {
  if (t == SymmetryType::none) return true;
  const int n = v.layout().angles;
  const bool pm = t == SymmetryType::plus_minus;
  for (int j = 0; j < v.dimension(); ++j) {
    const bool angle = j < n;
    const bool want_even = angle == pm;
    if (want_even ? !detail::even(v[j]) : !detail::odd(v[j])) return false;
  }
  return true;
}

template <class C>
SymmetryType classify_symmetry(const Field<C>& v) {
  if (has_symmetry(v, SymmetryType::plus_minus)) return SymmetryType::plus_minus;
  if (has_symmetry(v, SymmetryType::minus_plus)) return SymmetryType::minus_plus;
  return SymmetryType::none;
}

template <class C>
struct ReversibleResult {
  NormalFormResult<C> result;
  /// omega'(I) = T_Z o R phi - phi on the angle components (action components left zero).
  Graded<Image<C>> frequency;
};

/// Lie-transform driver for reversible Kronecker maps: every W_s of type (+,-).
/// Asserts that each Psi_s and Z_s is of type (+,-) and that Z has no action block.
template <class C>
ReversibleResult<C> normalize_reversible(const MapSpec<C>& spec, SolverOptions options = {}) {
  if (!is_kronecker(spec.unperturbed)) throw SymmetryError("reversible normalization needs a Kronecker map");
  const int n = spec.layout().angles;
  auto block_check = [n](int s, const char* what, const Field<C>& v) {
    for (int j = 0; j < v.dimension(); ++j) {
      const bool angle = j < n;
      const bool ok = angle ? detail::even(v[j]) : detail::odd(v[j]);
      if (!ok)
        throw SymmetryError("order " + std::to_string(s) + ": " + what + " is not of type (+,-) (" +
                            (angle ? "angle" : "action") + " block, component " + std::to_string(j + 1) + ")");
    }
  };
  Factorization<C> fac = factor_map(spec);
  for (int s = 1; s <= spec.order; ++s) block_check(s, "W", fac.W[s]);
  auto check = [&](int s, const Field<C>& psi, const HomologicalSolution<C>& sol, const Field<C>&) {
    block_check(s, "Psi", psi);
    block_check(s, "Z", sol.Z);
    for (int j = n; j < sol.Z.dimension(); ++j)
      if (!sol.Z[j].empty()) throw SymmetryError("order " + std::to_string(s) + ": Z has a nonzero action block");
  };
  ReversibleResult<C> out;
  out.result = normalize_lie_transform(spec.unperturbed, fac.W, spec.order, effective_cutoff(spec), options,
                                       detail::OrderCheck<C>(check));
  out.result.diagnostics.truncation.merge(fac.report);
  out.frequency = normal_form_image(spec.unperturbed, out.result.Z, spec.order);
  for (int s = 0; s <= spec.order; ++s) {
    auto& im = out.frequency[s];
    if (s == 0) im.identity() = C(0);
    for (int j = n; j < im.layout().size(); ++j) im.displacement()[j] = Series<C>(im.layout());
  }
  return out;
}

}  // namespace lietx
