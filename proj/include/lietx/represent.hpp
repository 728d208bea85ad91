#pragma once

// Unperturbed maps R, factorization of perturbed maps, and composition of
// Lie transforms.
//
// All operators act on functions by pull-back: R f = f o K where K is the
// unperturbed map (z -> Lambda z, or (phi, I) -> (phi + omega(I), I)). On vector
// fields R v = (DK)^{-1} v o K. A map x' = K(x) + f(x) is described by its
// coordinate image, the graded Image {K(x), f_1, f_2, ...}.

#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "lietx/lie.hpp"

namespace lietx {

class GradingError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Diagonal linear part z_j -> lambda_j z_j.
template <class C>
struct LinearPart {
  std::vector<C> eigenvalues;
  /// alpha_j = log lambda_j (principal branch shifted by 2 pi * branch_j).
  std::vector<Complex> logs;

  static LinearPart make(std::vector<C> eigenvalues, std::vector<int> branches = {}) {
    LinearPart L;
    for (size_t j = 0; j < eigenvalues.size(); ++j) {
      const Complex z = to_complex(eigenvalues[j]);
      if (is_zero(eigenvalues[j]) || z == Complex(0.0, 0.0))
        throw std::invalid_argument("LinearPart: zero eigenvalue");
      Complex a = std::log(z);
      if (j < branches.size()) a += Complex(0.0, 2.0 * std::numbers::pi * branches[j]);
      L.logs.push_back(a);
    }
    L.eigenvalues = std::move(eigenvalues);
    return L;
  }

  int dimension() const { return static_cast<int>(eigenvalues.size()); }
  Layout layout() const { return Layout{0, dimension()}; }
};

/// Kronecker part phi -> phi + omega(I), I -> I.
///
/// omega(I) = omega0 + domega(I) with domega free of constant terms. The
/// rotation factors rho_j = exp(i omega0_j) live in the coefficient ring (exact
/// mode uses rational points on the unit circle); omega0 is kept as doubles for
/// numerics and constant offsets.
template <class C>
struct KroneckerPart {
  int angles = 0;
  int actions = 0;
  std::vector<C> phase;
  std::vector<double> omega0;
  std::vector<Series<C>> domega;
  /// B_{jl} = d omega_j / d I_l.
  std::vector<std::vector<Series<C>>> B;
  /// Degree cap for action polynomials produced by exp(i <k, domega(I)>).
  int action_degree = 8;

  static KroneckerPart make(int angles, int actions, std::vector<C> phase, std::vector<double> omega0,
                            std::vector<Series<C>> domega = {}, int action_degree = 8) {
    KroneckerPart K;
    K.angles = angles;
    K.actions = actions;
    const Layout layout{angles, actions};
    if (static_cast<int>(phase.size()) != angles || static_cast<int>(omega0.size()) != angles)
      throw DimensionError("KroneckerPart: frequency count must equal the number of angles");
    if (domega.empty()) domega.assign(static_cast<size_t>(angles), Series<C>(layout));
    if (static_cast<int>(domega.size()) != angles) throw DimensionError("KroneckerPart: omega(I) component count");
    for (const auto& w : domega) {
      require_same(layout, w.layout(), "KroneckerPart");
      for (const auto& [e, c] : w.terms()) {
        if (!e.zero_range(0, angles)) throw std::invalid_argument("KroneckerPart: omega must not depend on angles");
        if (w.term_degree(e) == 0) throw std::invalid_argument("KroneckerPart: omega(I) - omega0 has a constant term");
      }
    }
    K.phase = std::move(phase);
    K.omega0 = std::move(omega0);
    K.domega = std::move(domega);
    K.action_degree = action_degree;
    K.B.assign(static_cast<size_t>(angles), std::vector<Series<C>>(static_cast<size_t>(actions), Series<C>(layout)));
    for (int j = 0; j < angles; ++j)
      for (int l = 0; l < actions; ++l) K.B[j][l] = K.domega[j].derivative(angles + l);
    return K;
  }

  /// Float-mode constructor from frequencies.
  static KroneckerPart from_frequencies(int angles, int actions, const std::vector<double>& omega0,
                                        std::vector<Series<C>> domega = {}, int action_degree = 8) {
    std::vector<C> phase;
    for (double w : omega0) phase.push_back(from_complex<C>(std::exp(Complex(0.0, w))));
    return make(angles, actions, std::move(phase), omega0, std::move(domega), action_degree);
  }

  Layout layout() const { return Layout{angles, actions}; }
  bool constant() const {
    for (const auto& w : domega)
      if (!w.empty()) return false;
    return true;
  }

  /// prod rho_j^{k_j}.
  C rotation(const Exponent& k, bool inverse = false) const {
    C r(1);
    for (int j = 0; j < angles; ++j)
      if (k[j] != 0) r *= power(phase[j], inverse ? -k[j] : k[j]);
    return r;
  }
};

template <class C>
using UnperturbedPart = std::variant<LinearPart<C>, KroneckerPart<C>>;

template <class C>
Layout layout_of(const UnperturbedPart<C>& R) {
  return std::visit([](const auto& p) { return p.layout(); }, R);
}

template <class C>
bool is_kronecker(const UnperturbedPart<C>& R) {
  return std::holds_alternative<KroneckerPart<C>>(R);
}

/// Terms dropped by truncation, with human-readable notes.
struct TruncationReport {
  size_t fourier_dropped = 0;
  size_t degree_dropped = 0;
  std::vector<std::string> warnings;

  void merge(const TruncationReport& o) {
    fourier_dropped += o.fourier_dropped;
    degree_dropped += o.degree_dropped;
    warnings.insert(warnings.end(), o.warnings.begin(), o.warnings.end());
  }
};

enum class MapForm {
  /// x' = R x + f_1(x) + ... + f_N(x).
  explicit_map,
  /// x' = T_W o R x with W = perturbation.
  lie_transform,
};

template <class C>
struct MapSpec {
  UnperturbedPart<C> unperturbed;
  /// Piece s holds f_s, or W_s for the lie_transform form (piece 0 unused).
  Graded<Field<C>> perturbation;
  MapForm form = MapForm::explicit_map;
  int order = 1;
  /// Fourier cutoff K_1 at order 1 (0 = maximum mode of the order-1 input).
  int fourier_cutoff = 0;
  /// Numeric size of the perturbation parameter for Fourier-Taylor maps.
  double epsilon = 1.0;

  Layout layout() const { return layout_of(unperturbed); }
};

template <class C>
int effective_cutoff(const MapSpec<C>& spec) {
  if (spec.fourier_cutoff > 0) return spec.fourier_cutoff;
  if (spec.perturbation.max_order() < 1) return 0;
  return spec.perturbation[1].max_mode();
}

/// Checks grading of the perturbation; throws GradingError.
template <class C>
void validate(const MapSpec<C>& spec) {
  const Layout layout = spec.layout();
  if (spec.order < 1) throw GradingError("order must be >= 1");
  if (spec.perturbation.max_order() < spec.order) throw GradingError("perturbation has fewer orders than requested");
  for (int s = 0; s <= spec.perturbation.max_order(); ++s) {
    const auto& f = spec.perturbation[s];
    if (f.empty()) continue;
    if (!(f.layout() == layout)) throw GradingError("perturbation layout does not match the unperturbed map");
    if (s == 0) throw GradingError("perturbation has a term at order 0");
    if (!layout.fourier() && !f.homogeneous(s + 1))
      throw GradingError("order-" + std::to_string(s) + " perturbation is not homogeneous of degree " +
                         std::to_string(s + 1));
  }
}

namespace detail {

template <class C>
Series<C> phase_expansion(const KroneckerPart<C>& K, const Exponent& k, bool inverse, TruncationReport* report) {
  // exp(+-i <k, domega(I)>) as a polynomial in I up to the degree cap
  const Layout layout = K.layout();
  Series<C> arg(layout);
  for (int j = 0; j < K.angles; ++j)
    if (k[j] != 0) arg += (imaginary_unit<C>() * C(inverse ? -k[j] : k[j])) * K.domega[j];
  Series<C> out = Series<C>::constant(layout, C(1));
  Series<C> term = out;
  for (long n = 1; !arg.empty(); ++n) {
    term = term * arg;
    term *= ratio<C>(1, n);
    const size_t d = term.truncate_degree(K.action_degree);
    if (report) report->degree_dropped += d;
    if (term.empty()) break;
    out += term;
  }
  return out;
}

}  // namespace detail

/// R f (or R^{-1} f) for a scalar function.
template <class C>
Series<C> apply_R(const UnperturbedPart<C>& R, const Series<C>& f, bool inverse = false,
                  TruncationReport* report = nullptr) {
  require_same(layout_of(R), f.layout(), "apply_R");
  if (const auto* L = std::get_if<LinearPart<C>>(&R)) {
    Series<C> out(f.layout());
    for (const auto& [e, c] : f.terms()) {
      C factor(1);
      for (int j = 0; j < L->dimension(); ++j)
        if (e[j] != 0) factor *= power(L->eigenvalues[j], inverse ? -e[j] : e[j]);
      out.add(e, c * factor);
    }
    return out;
  }
  const auto& K = std::get<KroneckerPart<C>>(R);
  Series<C> out(f.layout());
  if (K.constant()) {
    for (const auto& [e, c] : f.terms()) out.add(e, c * K.rotation(e, inverse));
    return out;
  }
  std::map<Exponent, Series<C>> cache;
  for (const auto& [e, c] : f.terms()) {
    Exponent k;
    for (int j = 0; j < K.angles; ++j) k.set(j, e[j]);
    auto it = cache.find(k);
    if (it == cache.end()) it = cache.emplace(k, detail::phase_expansion(K, k, inverse, report)).first;
    Series<C> t = Series<C>::monomial(f.layout(), e, c * K.rotation(e, inverse)) * it->second;
    out += t;
  }
  const size_t d = out.truncate_degree(K.action_degree);
  if (report) report->degree_dropped += d;
  return out;
}

/// R v (or R^{-1} v) for a vector field: (DK)^{-1} v o K.
template <class C>
Field<C> apply_R(const UnperturbedPart<C>& R, const Field<C>& v, bool inverse = false,
                 TruncationReport* report = nullptr) {
  require_same(layout_of(R), v.layout(), "apply_R");
  Field<C> out(v.layout());
  if (const auto* L = std::get_if<LinearPart<C>>(&R)) {
    for (int j = 0; j < v.dimension(); ++j) {
      if (v[j].empty()) continue;
      Series<C> s = apply_R(R, v[j], inverse, report);
      s *= power(L->eigenvalues[j], inverse ? 1 : -1);
      out[j] = std::move(s);
    }
    return out;
  }
  const auto& K = std::get<KroneckerPart<C>>(R);
  for (int j = 0; j < v.dimension(); ++j)
    if (!v[j].empty()) out[j] = apply_R(R, v[j], inverse, report);
  // angle block -= B * action block (inverse: +=)
  for (int j = 0; j < K.angles; ++j) {
    for (int l = 0; l < K.actions; ++l) {
      const auto& b = K.B[j][l];
      const auto& w = out[K.angles + l];
      if (b.empty() || w.empty()) continue;
      Series<C> t = b * w;
      if (inverse)
        out[j] += t;
      else
        out[j] -= t;
    }
    if (!K.constant()) {
      const size_t d = out[j].truncate_degree(K.action_degree);
      if (report) report->degree_dropped += d;
    }
  }
  return out;
}

/// R applied to a coordinate image: each component is a function.
template <class C>
Image<C> apply_R(const UnperturbedPart<C>& R, const Image<C>& im, bool inverse = false,
                 TruncationReport* report = nullptr) {
  require_same(layout_of(R), im.layout(), "apply_R");
  Image<C> out(im.layout());
  out.identity() = im.identity();
  out.offset() = im.offset();
  for (int j = 0; j < im.layout().size(); ++j)
    if (!im.displacement()[j].empty()) out.displacement()[j] = apply_R(R, im.displacement()[j], inverse, report);
  if (const auto* K = std::get_if<KroneckerPart<C>>(&R); K && !is_zero(im.identity())) {
    // phi_j -> phi_j +- omega_j(I)
    const double sign = inverse ? -1.0 : 1.0;
    const Complex id = to_complex(im.identity());
    for (int j = 0; j < K->angles; ++j) {
      out.offset()[j] += sign * id * K->omega0[j];
      Series<C> w = im.identity() * K->domega[j];
      if (inverse)
        out.displacement()[j] -= w;
      else
        out.displacement()[j] += w;
    }
  }
  return out;
}

/// Function form: field objects interpreted as tuples of functions.
template <class C>
Field<C> apply_R_componentwise(const UnperturbedPart<C>& R, const Field<C>& f, bool inverse = false,
                               TruncationReport* report = nullptr) {
  Field<C> out(f.layout());
  for (int j = 0; j < f.dimension(); ++j)
    if (!f[j].empty()) out[j] = apply_R(R, f[j], inverse, report);
  return out;
}

template <class C, class T>
Graded<T> apply_R(const UnperturbedPart<C>& R, const Graded<T>& g, bool inverse = false,
                  TruncationReport* report = nullptr) {
  Graded<T> out(g.max_order(), g.zero_piece());
  for (int s = 0; s <= g.max_order(); ++s)
    if (!g[s].empty()) out[s] = apply_R(R, g[s], inverse, report);
  return out;
}

/// Coordinate image of the full map: {K(x), f_1, ..., f_N}, or T_W o R x truncated at N.
template <class C>
Graded<Image<C>> map_image(const MapSpec<C>& spec) {
  const Layout layout = spec.layout();
  const int N = spec.order;
  const Image<C> Rx = apply_R(spec.unperturbed, Image<C>::coordinates(layout));
  if (spec.form == MapForm::lie_transform) return lie_transform_apply(spec.perturbation.resized(N), Rx, N);
  Graded<Image<C>> out(N, Image<C>(layout));
  out[0] = Rx;
  for (int s = 1; s <= N && s <= spec.perturbation.max_order(); ++s)
    out[s] = Image<C>::from_displacement(spec.perturbation[s]);
  return out;
}

template <class C>
Graded<Image<C>> coordinates(Layout layout, int N) {
  return Graded<Image<C>>::single(N, Image<C>::coordinates(layout), 0);
}

namespace detail {

template <class C>
void check_near_identity(const Graded<Image<C>>& map, int N) {
  const Layout layout = map.layout();
  if (!(map[0] - Image<C>::coordinates(layout)).empty())
    throw GradingError("map is not near the identity at order 0");
  for (int s = 1; s <= N; ++s) {
    const auto& im = map[s];
    if (!is_zero(im.identity()) ||
        std::any_of(im.offset().begin(), im.offset().end(), [](const Complex& z) { return z != Complex(0.0, 0.0); }))
      throw GradingError("order-" + std::to_string(s) + " term carries an identity or constant angle part");
    if (!layout.fourier() && !im.displacement().homogeneous(s + 1))
      throw GradingError("order-" + std::to_string(s) + " term is not homogeneous of degree " + std::to_string(s + 1));
  }
}

}  // namespace detail

/// X with T_X x = map to order N: X_r = phi_r - sum_{k<r} (k/r) L_{X_k} E_{r-k} x.
/// Since E_{r-k} x = phi_{r-k} by construction, the inner images are the input terms.
template <class C>
GeneratingSequence<C> extract_generating_sequence(const Graded<Image<C>>& map, int N) {
  if (map.max_order() < N) throw GradingError("map has fewer orders than requested");
  detail::check_near_identity(map, N);
  const Layout layout = map.layout();
  GeneratingSequence<C> X = zero_sequence<C>(layout, N);
  for (int r = 1; r <= N; ++r) {
    Field<C> x = map[r].displacement();
    for (int k = 1; k < r; ++k) {
      if (X[k].empty()) continue;
      Image<C> t = lie_derivative(X[k], map[r - k]);
      t *= ratio<C>(k, r);
      x -= t.displacement();
    }
    X[r] = std::move(x);
  }
  return X;
}

/// X with exp(L_{X_N}) ... exp(L_{X_1}) x = map to order N, built one order at a time.
template <class C>
GeneratingSequence<C> extract_lie_series_factorization(const Graded<Image<C>>& map, int N) {
  if (map.max_order() < N) throw GradingError("map has fewer orders than requested");
  detail::check_near_identity(map, N);
  const Layout layout = map.layout();
  GeneratingSequence<C> X = zero_sequence<C>(layout, N);
  Graded<Image<C>> S = coordinates<C>(layout, N);
  for (int r = 1; r <= N; ++r) {
    X[r] = (map[r] - S[r]).displacement();
    S = exp_lie(X[r], r, S, N);
  }
  return X;
}

template <class C>
struct Factorization {
  /// x' = R o T_V x.
  GeneratingSequence<C> V;
  /// x' = T_W o R x, W_s = R V_s.
  GeneratingSequence<C> W;
  TruncationReport report;
};

/// Both factorizations of x' = R x + f(x) = R(x + R^{-1} f). For the
/// lie_transform form W is given and V_s = R^{-1} W_s.
template <class C>
Factorization<C> factor_map(const MapSpec<C>& spec) {
  validate(spec);
  const Layout layout = spec.layout();
  const int N = spec.order;
  Factorization<C> out;
  if (spec.form == MapForm::lie_transform) {
    out.W = spec.perturbation.resized(N);
    out.V = zero_sequence<C>(layout, N);
    for (int s = 1; s <= N; ++s)
      if (!out.W[s].empty()) out.V[s] = apply_R(spec.unperturbed, out.W[s], true, &out.report);
    return out;
  }
  Graded<Image<C>> near = coordinates<C>(layout, N);
  for (int s = 1; s <= N; ++s) {
    if (spec.perturbation[s].empty()) continue;
    near[s] = Image<C>::from_displacement(
        apply_R_componentwise(spec.unperturbed, spec.perturbation[s], true, &out.report));
  }
  out.V = extract_generating_sequence(near, N);
  out.W = zero_sequence<C>(layout, N);
  for (int s = 1; s <= N; ++s)
    if (!out.V[s].empty()) out.W[s] = apply_R(spec.unperturbed, out.V[s], false, &out.report);
  return out;
}

/// R o T_Y = T_W o R with W_s = R Y_s.
template <class C>
GeneratingSequence<C> commute_past(const UnperturbedPart<C>& R, const GeneratingSequence<C>& Y,
                                   TruncationReport* report = nullptr) {
  GeneratingSequence<C> W(Y.max_order(), Y.zero_piece());
  for (int s = 1; s <= Y.max_order(); ++s)
    if (!Y[s].empty()) W[s] = apply_R(R, Y[s], false, report);
  return W;
}

/// T_X o T_Y = T_W o T_X with W_j = T_X Y_j (a labeled sequence).
template <class C>
LabeledSequence<C> commute_past(const GeneratingSequence<C>& X, const GeneratingSequence<C>& Y, int N) {
  LabeledSequence<C> W(static_cast<size_t>(N + 1), Graded<Field<C>>(N, Field<C>(Y.layout())));
  for (int j = 1; j <= std::min(N, Y.max_order()); ++j) {
    if (Y[j].empty()) continue;
    W[j] = lie_transform_apply(X, Graded<Field<C>>::single(N, Y[j], j), N);
  }
  return W;
}

/// Z with T_Z = T_X o T_Y: Z_s = X_s + Y_s + sum_{j<s} (j/s) E^X_{s-j} Y_j.
template <class C>
GeneratingSequence<C> compose_transforms(const GeneratingSequence<C>& X, const GeneratingSequence<C>& Y, int N) {
  const Layout layout = X.layout();
  require_same(layout, Y.layout(), "compose_transforms");
  const GeneratingSequence<C> Xn = X.resized(N);
  const GeneratingSequence<C> Yn = Y.resized(N);
  GeneratingSequence<C> Z = Xn + Yn;
  for (int j = 1; j < N; ++j) {
    if (Yn[j].empty()) continue;
    LieOperatorTrace<GeneratingSequence<C>, Field<C>> trace(Xn, Graded<Field<C>>::single(N, Yn[j], j), N);
    for (int s = j + 1; s <= N; ++s) {
      Field<C> t = trace.E(s - j)[s];
      if (t.empty()) continue;
      t *= ratio<C>(j, s);
      Z[s] += t;
    }
  }
  return Z;
}

/// W with T_W = exp(L_X) o exp(L_Y) for order-1 fields: W_1 = X + Y, W_s = L_X^{s-1} Y / s!.
template <class C>
GeneratingSequence<C> bch_compose(const Field<C>& X, const Field<C>& Y, int N) {
  require_same(X.layout(), Y.layout(), "bch_compose");
  GeneratingSequence<C> W = zero_sequence<C>(X.layout(), N);
  if (N < 1) return W;
  W[1] = X + Y;
  Field<C> t = Y;
  mpq_class fact(1);
  for (int s = 2; s <= N; ++s) {
    t = commutator(X, t);
    if (t.empty()) break;
    fact *= s;
    Field<C> w = t;
    w *= from_rational<C>(mpq_class(mpq_class(1) / fact));
    W[s] = std::move(w);
  }
  return W;
}

}  // namespace lietx
