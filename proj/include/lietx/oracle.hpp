#pragma once

// Brute-force verifiers: substitution of truncated series into explicit maps
// (with Jacobian inversion for vector fields), numeric iteration, and
// conjugacy checks for normal form results.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "lietx/normalform.hpp"

namespace lietx {

/// Coordinate image of a map as truncated series plus the rotation factors
/// exp(i offset_j) of its constant angle shifts, kept in the coefficient ring.
template <class C>
struct ExplicitMap {
  Graded<Image<C>> image;
  std::vector<C> phase;

  int max_order() const { return image.max_order(); }
  Layout layout() const { return image.layout(); }

  /// Near-identity map with no angle shifts, e.g. T_X x.
  static ExplicitMap from_image(Graded<Image<C>> im) {
    ExplicitMap m;
    m.phase.assign(static_cast<size_t>(im.layout().angles), C(1));
    m.image = std::move(im);
    return m;
  }
};

template <class C>
ExplicitMap<C> explicit_map(const MapSpec<C>& spec) {
  ExplicitMap<C> m;
  m.image = map_image(spec);
  if (const auto* K = std::get_if<KroneckerPart<C>>(&spec.unperturbed))
    m.phase = K->phase;
  return m;
}

template <class C>
ExplicitMap<C> explicit_map(const UnperturbedPart<C>& R, Graded<Image<C>> image) {
  ExplicitMap<C> m;
  m.image = std::move(image);
  if (const auto* K = std::get_if<KroneckerPart<C>>(&R))
    m.phase = K->phase;
  else
    m.phase.clear();
  return m;
}

namespace detail {

template <class C>
using GradedSeries = Graded<Series<C>>;

/// exp(g) for a graded scalar; a nonzero order-0 part must be free of constants
/// and is controlled by the polynomial degree cap.
template <class C>
GradedSeries<C> exp_graded(const GradedSeries<C>& g, int degree_cap) {
  const Layout layout = g.layout();
  const int N = g.max_order();
  GradedSeries<C> out = GradedSeries<C>::single(N, Series<C>::constant(layout, C(1)), 0);
  if (!g[0].empty()) {
    for (const auto& [e, c] : g[0].terms())
      if (g[0].term_degree(e) == 0) throw std::invalid_argument("exp_graded: constant order-0 part");
    if (degree_cap < 0) throw std::invalid_argument("exp_graded: order-0 part needs a degree cap");
  }
  GradedSeries<C> term = out;
  for (long n = 1;; ++n) {
    term = product(term, g);
    term *= ratio<C>(1, n);
    if (degree_cap >= 0)
      for (int s = 0; s <= N; ++s) term[s].truncate_degree(degree_cap);
    if (term.empty()) break;
    out += term;
  }
  return out;
}

template <class C>
struct Substituter {
  const ExplicitMap<C>& map;
  int N;
  int degree_cap;
  Layout layout;
  std::vector<GradedSeries<C>> angle_shift;  // i * delta_j (graded)
  std::vector<std::vector<GradedSeries<C>>> powers;  // powers[v][p] = (x_v o M)^p
  std::map<Exponent, GradedSeries<C>> fourier;       // per Fourier index

  Substituter(const ExplicitMap<C>& m, int n, int cap) : map(m), N(n), degree_cap(cap), layout(m.layout()) {
    const auto& im = map.image;
    for (int s = 1; s <= im.max_order(); ++s)
      if (!is_zero(im[s].identity())) throw std::invalid_argument("substitute: identity part above order 0");
    if (layout.angles > 0 && !(im[0].identity() == C(1)))
      throw std::invalid_argument("substitute: angle maps must have unit identity part");
    for (int j = 0; j < layout.angles; ++j) {
      GradedSeries<C> d(N, Series<C>(layout));
      for (int s = 0; s <= std::min(N, im.max_order()); ++s) d[s] = imaginary_unit<C>() * im[s].displacement()[j];
      angle_shift.push_back(std::move(d));
    }
    powers.resize(static_cast<size_t>(layout.vars));
  }

  const GradedSeries<C>& power_of(int v, int p) {
    auto& pw = powers[static_cast<size_t>(v)];
    if (pw.empty()) {
      pw.push_back(GradedSeries<C>::single(N, Series<C>::constant(layout, C(1)), 0));
      GradedSeries<C> x(N, Series<C>(layout));
      const auto& im = map.image;
      for (int s = 0; s <= std::min(N, im.max_order()); ++s) x[s] = im[s].displacement()[layout.angles + v];
      pw.push_back(std::move(x));
    }
    while (static_cast<int>(pw.size()) <= p) pw.push_back(product(pw.back(), pw[1]));
    return pw[static_cast<size_t>(p)];
  }

  const GradedSeries<C>& fourier_factor(const Exponent& k) {
    auto it = fourier.find(k);
    if (it != fourier.end()) return it->second;
    GradedSeries<C> arg(N, Series<C>(layout));
    C rot(1);
    Exponent mode;
    for (int j = 0; j < layout.angles; ++j) {
      if (k[j] == 0) continue;
      mode.set(j, k[j]);
      GradedSeries<C> t = angle_shift[j];
      t *= C(k[j]);
      arg += t;
      rot *= power(map.phase[j], k[j]);
    }
    GradedSeries<C> f = exp_graded(arg, degree_cap);
    // multiply by rho^k exp(i <k, phi>)
    for (int s = 0; s <= N; ++s) f[s] = Series<C>::monomial(layout, mode, rot) * f[s];
    return fourier.emplace(k, std::move(f)).first->second;
  }

  GradedSeries<C> apply(const Series<C>& f) {
    GradedSeries<C> out(N, Series<C>(layout));
    for (const auto& [e, c] : f.terms()) {
      Exponent k;
      for (int j = 0; j < layout.angles; ++j) k.set(j, e[j]);
      GradedSeries<C> t = layout.angles > 0 ? fourier_factor(k)
                                            : GradedSeries<C>::single(N, Series<C>::constant(layout, C(1)), 0);
      for (int v = 0; v < layout.vars; ++v) {
        const int p = e[layout.angles + v];
        if (p != 0) t = product(t, power_of(v, p));
      }
      t *= c;
      out += t;
    }
    return out;
  }
};

}  // namespace detail

/// f o M truncated at order N (f at order 0).
template <class C>
Graded<Series<C>> substitute(const Series<C>& f, const ExplicitMap<C>& M, int N, int degree_cap = -1) {
  detail::Substituter<C> sub(M, N, degree_cap);
  return sub.apply(f);
}

/// Graded f o M: piece s of f contributes from order s upward.
template <class C>
Graded<Series<C>> substitute(const Graded<Series<C>>& f, const ExplicitMap<C>& M, int N, int degree_cap = -1) {
  detail::Substituter<C> sub(M, N, degree_cap);
  Graded<Series<C>> out(N, Series<C>(M.layout()));
  for (int s = 0; s <= std::min(N, f.max_order()); ++s) {
    if (f[s].empty()) continue;
    Graded<Series<C>> t = sub.apply(f[s]);
    for (int q = 0; q + s <= N; ++q) out[q + s] += t[q];
  }
  return out;
}

/// Composition h o M of coordinate images.
template <class C>
Graded<Image<C>> substitute(const Graded<Image<C>>& h, const ExplicitMap<C>& M, int N, int degree_cap = -1) {
  const Layout layout = M.layout();
  detail::Substituter<C> sub(M, N, degree_cap);
  Graded<Image<C>> out(N, Image<C>(layout));
  for (int s = 0; s <= std::min(N, h.max_order()); ++s) {
    const Image<C>& hs = h[s];
    if (hs.empty()) continue;
    if (!is_zero(hs.identity())) {
      // id * (phi o M) = id * M on the angle components
      for (int q = 0; q + s <= N && q <= M.max_order(); ++q) {
        const Image<C>& m = M.image[q];
        Image<C>& o = out[q + s];
        o.identity() += hs.identity() * m.identity();
        for (int j = 0; j < layout.angles; ++j) {
          o.displacement()[j] += hs.identity() * m.displacement()[j];
          o.offset()[j] += to_complex(hs.identity()) * m.offset()[j];
        }
      }
    }
    for (int j = 0; j < layout.angles; ++j) out[s].offset()[j] += hs.offset()[j];
    for (int j = 0; j < layout.size(); ++j) {
      if (hs.displacement()[j].empty()) continue;
      Graded<Series<C>> t = sub.apply(hs.displacement()[j]);
      for (int q = 0; q + s <= N; ++q) out[q + s].displacement()[j] += t[q];
    }
  }
  return out;
}

template <class C>
using SeriesMatrix = std::vector<std::vector<Graded<Series<C>>>>;

/// J_ij = d M_i / d x_j, graded.
template <class C>
SeriesMatrix<C> jacobian(const ExplicitMap<C>& M, int N) {
  const Layout layout = M.layout();
  const int n = layout.size();
  SeriesMatrix<C> J(static_cast<size_t>(n),
                    std::vector<Graded<Series<C>>>(static_cast<size_t>(n), Graded<Series<C>>(N, Series<C>(layout))));
  for (int s = 0; s <= std::min(N, M.max_order()); ++s) {
    const Image<C>& im = M.image[s];
    for (int i = 0; i < n; ++i) {
      if (i < layout.angles && !is_zero(im.identity()))
        J[i][i][s] += Series<C>::constant(layout, im.identity());
      if (im.displacement()[i].empty()) continue;
      for (int j = 0; j < n; ++j) J[i][j][s] += im.displacement()[i].derivative(j);
    }
  }
  return J;
}

template <class C>
SeriesMatrix<C> multiply(const SeriesMatrix<C>& A, const SeriesMatrix<C>& B) {
  const size_t n = A.size();
  const auto& proto = A[0][0];
  SeriesMatrix<C> out(n, std::vector<Graded<Series<C>>>(n, Graded<Series<C>>(proto.max_order(), proto.zero_piece())));
  for (size_t i = 0; i < n; ++i)
    for (size_t k = 0; k < n; ++k) {
      if (A[i][k].empty()) continue;
      for (size_t j = 0; j < n; ++j)
        if (!B[k][j].empty()) out[i][j] += product(A[i][k], B[k][j]);
    }
  return out;
}

template <class C>
SeriesMatrix<C> identity_matrix(Layout layout, int N) {
  const int n = layout.size();
  SeriesMatrix<C> I(static_cast<size_t>(n),
                    std::vector<Graded<Series<C>>>(static_cast<size_t>(n), Graded<Series<C>>(N, Series<C>(layout))));
  for (int i = 0; i < n; ++i) I[i][i][0] = Series<C>::constant(layout, C(1));
  return I;
}

/// J^{-1} by Neumann iteration around the constant diagonal part of J at order 0.
template <class C>
SeriesMatrix<C> inverse_jacobian(const SeriesMatrix<C>& J, Layout layout, int N) {
  const int n = layout.size();
  std::vector<C> d0(static_cast<size_t>(n));
  SeriesMatrix<C> K = J;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const C c = J[i][j][0].coefficient(Exponent{});
      if (i == j) {
        if (is_zero(c)) throw std::invalid_argument("inverse_jacobian: singular linear part");
        d0[i] = c;
      } else if (!is_zero(c)) {
        throw std::invalid_argument("inverse_jacobian: linear part is not diagonal");
      }
    }
  // K = D0^{-1} (J - D0)
  for (int i = 0; i < n; ++i) {
    K[i][i][0].add(Exponent{}, -d0[i]);
    const C inv = C(1) / d0[i];
    for (int j = 0; j < n; ++j) K[i][j] *= inv;
  }
  SeriesMatrix<C> sum = identity_matrix<C>(layout, N);
  SeriesMatrix<C> term = sum;
  const int cap = (N + 1) * n + 1;
  for (int p = 1; p <= cap; ++p) {
    term = multiply(term, K);
    for (auto& row : term)
      for (auto& e : row) e *= C(-1);
    bool empty = true;
    for (const auto& row : term)
      for (const auto& e : row) empty = empty && e.empty();
    if (empty) break;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) sum[i][j] += term[i][j];
  }
  // (I + K)^{-1} D0^{-1}
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) sum[i][j] *= C(1) / d0[j];
  return sum;
}

/// J^{-1} (v o M): the pulled-back vector field.
template <class C>
Graded<Field<C>> substitute(const Field<C>& v, const ExplicitMap<C>& M, int N, int degree_cap = -1) {
  const Layout layout = M.layout();
  const int n = layout.size();
  detail::Substituter<C> sub(M, N, degree_cap);
  std::vector<Graded<Series<C>>> vm;
  for (int j = 0; j < n; ++j) vm.push_back(sub.apply(v[j]));
  const SeriesMatrix<C> Jinv = inverse_jacobian(jacobian(M, N), layout, N);
  Graded<Field<C>> out(N, Field<C>(layout));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (Jinv[i][j].empty() || vm[j].empty()) continue;
      Graded<Series<C>> t = product(Jinv[i][j], vm[j]);
      for (int s = 0; s <= N; ++s) out[s][i] += t[s];
    }
  return out;
}

// ---------------------------------------------------------------------------
// Lie-side identity checks. Each returns the per-order max coefficient defect.

/// R o T_V x and T_W o R x against the coordinate image of the map.
template <class C>
std::vector<double> factorization_defects(const MapSpec<C>& spec, const GeneratingSequence<C>& V,
                                          const GeneratingSequence<C>& W) {
  const int N = spec.order;
  const Layout layout = spec.layout();
  const Graded<Image<C>> target = map_image(spec);
  const Graded<Image<C>> a = apply_R(spec.unperturbed, lie_transform_apply(V, Image<C>::coordinates(layout), N));
  const Graded<Image<C>> b = lie_transform_apply(W, apply_R(spec.unperturbed, Image<C>::coordinates(layout)), N);
  std::vector<double> d = order_differences(a, target);
  const std::vector<double> e = order_differences(b, target);
  for (size_t s = 0; s < d.size(); ++s) d[s] = std::max(d[s], e[s]);
  return d;
}

/// T_W o R o U x against U o T_Z o R x.
template <class C>
std::vector<double> conjugacy_defects(const MapSpec<C>& spec, const NormalFormResult<C>& r) {
  const int N = r.order;
  const Layout layout = spec.layout();
  const auto x = coordinates<C>(layout, N);
  const Graded<Image<C>> lhs = lie_transform_apply(r.W, apply_R(spec.unperturbed, apply_transform(r, x, N)), N);
  const Graded<Image<C>> rhs = apply_transform(r, normal_form_image(spec.unperturbed, r.Z, N), N);
  return order_differences(lhs, rhs);
}

/// T_Z x against T_X (T_Y x).
template <class C>
std::vector<double> composition_defects(const GeneratingSequence<C>& X, const GeneratingSequence<C>& Y,
                                        const GeneratingSequence<C>& Z, int N) {
  const auto x = coordinates<C>(X.layout(), N);
  return order_differences(lie_transform_apply(Z, x, N), lie_transform_apply(X, lie_transform_apply(Y, x, N), N));
}

/// Substitution-side conjugacy h o F - G o h with h the normalizing map,
/// F the input map and G the normal form map.
template <class C>
std::vector<double> substitution_conjugacy_defects(const MapSpec<C>& spec, const NormalFormResult<C>& r,
                                                   int degree_cap = -1) {
  const int N = r.order;
  const Layout layout = spec.layout();
  const Graded<Image<C>> h = apply_transform(r, coordinates<C>(layout, N), N);
  const ExplicitMap<C> F = explicit_map(spec);
  const Graded<Image<C>> G = normal_form_image(spec.unperturbed, r.Z, N);
  const Graded<Image<C>> lhs = substitute(h, F, N, degree_cap);
  const Graded<Image<C>> rhs = substitute(G, ExplicitMap<C>::from_image(h), N, degree_cap);
  return order_differences(lhs, rhs);
}

// ---------------------------------------------------------------------------
// Numerics.

/// Thread cap from LIETX_THREADS (default: hardware concurrency).
inline unsigned thread_count() {
  unsigned n = std::max(1U, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("LIETX_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) n = static_cast<unsigned>(v);
  }
  return n;
}

/// Numeric map x -> K(x) + sum_s eps^s f_s(x), evaluated without truncation.
template <class C>
class NumericMap {
 public:
  explicit NumericMap(const MapSpec<C>& spec, double epsilon) : image_(map_image(spec)), eps_(epsilon) {}
  explicit NumericMap(const MapSpec<C>& spec) : NumericMap(spec, spec.epsilon) {}

  std::vector<Complex> operator()(std::span<const Complex> x) const { return evaluate(image_, x, eps_); }
  double epsilon() const { return eps_; }

 private:
  Graded<Image<C>> image_;
  double eps_;
};

struct Trajectory {
  std::vector<std::vector<Complex>> points;  // points[0] is the initial point
  bool diverged = false;
};

/// Iterates the map; angles are left unwrapped.
template <class C>
Trajectory iterate_numeric(const MapSpec<C>& spec, std::vector<Complex> point, int steps, double epsilon = -1.0) {
  if (static_cast<int>(point.size()) != spec.layout().size())
    throw DimensionError("iterate_numeric: point dimension mismatch");
  const NumericMap<C> F(spec, epsilon < 0 ? spec.epsilon : epsilon);
  Trajectory t;
  t.points.push_back(point);
  for (int i = 0; i < steps; ++i) {
    point = F(point);
    bool bad = false;
    for (const auto& z : point) bad = bad || !std::isfinite(z.real()) || !std::isfinite(z.imag()) || std::abs(z) > 1e100;
    t.points.push_back(point);
    if (bad) {
      t.diverged = true;
      break;
    }
  }
  return t;
}

struct ResidualReport {
  double radius = 0.0;
  double max_residual = 0.0;
  double mean_residual = 0.0;
  int order = 0;
  int samples = 0;
};

/// Deterministic sample points. Polynomial maps: complex points with |x| = rho.
/// Fourier-Taylor maps: real angles in [0, 2 pi), actions in [-1/2, 1/2].
inline std::vector<std::vector<Complex>> sample_points(Layout layout, double rho, int count, uint64_t seed) {
  std::mt19937_64 gen(seed);
  auto uniform = [&gen]() { return static_cast<double>(gen() >> 11) * 0x1.0p-53; };
  auto gauss = [&]() {
    double u = uniform();
    while (u <= 0.0) u = uniform();
    const double v = uniform();
    return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * std::numbers::pi * v);
  };
  std::vector<std::vector<Complex>> pts;
  for (int i = 0; i < count; ++i) {
    std::vector<Complex> p(static_cast<size_t>(layout.size()));
    if (layout.fourier()) {
      for (int j = 0; j < layout.angles; ++j) p[j] = 2.0 * std::numbers::pi * uniform();
      for (int j = layout.angles; j < layout.size(); ++j) p[j] = uniform() - 0.5;
    } else {
      double norm = 0.0;
      for (auto& z : p) {
        z = Complex(gauss(), gauss());
        norm += std::norm(z);
      }
      norm = std::sqrt(norm);
      for (auto& z : p) z *= rho / norm;
    }
    pts.push_back(std::move(p));
  }
  return pts;
}

/// max_j |h(F(x)) - G(h(x))| over sample points. For Fourier-Taylor maps rho is
/// the size of the perturbation parameter.
template <class C>
ResidualReport conjugacy_residual(const MapSpec<C>& spec, const NormalFormResult<C>& r, double rho, int samples = 64,
                                  uint64_t seed = 1) {
  const int N = r.order;
  const Layout layout = spec.layout();
  const double eps = layout.fourier() ? rho : 1.0;
  const Graded<Image<C>> h = apply_transform(r, coordinates<C>(layout, N), N);
  const Graded<Image<C>> G = normal_form_image(spec.unperturbed, r.Z, N);
  const NumericMap<C> F(spec, layout.fourier() ? rho : spec.epsilon);
  const auto pts = sample_points(layout, rho, samples, seed);
  std::vector<double> res(pts.size(), 0.0);

  auto work = [&](size_t begin, size_t end) {
    for (size_t i = begin; i < end; ++i) {
      const auto hx = evaluate(h, pts[i], eps);
      const auto lhs = evaluate(h, std::span<const Complex>(F(pts[i])), eps);
      const auto rhs = evaluate(G, hx, eps);
      double m = 0.0;
      for (size_t j = 0; j < lhs.size(); ++j) m = std::max(m, std::abs(lhs[j] - rhs[j]));
      res[i] = m;
    }
  };
  const unsigned nt = std::min<unsigned>(thread_count(), static_cast<unsigned>(std::max<size_t>(1, pts.size())));
  if (nt <= 1) {
    work(0, pts.size());
  } else {
    std::vector<std::thread> pool;
    const size_t chunk = (pts.size() + nt - 1) / nt;
    for (unsigned t = 0; t < nt; ++t) {
      const size_t b = t * chunk;
      const size_t e = std::min(pts.size(), b + chunk);
      if (b < e) pool.emplace_back(work, b, e);
    }
    for (auto& th : pool) th.join();
  }
  ResidualReport rep;
  rep.radius = rho;
  rep.order = N;
  rep.samples = static_cast<int>(pts.size());
  for (double v : res) {
    rep.max_residual = std::max(rep.max_residual, v);
    rep.mean_residual += v;
  }
  if (!res.empty()) rep.mean_residual /= static_cast<double>(res.size());
  return rep;
}

}  // namespace lietx
