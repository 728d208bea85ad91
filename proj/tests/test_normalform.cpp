#include <gtest/gtest.h>

#include <numbers>

#include "lietx/lietx.hpp"
#include "support/koenigs.hpp"
#include "support/random.hpp"

using namespace lietx;
using lietx::testing::Rng;

namespace {

using Q = ExactComplex;
const Layout P1{0, 1};
const Layout P2{0, 2};
const Layout FT{1, 1};
const Q kPhase(mpq_class(3, 5), mpq_class(4, 5));
const double kOmega = std::atan2(4.0, 3.0);
const double kGolden = 2.0 * std::numbers::pi * (std::sqrt(5.0) - 1.0) / 2.0;

template <class C>
Series<C> mono(Layout l, Exponent e, C c = C(1)) {
  return Series<C>::monomial(l, e, c);
}

template <class C>
Field<C> field(Layout l, std::vector<Series<C>> comps) {
  return Field<C>::from_components(l, std::move(comps));
}

template <class C>
MapSpec<C> quadratic_spec(const C& lambda, int N) {
  MapSpec<C> spec;
  spec.unperturbed = LinearPart<C>::make({lambda});
  spec.order = N;
  spec.perturbation = Graded<Field<C>>(N, Field<C>(P1));
  spec.perturbation[1][0] = mono<C>(P1, {2});
  return spec;
}

/// cos(phi) + c in the angle block, sin(phi) in the action block.
template <class C>
Field<C> cos_sin(const C& c = C(0)) {
  Field<C> v(FT);
  v[0].add({1, 0}, ratio<C>(1, 2));
  v[0].add({-1, 0}, ratio<C>(1, 2));
  v[0].add({0, 0}, c);
  v[1].add({1, 0}, imaginary_unit<C>() * ratio<C>(-1, 2));
  v[1].add({-1, 0}, imaginary_unit<C>() * ratio<C>(1, 2));
  return v;
}

MapSpec<Complex> twist_spec(int N, MapForm form, const Field<Complex>& f1, double eps = 0.01) {
  MapSpec<Complex> spec;
  spec.unperturbed = KroneckerPart<Complex>::from_frequencies(1, 1, {kGolden});
  spec.order = N;
  spec.form = form;
  spec.fourier_cutoff = 1;
  spec.epsilon = eps;
  spec.perturbation = Graded<Field<Complex>>(N, Field<Complex>(FT));
  spec.perturbation[1] = f1;
  return spec;
}

/// Random nonresonant linear spec: eigenvalues with distinct moduli below 1.
MapSpec<Q> random_nonresonant_spec(Rng& rng, int N) {
  MapSpec<Q> spec;
  spec.unperturbed = LinearPart<Q>::make({Q(mpq_class(rng.integer(2, 4), 7)), Q(mpq_class(rng.integer(5, 6), 11))});
  spec.order = N;
  spec.perturbation = lietx::testing::random_poly_sequence<Q>(rng, P2, N, 2);
  return spec;
}

/// Coefficient of z^n in component 0 of a flattened 1-D image.
template <class C>
C coefficient(const Image<C>& im, int n) {
  return im.displacement()[0].coefficient(Exponent{n});
}

}  // namespace

TEST(SolveLinear, ZeroInput) {
  HomologicalOperator<Q> D(LinearPart<Q>::make({Q(2)}));
  const auto sol = solve_homological_linear(D, Field<Q>(P1));
  EXPECT_TRUE(sol.X.empty());
  EXPECT_TRUE(sol.Z.empty());
}

TEST(SolveLinear, UnitDivisor) {
  // lambda = 2: lambda^2 / lambda - 1 = 1
  HomologicalOperator<Q> D(LinearPart<Q>::make({Q(2)}));
  EXPECT_EQ(D.divisor(Exponent{2}, 0), Q(1));
  const Q psi(mpq_class(7, 3));
  const auto sol = solve_homological_linear(D, field<Q>(P1, {mono<Q>(P1, {2}, psi)}));
  EXPECT_EQ(sol.X, field<Q>(P1, {mono<Q>(P1, {2}, psi)}));
  EXPECT_TRUE(sol.Z.empty());
}

TEST(SolveLinear, ResonantQuinticGoesToKernel) {
  HomologicalOperator<Q> D(LinearPart<Q>::make({imaginary_unit<Q>()}));
  EXPECT_EQ(D.divisor(Exponent{5}, 0), Q(0));
  Diagnostics diag;
  const auto psi = field<Q>(P1, {mono<Q>(P1, {5}, Q(3))});
  const auto sol = solve_homological_linear(D, psi, 4, &diag);
  EXPECT_EQ(sol.Z, psi);
  EXPECT_TRUE(sol.X.empty());
  ASSERT_EQ(diag.resonant_modes.size(), 1U);
  EXPECT_EQ(diag.resonant_modes[0].exponent, std::vector<int>{5});
  EXPECT_EQ(diag.resonant_modes[0].component, 0);
  EXPECT_EQ(diag.resonant_modes[0].divisor, Complex(0.0));
}

TEST(SolveLinear, FloatResonanceTolerance) {
  const Complex i4 = std::exp(Complex(0.0, std::numbers::pi / 2));
  HomologicalOperator<Complex> D(LinearPart<Complex>::make({i4}));
  Diagnostics diag;
  const auto sol = solve_homological_linear(D, field<Complex>(P1, {mono<Complex>(P1, {5})}), 4, &diag);
  EXPECT_FALSE(sol.Z.empty());
  EXPECT_EQ(diag.resonant_modes.size(), 1U);
}

TEST(SolveLinear, NearResonanceWarns) {
  HomologicalOperator<Complex> D(LinearPart<Complex>::make({Complex(1.0 + 1e-8, 0.0)}));
  Diagnostics diag;
  // z^2 e_1: divisor lambda - 1 = 1e-8, inside [tol, floor)
  const auto sol = solve_homological_linear(D, field<Complex>(P1, {mono<Complex>(P1, {2})}), 1, &diag);
  EXPECT_FALSE(sol.X.empty());
  EXPECT_EQ(diag.warnings.size(), 1U);
  EXPECT_NEAR(diag.min_divisor, 1e-8, 1e-15);
}

TEST(SolveKronecker, ZeroModesGoToNormalForm) {
  HomologicalOperator<Q> D(KroneckerPart<Q>::make(1, 1, {kPhase}, {kOmega}));
  const auto psi = field<Q>(FT, {mono<Q>(FT, {0, 1}, Q(2)), mono<Q>(FT, {0, 2}, Q(-1))});
  const auto sol = solve_homological_kronecker(D, psi);
  EXPECT_EQ(sol.Z, psi);
  EXPECT_TRUE(sol.X.empty());
}

TEST(SolveKronecker, HalfTurnDivisor) {
  // omega = pi: divisor e^{i pi} - 1 = -2 on mode 1
  HomologicalOperator<Q> D(KroneckerPart<Q>::make(1, 1, {Q(-1)}, {std::numbers::pi}));
  EXPECT_EQ(D.divisor(Exponent{1, 0}), Q(-2));
  const Q alpha(mpq_class(5, 3));
  const auto sol = solve_homological_kronecker(D, field<Q>(FT, {mono<Q>(FT, {1, 0}, alpha), Series<Q>(FT)}));
  EXPECT_EQ(sol.X, field<Q>(FT, {mono<Q>(FT, {1, 0}, Q(0) - alpha / Q(2)), Series<Q>(FT)}));
  EXPECT_TRUE(sol.Z.empty());
}

TEST(SolveKronecker, BlocksDecoupleWithoutTwist) {
  HomologicalOperator<Q> D(KroneckerPart<Q>::make(1, 1, {kPhase}, {kOmega}));
  const auto psi = field<Q>(FT, {Series<Q>(FT), mono<Q>(FT, {2, 1}, Q(4))});
  const auto sol = solve_homological_kronecker(D, psi);
  EXPECT_TRUE(sol.X[0].empty());
  EXPECT_EQ(sol.X[1], mono<Q>(FT, {2, 1}, Q(4) / (kPhase * kPhase - Q(1))));
}

TEST(SolveKronecker, TwistCrossTerm) {
  // constant coupling B: angle block gains e B beta / (e - 1)^2 and D Xt + Z = Psi holds
  for (uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed);
    const Layout L{2, 1};
    const Q p2(mpq_class(5, 13), mpq_class(12, 13));
    HomologicalOperator<Q> D(KroneckerPart<Q>::make(2, 1, {kPhase, p2}, {kOmega, std::atan2(12.0, 5.0)}));
    D.set_twist({{Q(mpq_class(3, 2))}, {Q(-2)}});
    const auto psi = lietx::testing::random_fourier_field<Q>(rng, L, 2, 2, 3);
    const auto sol = solve_homological_kronecker(D, psi);
    EXPECT_EQ(D.apply(sol.X) + sol.Z, psi) << "seed " << seed;
    for (int j = 0; j < 3; ++j)
      for (const auto& [e, c] : sol.Z[j].terms()) EXPECT_TRUE(e.zero_range(0, 2));
  }
}

TEST(SolveKronecker, ResonantModeAborts) {
  // rho = i: mode 4 has divisor 0
  HomologicalOperator<Q> D(KroneckerPart<Q>::make(1, 1, {imaginary_unit<Q>()}, {std::numbers::pi / 2}));
  const auto psi = field<Q>(FT, {mono<Q>(FT, {4, 0}), Series<Q>(FT)});
  try {
    solve_homological_kronecker(D, psi, 3);
    FAIL() << "expected ResonanceError";
  } catch (const ResonanceError& e) {
    EXPECT_EQ(e.order(), 3);
    EXPECT_EQ(e.mode(), std::vector<int>{4});
  }
}

TEST(SolveKronecker, ActionDependentFrequencyIsRejected) {
  std::vector<Series<Q>> domega{mono<Q>(FT, {0, 1})};
  HomologicalOperator<Q> D(KroneckerPart<Q>::make(1, 1, {kPhase}, {kOmega}, domega));
  const auto psi = field<Q>(FT, {mono<Q>(FT, {1, 0}), Series<Q>(FT)});
  EXPECT_THROW(solve_homological_kronecker(D, psi, 1), ResonanceError);
}

TEST(NormalizeTransform, AlreadyNormal) {
  const UnperturbedPart<Q> R = LinearPart<Q>::make({imaginary_unit<Q>()});
  GeneratingSequence<Q> W = zero_sequence<Q>(P1, 6);
  W[4] = field<Q>(P1, {mono<Q>(P1, {5}, Q(2))});
  const auto r = normalize_lie_transform(R, W, 6, 0);
  EXPECT_EQ(max_abs_difference(r.Z, W), 0.0);
  for (const auto& x : r.X) EXPECT_TRUE(x.empty());
}

TEST(NormalizeTransform, SchroederMatchesKoenigsExact) {
  const Q lambda(mpq_class(2, 5));
  const int N = 6;
  const auto spec = quadratic_spec<Q>(lambda, N);
  const auto r = normalize_lie_transform(spec);
  for (const auto& z : r.Z) EXPECT_TRUE(z.empty());
  const auto k = lietx::testing::koenigs_linearizer(lambda, N + 1);
  const auto h = lietx::testing::koenigs_conjugacy(lambda, N + 1);
  const auto U = apply_transform(r, coordinates<Q>(P1, N), N).flatten();
  const auto Uinv = lie_transform_inverse_apply(r.X, coordinates<Q>(P1, N), N).flatten();
  for (int n = 1; n <= N + 1; ++n) {
    EXPECT_EQ(coefficient(U, n), k[n]) << "z^" << n;
    EXPECT_EQ(coefficient(Uinv, n), h[n]) << "z^" << n;
  }
  EXPECT_EQ(k[2], Q(mpq_class(25, 6)));
  EXPECT_EQ(k[3], Q(mpq_class(625, 63)));
  EXPECT_DOUBLE_EQ(r.diagnostics.min_divisor, 0.6);
}

TEST(NormalizeTransform, SchroederMatchesKoenigsFloat) {
  const int N = 6;
  const auto r = normalize_lie_transform(quadratic_spec<Complex>(0.4, N));
  const auto k = lietx::testing::koenigs_linearizer<Complex>(0.4, N + 1);
  const auto U = apply_transform(r, coordinates<Complex>(P1, N), N).flatten();
  for (int n = 1; n <= N + 1; ++n) EXPECT_LE(std::abs(coefficient(U, n) - k[n]), 1e-12 * std::abs(k[n]));
}

TEST(NormalizeTransform, FirstOrderEquation) {
  // D X_1 = Z_1 - W_1
  for (uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng(seed);
    const auto spec = random_nonresonant_spec(rng, 3);
    const auto r = normalize_lie_transform(spec);
    HomologicalOperator<Q> D(spec.unperturbed);
    EXPECT_EQ(D.apply(r.X[1]), r.Z[1] - r.W[1]);
  }
}

TEST(NormalizeTransform, KernelRangeSplitEveryOrder) {
  const UnperturbedPart<Q> R = LinearPart<Q>::make({imaginary_unit<Q>(), Q(0) - imaginary_unit<Q>()});
  Rng rng(7);
  const auto W = lietx::testing::random_poly_sequence<Q>(rng, P2, 4, 3);
  HomologicalOperator<Q> D(R);
  int checked = 0;
  auto check = [&](int, const Field<Q>& psi, const HomologicalSolution<Q>& sol, const Field<Q>&) {
    EXPECT_EQ(D.apply(sol.X) + sol.Z, psi);
    for (int j = 0; j < 2; ++j) {
      for (const auto& [k, c] : sol.Z[j].terms()) EXPECT_TRUE(is_zero(D.divisor(k, j)));
      for (const auto& [k, c] : sol.X[j].terms()) EXPECT_FALSE(is_zero(D.divisor(k, j)));
    }
    ++checked;
  };
  const auto r = normalize_lie_transform(R, W, 4, 0, {}, detail::OrderCheck<Q>(check));
  EXPECT_EQ(checked, 4);
  EXPECT_FALSE(r.diagnostics.resonant_modes.empty());
  MapSpec<Q> spec;
  spec.unperturbed = R;
  spec.order = 4;
  spec.form = MapForm::lie_transform;
  spec.perturbation = W;
  for (double d : conjugacy_defects(spec, r)) EXPECT_EQ(d, 0.0);
}

TEST(NormalizeTransform, NonresonanceLinearizes) {
  for (uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng(seed);
    const auto spec = random_nonresonant_spec(rng, 4);
    const auto r = normalize_lie_transform(spec);
    EXPECT_TRUE(r.diagnostics.resonant_modes.empty());
    for (const auto& z : r.Z) EXPECT_TRUE(z.empty());
    for (double d : conjugacy_defects(spec, r)) EXPECT_EQ(d, 0.0);
  }
}

TEST(NormalizeSeries, AlreadyNormal) {
  const UnperturbedPart<Q> R = LinearPart<Q>::make({imaginary_unit<Q>()});
  GeneratingSequence<Q> W = zero_sequence<Q>(P1, 6);
  W[4] = field<Q>(P1, {mono<Q>(P1, {5}, Q(2))});
  const auto r = normalize_lie_series(R, W, 6, 0);
  EXPECT_EQ(max_abs_difference(r.Z, W), 0.0);
  for (const auto& x : r.X) EXPECT_TRUE(x.empty());
}

TEST(NormalizeSeries, SingleStepInstance) {
  // r < s < 2r:  W'_s - W_s = (r/s) E^W_{s-r} R X_r - ((s-r)/s) L_{X_r} W'_{s-r}
  Rng rng(8);
  const int N = 5, r = 3, s = 4;
  const UnperturbedPart<Q> R = LinearPart<Q>::make({Q(mpq_class(2, 3)), Q(mpq_class(3, 7))});
  const auto W = lietx::testing::random_poly_sequence<Q>(rng, P2, N, 2);
  const auto Xr = lietx::testing::random_poly_field<Q>(rng, P2, r + 1, 2);
  const auto next = lie_series_update(R, W, r, Xr, W[r]);
  LieOperatorTrace<GeneratingSequence<Q>, Field<Q>> trace(W, Graded<Field<Q>>::single(N, apply_R(R, Xr), r), N);
  Field<Q> a = trace.E(s - r)[s];
  a *= ratio<Q>(r, s);
  Field<Q> b = commutator(Xr, next[s - r]);
  b *= ratio<Q>(s - r, s);
  EXPECT_EQ(next[s] - W[s], a - b);
}

TEST(NormalizeSeries, SingleStepConjugacy) {
  // T_W o R o exp(L_{X_r}) = exp(L_{X_r}) o T_{W'} o R on coordinates
  for (int r = 1; r <= 3; ++r) {
    Rng rng(static_cast<uint64_t>(r));
    const int N = 5;
    const UnperturbedPart<Q> R = LinearPart<Q>::make({Q(mpq_class(2, 3)), Q(mpq_class(-3, 7))});
    auto W = lietx::testing::random_poly_sequence<Q>(rng, P2, N, 2);
    for (int s = 1; s < r; ++s) W[s] = Field<Q>(P2);
    const auto Xr = lietx::testing::random_poly_field<Q>(rng, P2, r + 1, 2);
    const auto Zr = lietx::testing::random_poly_field<Q>(rng, P2, r + 1, 2);
    HomologicalOperator<Q> D(R);
    // make W_r consistent with Z_r - D X_r
    W[r] = Zr - D.apply(Xr);
    const auto next = lie_series_update(R, W, r, Xr, Zr);
    const auto x = coordinates<Q>(P2, N);
    const auto lhs = lie_transform_apply(W, apply_R(R, exp_lie(Xr, r, x, N)), N);
    const auto rhs = exp_lie(Xr, r, lie_transform_apply(next, apply_R(R, x), N), N);
    EXPECT_EQ(max_abs_difference(lhs, rhs), 0.0) << "r=" << r;
  }
}

TEST(NormalizeSeries, AgreesWithTransformDriver) {
  for (uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng(seed);
    const auto spec = random_nonresonant_spec(rng, 4);
    const auto a = normalize(spec, Driver::transform);
    const auto b = normalize(spec, Driver::series);
    EXPECT_EQ(max_abs_difference(a.Z, b.Z), 0.0);
    for (double d : conjugacy_defects(spec, b)) EXPECT_EQ(d, 0.0);
  }
}

TEST(NormalizeSeries, ResonantConjugacy) {
  MapSpec<Q> spec;
  spec.unperturbed = LinearPart<Q>::make({imaginary_unit<Q>()});
  spec.order = 6;
  spec.perturbation = Graded<Field<Q>>(6, Field<Q>(P1));
  spec.perturbation[1][0] = mono<Q>(P1, {2});
  spec.perturbation[4][0] = mono<Q>(P1, {5});
  for (Driver d : {Driver::transform, Driver::series}) {
    const auto r = normalize(spec, d);
    EXPECT_FALSE(r.Z[4].empty());
    for (double x : conjugacy_defects(spec, r)) EXPECT_EQ(x, 0.0) << to_string(d);
  }
}

TEST(Symmetry, Classification) {
  EXPECT_EQ(classify_symmetry(cos_sin<Q>()), SymmetryType::plus_minus);
  Field<Q> sc(FT);
  sc[0] = cos_sin<Q>()[1];
  sc[1] = cos_sin<Q>()[0];
  EXPECT_EQ(classify_symmetry(sc), SymmetryType::minus_plus);
  Field<Q> mixed = cos_sin<Q>();
  mixed[1] = mixed[0];
  EXPECT_EQ(classify_symmetry(mixed), SymmetryType::none);
}

TEST(Symmetry, CommutatorOfPlusMinusPair) {
  Field<Q> a = cos_sin<Q>();
  Field<Q> b(FT);
  b[0] = mono<Q>(FT, {0, 1});  // I, even
  b[1].add({2, 0}, imaginary_unit<Q>());
  b[1].add({-2, 0}, Q(0) - imaginary_unit<Q>());  // -2 sin 2 phi, odd
  ASSERT_EQ(classify_symmetry(b), SymmetryType::plus_minus);
  const auto c = commutator(a, b);
  ASSERT_FALSE(c.empty());
  EXPECT_EQ(classify_symmetry(c), SymmetryType::minus_plus);
}

TEST(Symmetry, TableOnRandomFields) {
  for (uint64_t seed = 0; seed < 30; ++seed) {
    Rng rng(seed);
    const Layout L{1, 2};
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        const auto X = lietx::testing::random_typed_field<Q>(rng, L, 2, 2, 2, a == 0);
        const auto Y = lietx::testing::random_typed_field<Q>(rng, L, 2, 2, 2, b == 0);
        const auto expected = (a == b) ? SymmetryType::minus_plus : SymmetryType::plus_minus;
        EXPECT_TRUE(has_symmetry(commutator(X, Y), expected)) << "seed " << seed;
      }
  }
}

TEST(Reversible, ZeroPerturbationKeepsFrequency) {
  const auto spec = twist_spec(3, MapForm::lie_transform, Field<Complex>(FT));
  const auto rr = normalize_reversible(spec);
  EXPECT_NEAR(rr.frequency[0].offset()[0].real(), kGolden, 1e-15);
  for (int s = 1; s <= 3; ++s) EXPECT_TRUE(rr.frequency[s].empty());
}

TEST(Reversible, FirstOrderIsMeanOfPsi) {
  const Complex c(0.25, 0.0);
  const auto spec = twist_spec(3, MapForm::lie_transform, cos_sin<Complex>(c));
  const auto rr = normalize_reversible(spec);
  const auto& Z1 = rr.result.Z[1];
  EXPECT_TRUE(Z1[1].empty());
  EXPECT_EQ(Z1[0].size(), 1U);
  EXPECT_NEAR(std::abs(Z1[0].coefficient({0, 0}) - c), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(rr.frequency[1].displacement()[0].coefficient({0, 0}) - c), 0.0, 1e-15);
}

TEST(Reversible, ActionBlocksVanishAndOnlyZeroModes) {
  const auto spec = twist_spec(6, MapForm::lie_transform, cos_sin<Complex>());
  const auto rr = normalize_reversible(spec);
  for (int s = 1; s <= 6; ++s) {
    const auto& Z = rr.result.Z[s];
    EXPECT_TRUE(Z[1].empty()) << "order " << s;
    for (const auto& [e, c] : Z[0].terms()) EXPECT_EQ(e[0], 0) << "order " << s;
    EXPECT_EQ(classify_symmetry(Z), SymmetryType::plus_minus);
  }
  EXPECT_GT(rr.result.diagnostics.min_divisor, 0.0);
  for (double d : conjugacy_defects(spec, rr.result)) EXPECT_LE(d, 1e-10);
}

TEST(Reversible, NormalizingFieldHasNoFixedTypeAtFirstOrder) {
  // 1/(rho^k - 1) mixes parity, so X_1 is of neither type with D = R - 1
  const auto spec = twist_spec(2, MapForm::lie_transform, cos_sin<Complex>());
  const auto rr = normalize_reversible(spec);
  EXPECT_EQ(classify_symmetry(rr.result.X[1]), SymmetryType::none);
}

TEST(Reversible, NonReversibleInputRejected) {
  Field<Complex> f(FT);
  f[0] = cos_sin<Complex>()[1];  // sin in the angle block
  const auto spec = twist_spec(2, MapForm::lie_transform, f);
  try {
    normalize_reversible(spec);
    FAIL() << "expected SymmetryError";
  } catch (const SymmetryError& e) {
    EXPECT_NE(std::string(e.what()).find("order 1"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("angle block"), std::string::npos);
  }
}

TEST(Reversible, ExplicitMapFormBreaksTypeAtSecondOrder) {
  // phi' = phi + omega + cos phi, I' = I + sin phi: W_2 is no longer (+,-)
  const auto spec = twist_spec(3, MapForm::explicit_map, cos_sin<Complex>());
  try {
    normalize_reversible(spec);
    FAIL() << "expected SymmetryError";
  } catch (const SymmetryError& e) {
    EXPECT_NE(std::string(e.what()).find("order 2"), std::string::npos);
  }
}

TEST(Reversible, ExplicitMapHasSecondOrderActionDrift) {
  // the explicit map drifts in I by -eps^2/4 per step on average; Z_2 records it
  const double eps = 0.01;
  const auto spec = twist_spec(3, MapForm::explicit_map, cos_sin<Complex>(), eps);
  const auto r = normalize_lie_transform(spec);
  EXPECT_NEAR(std::abs(r.Z[2][1].coefficient({0, 0}) - Complex(-0.25)), 0.0, 1e-12);
  const int steps = 20000;
  const auto t = iterate_numeric(spec, {0.3, 0.0}, steps);
  ASSERT_FALSE(t.diverged);
  const double drift = t.points.back()[1].real() / steps;
  EXPECT_NEAR(drift / (eps * eps), -0.25, 0.01);
}

TEST(Diagnostics, FourierBoxMinDivisor) {
  const auto spec = twist_spec(4, MapForm::lie_transform, cos_sin<Complex>());
  const auto r = normalize_lie_transform(spec);
  EXPECT_EQ(r.diagnostics.box_max_mode, 4);
  double expected = 1e300;
  for (int k = 1; k <= 4; ++k) expected = std::min(expected, 2.0 * std::abs(std::sin(k * kGolden / 2)));
  EXPECT_NEAR(r.diagnostics.box_min_divisor, expected, 1e-14);
  EXPECT_LE(r.diagnostics.box_min_divisor, r.diagnostics.min_divisor);
  const auto s = normalize_lie_series(spec);
  EXPECT_EQ(s.diagnostics.box_min_divisor, r.diagnostics.box_min_divisor);
}

TEST(Diagnostics, NoBoxForLinearPart) {
  const auto r = normalize_lie_transform(quadratic_spec<Q>(Q(mpq_class(2, 5)), 3));
  EXPECT_EQ(r.diagnostics.box_max_mode, 0);
  EXPECT_TRUE(std::isinf(r.diagnostics.box_min_divisor));
}
