// Exterior calculus on T^d and the traced algebra backends.

#include <gtest/gtest.h>

#include <array>
#include <random>

#include "nccs/nccs.hpp"

namespace nccs {
namespace {

using Dense = Eigen::MatrixXcd;

Dense unit(int n, int i, int j) {
  Dense m = Dense::Zero(n, n);
  m(i, j) = 1.0;
  return m;
}

Mat<cplx> scalar_mat(const Dense& d) { return DenseView<ScalarAlgebra>::from_dense(ScalarAlgebra{}, d); }

ScalarForm matrix_monomial(int dim, Mask mask, Freq k, const Dense& m) {
  return ScalarForm::monomial(scalars(), dim, mask, k, scalar_mat(m));
}

/// Point evaluation of the dx_I component: sum_k M_k exp(2 pi i k.x).
Dense evaluate(const ScalarForm& f, Mask mask, const std::array<double, 4>& x) {
  Dense r = Dense::Zero(f.rows(), f.cols());
  auto it = f.parts().find(mask);
  if (it == f.parts().end()) return r;
  for (const auto& [k, c] : it->second) {
    double phase = 0.0;
    for (int j = 0; j < f.dim(); ++j) phase += k[static_cast<std::size_t>(j)] * x[static_cast<std::size_t>(j)];
    r += std::exp(kTwoPiI * phase) * DenseView<ScalarAlgebra>::to_dense(ScalarAlgebra{}, c);
  }
  return r;
}

TEST(FourierForms, MonomialTimesItsInverseIsOne) {
  const auto a = scalar_monomial(1, 0, Freq{1}, 1.0);
  const auto b = scalar_monomial(1, 0, Freq{-1}, 1.0);
  const auto p = wedge(a, b);
  EXPECT_EQ(p.support_size(), 1u);
  EXPECT_EQ(p.coefficient(0, Freq{})(0, 0), cplx(1.0));
}

TEST(FourierForms, MatrixAndFrequencyProduct) {
  const auto a = matrix_monomial(1, 0, Freq{1}, unit(2, 0, 1));
  const auto b = matrix_monomial(1, 0, Freq{1}, unit(2, 1, 0));
  const auto expected = matrix_monomial(1, 0, Freq{2}, unit(2, 0, 0));
  EXPECT_EQ((wedge(a, b) - expected).max_abs(), 0.0);
  EXPECT_FALSE(wedge(a, b).empty());
}

TEST(FourierForms, InvolutionIsAdditiveAndConjugatesFrequencies) {
  std::mt19937_64 rng(3);
  RandomFormSpec spec{2, 2, 2, 3, 2, 1.0};
  const auto f = random_form<ScalarAlgebra>(scalars(), spec, {0, 1, 2}, rng);
  const auto g = random_form<ScalarAlgebra>(scalars(), spec, {0, 1, 2}, rng);
  EXPECT_LE((star(f + g) - (star(f) + star(g))).max_abs(), 1e-15);
  const Dense m = random_matrix(2, 2, rng);
  const auto s = star(matrix_monomial(2, 0, Freq{2, -1}, m));
  const Dense got = DenseView<ScalarAlgebra>::to_dense(ScalarAlgebra{}, s.coefficient(0, Freq{-2, 1}));
  EXPECT_LE((got - m.adjoint()).cwiseAbs().maxCoeff(), 0.0);
}

TEST(FourierForms, DerivativeOfConstantVanishes) {
  EXPECT_TRUE(exterior_derivative(scalar_monomial(3, 0, Freq{}, cplx(2.0, 1.0))).empty());
}

TEST(FourierForms, DerivativeOfMonomial) {
  const auto d = exterior_derivative(scalar_monomial(2, 0, Freq{2, 3}, 1.0));
  EXPECT_EQ(d.support_size(), 2u);
  EXPECT_NEAR(std::abs(d.coefficient(1, Freq{2, 3})(0, 0) - 2.0 * kTwoPiI), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(d.coefficient(2, Freq{2, 3})(0, 0) - 3.0 * kTwoPiI), 0.0, 1e-14);
}

TEST(FourierForms, DerivativeMatchesFiniteDifferences) {
  std::mt19937_64 rng(11);
  RandomFormSpec spec{3, 2, 2, 4, 2, 1.0};
  const auto f = random_form<ScalarAlgebra>(scalars(), spec, {0}, rng);
  const auto df = exterior_derivative(f);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double h = 1e-5;
  for (int trial = 0; trial < 5; ++trial) {
    std::array<double, 4> x{u(rng), u(rng), u(rng), 0.0};
    for (int j = 0; j < 3; ++j) {
      auto xp = x, xm = x;
      xp[static_cast<std::size_t>(j)] += h;
      xm[static_cast<std::size_t>(j)] -= h;
      const Dense fd = (evaluate(f, 0, xp) - evaluate(f, 0, xm)) / (2.0 * h);
      const Dense exact = evaluate(df, static_cast<Mask>(1u << j), x);
      EXPECT_LE((fd - exact).cwiseAbs().maxCoeff(), 1e-6 * (1.0 + exact.cwiseAbs().maxCoeff()));
    }
  }
}

TEST(FourierForms, WedgeSigns) {
  const auto dx = scalar_monomial(2, 1, Freq{}, 1.0);
  const auto dy = scalar_monomial(2, 2, Freq{}, 1.0);
  EXPECT_TRUE(wedge(dx, dx).empty());
  EXPECT_EQ((wedge(dy, dx) + wedge(dx, dy)).max_abs(), 0.0);
  EXPECT_EQ(wedge(dx, dy).coefficient(3, Freq{})(0, 0), cplx(1.0));
}

TEST(FourierForms, MatrixCoefficientsBreakGradedCommutativity) {
  const auto a = matrix_monomial(2, 1, Freq{}, unit(2, 0, 1));
  const auto b = matrix_monomial(2, 2, Freq{}, unit(2, 1, 0));
  EXPECT_EQ((wedge(a, b) - matrix_monomial(2, 3, Freq{}, unit(2, 0, 0))).max_abs(), 0.0);
  EXPECT_EQ((wedge(b, a) + matrix_monomial(2, 3, Freq{}, unit(2, 1, 1))).max_abs(), 0.0);
}

TEST(FourierForms, WedgePointwiseAgreesWithDenseProduct) {
  std::mt19937_64 rng(5);
  RandomFormSpec spec{2, 2, 2, 2, 2, 1.0};
  const auto f = random_form<ScalarAlgebra>(scalars(), spec, {0}, rng);
  const auto g = random_form<ScalarAlgebra>(scalars(), spec, {1}, rng);
  const auto fg = wedge(f, g);
  const std::array<double, 4> x{0.137, 0.712, 0.0, 0.0};
  for (Mask m : {Mask{1}, Mask{2}}) {
    const Dense expect = evaluate(f, 0, x) * evaluate(g, m, x);
    EXPECT_LE((evaluate(fg, m, x) - expect).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(FourierForms, PairingWithCycles) {
  EXPECT_EQ(pair_with_cycle(scalar_monomial(1, 1, Freq{}, 1.0), 1), cplx(1.0));
  EXPECT_EQ(pair_with_cycle(scalar_monomial(1, 1, Freq{1}, 1.0), 1), cplx(0.0));
  std::mt19937_64 rng(8);
  RandomFormSpec spec{3, 1, 1, 3, 2, 1.0};
  const auto f = random_form<ScalarAlgebra>(scalars(), spec, {0, 1, 2}, rng);
  for (const auto& [m, v] : cycle_pairings(exterior_derivative(f), false)) EXPECT_EQ(v, cplx(0.0));
  // Restriction to the x-circle sets y = 0, so e^{2 pi i y} dx pairs to 1.
  EXPECT_EQ(pair_with_cycle(scalar_monomial(2, 1, Freq{0, 1}, 1.0), 1), cplx(1.0));
  EXPECT_EQ(pair_with_cycle(scalar_monomial(2, 1, Freq{1, 1}, 1.0), 1), cplx(0.0));
  EXPECT_THROW(pair_with_cycle(matrix_monomial(1, 1, Freq{}, unit(2, 0, 0)), 1), ContractError);
}

TEST(FourierForms, ShapeAndDimensionErrors) {
  const auto a = matrix_monomial(1, 0, Freq{}, Dense::Identity(2, 2));
  const auto b = matrix_monomial(1, 0, Freq{}, Dense::Identity(3, 3));
  EXPECT_THROW(wedge(a, b), StructuralError);
  EXPECT_THROW(a + matrix_monomial(2, 0, Freq{}, Dense::Identity(2, 2)), StructuralError);
  EXPECT_THROW(scalar_monomial(5, 0, Freq{}, 1.0), ContractError);
  EXPECT_THROW(scalar_monomial(1, 2, Freq{}, 1.0), StructuralError);
}

TEST(FourierForms, SupportCapRaisesResourceError) {
  set_support_cap(3);
  EXPECT_THROW(
      {
        ScalarForm f(scalars(), 1, 1, 1);
        for (int k = 0; k < 5; ++k) f.add_term(0, Freq{k}, scalar_mat(Dense::Ones(1, 1)));
        f.canonicalize();
      },
      ResourceError);
  set_support_cap(1'000'000);
}

class CalculusProperties : public ::testing::TestWithParam<int> {};

TEST_P(CalculusProperties, DSquaredLeibnizAssociativity) {
  const int d = GetParam();
  std::mt19937_64 rng(100 + d);
  RandomFormSpec spec{d, 2, 2, 2, 2, 1.0};
  std::vector<int> all;
  for (int k = 0; k <= d; ++k) all.push_back(k);
  for (int i = 0; i < 10; ++i) {
    const auto a = random_form<ScalarAlgebra>(scalars(), spec, all, rng);
    const auto b = random_form<ScalarAlgebra>(scalars(), spec, all, rng);
    const auto c = random_form<ScalarAlgebra>(scalars(), spec, all, rng);
    EXPECT_LE(exterior_derivative(exterior_derivative(a)).max_abs(), 1e-12);
    EXPECT_LE((wedge(wedge(a, b), c) - wedge(a, wedge(b, c))).max_abs(), 1e-12);
    for (int p = 0; p <= d; ++p) {
      const auto ap = a.homogeneous(p);
      const double sign = p % 2 ? -1.0 : 1.0;
      const auto lhs = exterior_derivative(wedge(ap, b));
      const auto rhs = wedge(exterior_derivative(ap), b) + sign * wedge(ap, exterior_derivative(b));
      EXPECT_LE((lhs - rhs).max_abs(), 1e-12 * (1.0 + lhs.max_abs()));
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Dimensions, CalculusProperties, ::testing::Values(1, 2, 3, 4));

// ---------------------------------------------------------------------------
// Algebra backends.

TEST(MatrixBackend, NormalizedTraceIsTracial) {
  MatrixAlgebra alg(3);
  std::mt19937_64 rng(1);
  EXPECT_EQ(alg.trace(alg.one()), cplx(1.0));
  const Dense a = random_matrix(3, 3, rng), b = random_matrix(3, 3, rng);
  EXPECT_LE(std::abs(alg.trace(alg.mul(a, b)) - alg.trace(alg.mul(b, a))), 1e-12);
  EXPECT_LE(std::abs(alg.trace(alg.star(a)) - std::conj(alg.trace(a))), 1e-15);
}

TEST(TrigPolyBackend, TraceIsMeanAndTracial) {
  TrigPolyAlgebra alg(2);
  const auto f = TrigPoly::monomial(2, Freq{1, 0}, 2.0) + TrigPoly::constant(2, 0.5);
  const auto g = TrigPoly::monomial(2, Freq{-1, 0}, 3.0);
  EXPECT_EQ(alg.trace(alg.mul(f, g)), cplx(6.0));
  EXPECT_EQ(alg.trace(alg.mul(f, g)), alg.trace(alg.mul(g, f)));
  EXPECT_EQ(alg.trace(alg.one()), cplx(1.0));
}

TEST(RotationBackend, GeneratorPowersHaveZeroTrace) {
  auto alg = make_rotation_algebra(0.3);
  EXPECT_EQ(alg->trace(alg->one()), cplx(1.0));
  for (int m : {-3, -1, 1, 2}) EXPECT_EQ(alg->trace(alg->generator(m)), cplx(0.0));
}

TEST(RotationBackend, CommutatorTraceMatchesHandExpansion) {
  for (double theta : {1.0 / 3.0, 0.25, 0.6180339887}) {
    auto alg = make_rotation_algebra(theta);
    const auto u = rotation_u(*alg), ui = rotation_u(*alg, -1);
    const auto w = alg->mul(alg->mul(alg->mul(u, alg->generator(1)), ui), alg->generator(-1));
    EXPECT_LE(std::abs(alg->trace(w) - std::exp(-kTwoPiI * theta)), 1e-14);
  }
}

TEST(RotationBackend, RotationRelation) {
  const double theta = 0.6180339887;
  auto alg = make_rotation_algebra(theta);
  const auto lhs =
      alg->mul(alg->mul(alg->generator(1), rotation_u(*alg)), alg->generator(-1));
  const auto rhs = alg->scale(std::exp(kTwoPiI * theta), rotation_u(*alg));
  EXPECT_LE(alg->norm(alg->add(lhs, alg->scale(-1.0, rhs))), 1e-12);
}

TEST(RotationBackend, RandomElementsAreTracial) {
  auto alg = make_rotation_algebra(0.41);
  std::mt19937_64 rng(2);
  auto draw = [&] {
    RotationAlgebra::element e;
    for (int m = -2; m <= 2; ++m) {
      TrigPoly f(1);
      for (int k = -2; k <= 2; ++k) f += TrigPoly::monomial(1, Freq{k}, random_complex(rng));
      e = alg->add(e, alg->term(f, m));
    }
    return e;
  };
  for (int i = 0; i < 5; ++i) {
    const auto a = draw(), b = draw();
    EXPECT_LE(std::abs(alg->trace(alg->mul(a, b)) - alg->trace(alg->mul(b, a))), 1e-10);
    EXPECT_LE(std::abs(alg->trace(alg->star(a)) - std::conj(alg->trace(a))), 1e-12);
  }
}

TEST(CrossedProduct, TrivialActionOverMatrices) {
  auto base = std::make_shared<const MatrixAlgebra>(2);
  const std::vector<Dense> samples = {unit(2, 0, 1)};
  auto alg = build_crossed_product<MatrixAlgebra>(
      base, [](int, const Dense& a) { return a; }, samples);
  const Dense f = unit(2, 0, 0) + 2.0 * unit(2, 1, 1);
  EXPECT_LE(std::abs(alg->trace(alg->term(f, 0)) - 1.5), 1e-15);
  EXPECT_EQ(alg->trace(alg->term(f, 2)), cplx(0.0));
  const auto p = alg->mul(alg->term(f, 1), alg->term(f, -1));
  EXPECT_LE(std::abs(alg->trace(p) - base->trace(f * f)), 1e-14);
}

TEST(CrossedProduct, RejectsTraceChangingAction) {
  auto base = std::make_shared<const MatrixAlgebra>(2);
  const std::vector<Dense> samples = {unit(2, 0, 0)};
  EXPECT_THROW(build_crossed_product<MatrixAlgebra>(
                   base, [](int m, const Dense& a) { return Dense(std::pow(2.0, m) * a); }, samples),
               ContractError);
}

TEST(CrossedProduct, PowerCapIsEnforced) {
  auto alg = make_rotation_algebra(0.1);
  EXPECT_THROW(alg->generator(65), ResourceError);
}

// Free product A * C(S^1).

class FreeProduct : public ::testing::Test {
 protected:
  FreeProductAlgebra fp{2, 32};
  std::mt19937_64 rng{21};
  Dense random_a() { return random_matrix(2, 2, rng); }
};

TEST_F(FreeProduct, GeneratorTraces) {
  EXPECT_EQ(fp.trace(fp.one()), cplx(1.0));
  for (int k : {-2, -1, 1, 3}) EXPECT_EQ(fp.trace(fp.z(k)), cplx(0.0));
  EXPECT_LE(std::abs(fp.trace(fp.mul(fp.z(1), fp.z(-1))) - 1.0), 1e-15);
  const Dense a = random_a();
  EXPECT_LE(std::abs(fp.trace(fp.embed(a)) - a.trace() / 2.0), 1e-15);
}

TEST_F(FreeProduct, CenteredWordsFactorize) {
  const Dense a = random_a(), b = random_a();
  const auto w = fp.word({FreeLetter::base(a), FreeLetter::z(1), FreeLetter::base(b), FreeLetter::z(-1)});
  EXPECT_LE(std::abs(fp.trace(w) - (a.trace() / 2.0) * (b.trace() / 2.0)), 1e-13);
}

TEST_F(FreeProduct, LengthFourMomentFormula) {
  // a1 b1 a2 b2 with a_i in A and b_i in C(S^1):
  // tau = tau(a1 a2) tau(b1) tau(b2) + tau(a1) tau(a2) tau(b1 b2) - tau(a1) tau(a2) tau(b1) tau(b2).
  const Dense a1 = random_a(), a2 = random_a();
  const cplx c = random_complex(rng), d = random_complex(rng);
  const auto b1 = fp.add(fp.z(1), fp.scale(c, fp.one()));
  const auto b2 = fp.add(fp.z(-1), fp.scale(d, fp.one()));
  const auto w = fp.mul(fp.mul(fp.embed(a1), b1), fp.mul(fp.embed(a2), b2));
  auto t = [](const Dense& m) { return m.trace() / 2.0; };
  const cplx expected = t(a1 * a2) * c * d + t(a1) * t(a2) * (1.0 + c * d) - t(a1) * t(a2) * c * d;
  EXPECT_LE(std::abs(fp.trace(w) - expected), 1e-12);
}

TEST_F(FreeProduct, TraceIsTracialAndStarConsistent) {
  for (int i = 0; i < 10; ++i) {
    const auto x = fp.add(fp.word(random_free_word(2, 3, rng)), fp.word(random_free_word(2, 2, rng)));
    const auto y = fp.word(random_free_word(2, 4, rng));
    EXPECT_LE(std::abs(fp.trace(fp.mul(x, y)) - fp.trace(fp.mul(y, x))), 1e-10);
    EXPECT_LE(std::abs(fp.trace(fp.star(x)) - std::conj(fp.trace(x))), 1e-12);
  }
}

TEST_F(FreeProduct, PhiFixesAAndMovesZRight) {
  const Dense a = random_a();
  const Dense u = sample_haar_unitary(2, rng);
  EXPECT_LE(fp.norm(fp.add(fp.phi(fp.embed(a), u), fp.scale(-1.0, fp.embed(a)))), 1e-15);
  const auto zaz = fp.word({FreeLetter::z(1), FreeLetter::base(a), FreeLetter::z(1)});
  const auto expected = fp.word({FreeLetter::z(1), FreeLetter::base(u), FreeLetter::base(a),
                                 FreeLetter::z(1), FreeLetter::base(u)});
  EXPECT_LE(fp.norm(fp.add(fp.phi(zaz, u), fp.scale(-1.0, expected))), 1e-14);
  const auto w = fp.word(random_free_word(2, 5, rng));
  EXPECT_LE(fp.norm(fp.add(fp.phi(w, Dense::Identity(2, 2)), fp.scale(-1.0, w))), 1e-14);
  const Dense v = sample_haar_unitary(2, rng);
  // Composition: phi_v phi_u = phi_{vu}. Words built from u then v are not
  // bitwise equal to words built from vu, so compare through the trace.
  const auto lhs = fp.phi(fp.phi(w, u), v), rhs = fp.phi(w, v * u);
  for (int i = 0; i < 5; ++i) {
    const auto y = fp.word(random_free_word(2, 4, rng));
    EXPECT_LE(std::abs(fp.trace(fp.mul(y, lhs)) - fp.trace(fp.mul(y, rhs))), 1e-12);
  }
  EXPECT_THROW(fp.phi(w, 2.0 * Dense::Identity(2, 2)), ContractError);
}

TEST_F(FreeProduct, WordCapOverflowIsAnError) {
  FreeProductAlgebra small(2, 4);
  const Dense a = random_a();
  const auto w = small.word({FreeLetter::z(1), FreeLetter::base(a), FreeLetter::z(1), FreeLetter::base(a)});
  EXPECT_THROW(small.mul(w, w), TruncationError);
}

TEST(FreeCrossed, CommutatorTraces) {
  Dense psi = Dense::Zero(2, 2);
  psi(0, 0) = std::exp(kTwoPiI / 5.0);
  psi(1, 1) = std::exp(-kTwoPiI / 5.0);
  auto fp = std::make_shared<const FreeProductAlgebra>(2, 32);
  auto alg = make_free_crossed_algebra(fp, psi);
  const double c = std::cos(2.0 * kPi / 5.0);
  const auto w = fp->word({FreeLetter::z(1), FreeLetter::base(psi), FreeLetter::z(-1),
                           FreeLetter::base(psi.adjoint())});
  EXPECT_LE(std::abs(fp->trace(w) - c * c), 1e-13);
  // gamma z^{-1} gamma^{-1} = (z psi)^{-1}, so (z gamma)(z^{-1} gamma^{-1}) = z psi^* z^{-1}.
  const auto zg = alg->mul(alg->embed(fp->z(1)), alg->generator(1));
  const auto zg_inv = alg->mul(alg->embed(fp->z(-1)), alg->generator(-1));
  const cplx t = alg->trace(alg->mul(zg, zg_inv));
  EXPECT_LE(std::abs(t - std::conj(cplx(c, 0.0))), 1e-13);
  EXPECT_EQ(alg->trace(alg->mul(zg, zg)), cplx(0.0));
}

// Monte-Carlo Haar trace.

TEST(HaarBackend, UnitHasExactTraceAndNoError) {
  HaarFunctionAlgebra alg(2, 1000, 4);
  const auto e = alg.estimate(alg.one());
  EXPECT_EQ(e.value, cplx(1.0));
  EXPECT_EQ(e.std_error, 0.0);
}

TEST(HaarBackend, SecondMomentWithinThreeStandardErrors) {
  for (std::size_t n : {10000u, 100000u}) {
    HaarFunctionAlgebra alg(2, n, 17);
    const auto f = alg.mul(alg.entry(0, 0), alg.entry(0, 0, true));
    const auto e = alg.estimate(f);
    EXPECT_GT(e.std_error, 0.0);
    EXPECT_LE(std::abs(e.value - 0.5), 3.0 * e.std_error) << "N = " << n;
  }
}

TEST(HaarBackend, NontrivialGroupPartHasZeroTrace) {
  auto base = std::make_shared<const HaarFunctionAlgebra>(2, 500, 9);
  auto alg = make_haar_crossed_algebra(base, Dense::Identity(2, 2));
  const auto e = alg->term(base->entry(0, 1), 1);
  EXPECT_EQ(alg->trace(e), cplx(0.0));
  EXPECT_EQ(haar_trace(*alg, e).std_error, 0.0);
}

TEST(HaarBackend, SamplesAreDeterministicAcrossThreads) {
  HaarFunctionAlgebra a(3, 200, 5, 1), b(3, 200, 5, 3);
  for (std::size_t i = 0; i < 200; ++i)
    EXPECT_EQ((a.sample_points()[i] - b.sample_points()[i]).cwiseAbs().maxCoeff(), 0.0);
  const auto f = a.mul(a.entry(0, 1), a.entry(2, 2, true));
  EXPECT_EQ(a.estimate(f).value, b.estimate(f).value);
}

TEST(HaarBackend, SampledTraceIsTracialWithinError) {
  HaarFunctionAlgebra alg(2, 20000, 31);
  const auto a = alg.add(alg.entry(0, 0), alg.entry(1, 0, true));
  const auto b = alg.mul(alg.entry(0, 0, true), alg.entry(1, 1));
  const auto ab = alg.estimate(alg.mul(a, b));
  const auto ba = alg.estimate(alg.mul(b, a));
  EXPECT_LE(std::abs(ab.value - ba.value), 3.0 * (ab.std_error + ba.std_error) + 1e-15);
}

}  // namespace
}  // namespace nccs
