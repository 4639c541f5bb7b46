// Operator-algebra witnesses: rotation algebra, free product, Haar route,
// and trace invariance of phi_u.

#include <gtest/gtest.h>

#include <random>

#include "nccs/nccs.hpp"

namespace nccs {
namespace {

using Dense = Eigen::MatrixXcd;

Dense diag2(cplx a, cplx b) { return Eigen::Vector2cd(a, b).asDiagonal(); }

TEST(RotationWitness, ZeroAngleIsExact) {
  const auto w = build_rotation_witness(0.0);
  const auto r = main_prop_check(w);
  EXPECT_EQ(r.intertwining, 0.0);
  EXPECT_EQ(r.holonomy_residual, 0.0);
  EXPECT_EQ(std::abs(r.ch_pairing), 0.0);
  EXPECT_EQ(std::abs(r.alpha_pairing), 0.0);
}

TEST(RotationWitness, ThirdConjugatesHolonomyExactly) {
  const double theta = 1.0 / 3.0;
  auto alg = make_rotation_algebra(theta);
  const auto u = rotation_u(*alg);
  const auto lhs = alg->mul(alg->mul(u, alg->scale(std::exp(kTwoPiI * theta), alg->generator(1))),
                            rotation_u(*alg, -1));
  EXPECT_LE(alg->norm(alg->add(lhs, alg->scale(-1.0, alg->generator(1)))), 1e-15);
  EXPECT_LE(build_rotation_witness(theta).data.holonomy_residual, 1e-15);
}

TEST(RotationWitness, MainIdentityOnAngleGrid) {
  for (double theta : {1.0 / 3.0, 2.0 / 7.0, 0.6180339887}) {
    const auto r = main_prop_check(build_rotation_witness(theta));
    // Independent value: the holonomy exp(2 pi i theta) on S^1 has alpha = theta.
    EXPECT_LE(std::abs(r.alpha_pairing - theta), 1e-12);
    EXPECT_LE(std::abs(r.ch_pairing - theta), 1e-9);
    EXPECT_LE(r.intertwining, 1e-12);
    EXPECT_LE(r.unitarity_defect, 1e-12);
    for (const auto& step : r.chain) EXPECT_LE(step.residual, 1e-9) << step.name;
  }
}

TEST(RotationWitness, AngleOutsideUnitIntervalIsRejected) {
  EXPECT_THROW(build_rotation_witness(1.0), ContractError);
  EXPECT_THROW(build_rotation_witness(-0.1), ContractError);
}

TEST(FreeProductWitness, TrivialHolonomyIsExact) {
  const auto r = main_prop_check(build_freeproduct_witness(Dense::Identity(2, 2)));
  EXPECT_EQ(r.residual, 0.0);
  EXPECT_EQ(r.intertwining, 0.0);
  EXPECT_EQ(r.holonomy_residual, 0.0);
}

TEST(FreeProductWitness, FifthRootHolonomy) {
  const Dense psi = diag2(std::exp(kTwoPiI / 5.0), std::exp(-kTwoPiI / 5.0));
  const auto w = build_freeproduct_witness(psi);
  EXPECT_LE(w.data.holonomy_residual, 1e-12);
  const auto r = main_prop_check(w);
  // Unit-interval angles 1/5 and 4/5 with the normalized trace: (1/5 + 4/5) / 2.
  EXPECT_LE(std::abs(r.alpha_pairing - 0.5), 1e-12);
  EXPECT_LE(r.residual, 1e-9);
  EXPECT_LE(r.intertwining, 1e-12);
}

TEST(Lemma33, IdentityUnitaryIsExact) {
  const auto r = lemma33_suite({Dense::Identity(2, 2)}, 6, 3, 1, 1);
  ASSERT_EQ(r.cases.size(), 1u);
  EXPECT_EQ(r.cases[0].direct_residual, 0.0);
}

TEST(Lemma33, TracelessSwap) {
  Dense swap(2, 2);
  swap << 0, 1, 1, 0;
  const auto r = lemma33_suite({swap}, 6, 5, 2, 1);
  EXPECT_FALSE(r.cases[0].embedded);
  EXPECT_LE(r.cases[0].direct_residual, 1e-12);
  EXPECT_GT(r.words, 0u);
}

TEST(Lemma33, NonzeroTraceRoutesThroughDoubledAlgebra) {
  const Dense u = cplx(0.0, 1.0) * Dense::Identity(2, 2);
  const auto r = lemma33_suite({u}, 4, 5, 3, 1);
  EXPECT_TRUE(r.cases[0].embedded);
  EXPECT_LE(std::abs(r.cases[0].trace_u - cplx(0.0, 1.0)), 1e-15);
  EXPECT_LE(r.cases[0].embedded_residual, 1e-12);
  EXPECT_LE(r.cases[0].embedding_trace_residual, 1e-12);
}

TEST(Lemma33, BlockEmbeddingPreservesTrace) {
  std::mt19937_64 rng(4);
  FreeProductAlgebra a(2, 32), aa(4, 32);
  for (int i = 0; i < 5; ++i) {
    const auto w = random_free_word(2, 5, rng);
    EXPECT_LE(std::abs(aa.trace(aa.word(block_embed(w))) - a.trace(a.word(w))), 1e-12);
  }
}

TEST(Lemma33, ResultsDoNotDependOnThreads) {
  const auto us = lemma33_unitaries(7);
  const auto a = lemma33_suite(us, 5, 3, 7, 1);
  const auto b = lemma33_suite(us, 5, 3, 7, 3);
  ASSERT_EQ(a.cases.size(), b.cases.size());
  for (std::size_t i = 0; i < a.cases.size(); ++i) {
    EXPECT_EQ(a.cases[i].direct_residual, b.cases[i].direct_residual);
    EXPECT_EQ(a.cases[i].embedded_residual, b.cases[i].embedded_residual);
  }
}

TEST(Lemma33, SampleCoversBothTraceCases) {
  const auto us = lemma33_unitaries(1);
  EXPECT_EQ(us.size(), 20u);
  int zero = 0;
  for (const auto& u : us) {
    EXPECT_TRUE(is_unitary(u));
    zero += std::abs(u.trace()) < 1e-12 ? 1 : 0;
  }
  EXPECT_GE(zero, 1);
  EXPECT_LT(zero, 20);
}

TEST(HaarWitness, IdentityIsExactWithZeroVariance) {
  const auto r = haar_witness_check(Dense::Identity(2, 2), 2000, 1);
  EXPECT_EQ(r.deviation, 0.0);
  EXPECT_EQ(r.ch_pairing.std_error, 0.0);
  EXPECT_EQ(r.alpha_total, 0.0);
}

TEST(HaarWitness, EigenvalueAngleOracle) {
  const auto r = haar_witness_check(diag2(std::exp(kTwoPiI / 3.0), std::exp(-kTwoPiI / 3.0)), 100000, 5);
  // Unit-interval angles 1/3 and 2/3.
  EXPECT_LE(std::abs(r.alpha_total - 1.0), 1e-12);
  EXPECT_LE(r.deviation, 3.0 * r.ch_pairing.std_error + 1e-12);
  // Each diagonal entry of u* X u is a genuine Monte-Carlo estimate of tr(X)/n.
  for (const auto& e : r.diagonal) {
    EXPECT_GT(e.std_error, 0.0);
    EXPECT_LE(std::abs(e.value - r.diagonal_expected), 3.0 * e.std_error + 1e-12);
  }
}

TEST(HaarWitness, RealPlaneRotation) {
  const double a = 2.0 * kPi * 0.2;
  Dense rot(2, 2);
  rot << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
  const auto r = haar_witness_check(rot, 100000, 6);
  EXPECT_LE(std::abs(r.alpha_total - 1.0), 1e-12);  // 0.2 + 0.8
  EXPECT_LE(r.deviation, 3.0 * r.ch_pairing.std_error + 1e-12);
  EXPECT_LE(r.intertwining, 1e-12);
}

TEST(HaarWitness, RejectsNonUnitaryAndScalarHolonomy) {
  EXPECT_THROW(haar_witness_check(2.0 * Dense::Identity(2, 2), 10, 1), ContractError);
  EXPECT_THROW(haar_witness_check(Dense::Identity(1, 1), 10, 1), ContractError);
}

TEST(Suites, ReportsAreThreadIndependent) {
  SuiteOptions a, b;
  a.seed = b.seed = 19;
  a.threads = 1;
  b.threads = 4;
  const auto ra = run_suite("prop19", a), rb = run_suite("prop19", b);
  EXPECT_EQ(checks_json(ra.checks).dump(), checks_json(rb.checks).dump());
  EXPECT_TRUE(ra.passed());
}

TEST(Suites, Prop19RecordsTensorPlacement) {
  const auto r = run_suite("prop19", SuiteOptions{});
  bool found = false;
  for (const auto& c : r.checks)
    if (c.name == "cs_tensor_product") {
      found = true;
      EXPECT_FALSE(c.note.empty());
    }
  EXPECT_TRUE(found);
}

TEST(Suites, UnknownSuiteIsStructuralError) {
  EXPECT_THROW(run_suite("nope", SuiteOptions{}), StructuralError);
}

TEST(Suites, ToleranceOverrideApplies) {
  SuiteOptions o;
  o.tolerance = 0.0;
  const auto r = run_suite("forms", o);
  EXPECT_FALSE(r.passed());
  for (const auto& c : r.checks) EXPECT_EQ(c.tolerance, 0.0);
}

}  // namespace
}  // namespace nccs
