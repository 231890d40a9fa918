#include <gtest/gtest.h>

#include "gmeas/errors.hpp"
#include "gmeas/random.hpp"
#include "gmeas/tester.hpp"
#include "support.hpp"

using namespace gmeas;

namespace {

constexpr double kPi = std::numbers::pi;

HermitianOperator marginal_of_phi(double theta) {
  return partial_trace(HermitianOperator::outer(example5_vector(theta)), {2, 2}, Factor::first);
}

}  // namespace

TEST(Channel, KrausAndChoiAgree) {
  Rng rng(1);
  for (int trial = 0; trial < 5; ++trial) {
    const Channel t = random_channel(2, 3, 2, rng);
    const HermitianOperator rho = random_state(2, rng);
    EXPECT_TRUE(approx_equal(apply_channel(t, rho), apply_kraus(t, rho), {.num = 1e-10}));
    EXPECT_TRUE(approx_equal(partial_trace(t.choi(), {3, 2}, Factor::first), HermitianOperator::identity(2)));
    const Channel back = Channel::from_choi(2, 3, t.choi());
    EXPECT_TRUE(approx_equal(apply_kraus(back, rho), apply_kraus(t, rho), {.num = 1e-10}));
  }
}

TEST(Channel, RejectsNonTracePreservingKraus) {
  EXPECT_THROW(Channel::from_kraus({Matrix::Identity(2, 2) * 0.5}), NotAChannel);
}

TEST(Channel, IdentityChoiIsUnnormalizedMaximallyEntangled) {
  const Channel id = Channel::from_kraus({Matrix::Identity(2, 2)});
  EXPECT_TRUE(approx_equal(id.choi(), 2.0 * fixtures::ket_bra({1.0, 0.0, 0.0, 1.0})));
}

TEST(Tester, RejectsWrongMarginal) {
  std::vector<HermitianOperator> elems{fixtures::ket_bra({1.0, 0.0, 0.0, 0.0}), HermitianOperator::identity(4) * 0.25};
  EXPECT_THROW(make_tester(2, 2, elems), NotATester);
}

TEST(Tester, RoundTripThroughGpovm) {
  Rng rng(2);
  const Tester t = random_tester(2, 3, 3, random_state(2, rng), rng);
  const GeneralizedPOVM m = tester_to_gpovm(t);
  EXPECT_TRUE(validate(m).holds());
  const Tester back = gpovm_to_tester(m);
  for (std::size_t u = 0; u < t.elements.size(); ++u) EXPECT_TRUE(approx_equal(back.elements[u], t.elements[u]));
  EXPECT_THROW(gpovm_to_tester(make_gpovm(full_state_space(6), t.elements)), NotATester);
}

TEST(Tester, ProbabilitiesAreADistribution) {
  Rng rng(3);
  const Tester t = random_tester(3, 2, 4, random_state(3, rng), rng);
  const auto p = t.probabilities(random_channel(3, 2, 3, rng));
  double total = 0.0;
  for (double x : p) {
    EXPECT_GE(x, -1e-12);
    total += x;
  }
  EXPECT_NEAR(total, 1.0, 1e-10);
}

// Tr M_u X_T = Tr Lambda_u (T (x) id)(xi) up to rounding.
TEST(Tester, ImplementationIdentity) {
  Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const Index d_in = 2 + trial % 2;
    const Index d_out = 2 + (trial / 2) % 2;
    const Index rank = 1 + trial % d_in;
    const Tester t = random_tester(d_in, d_out, 2 + trial % 3, random_state(d_in, rng, rank), rng);
    const Channel ch = random_channel(d_in, d_out, std::max<Index>(1 + trial % 3, (d_in + d_out - 1) / d_out), rng);
    const TesterDecomposition dec = tester_decompose(t);
    EXPECT_NEAR(partial_trace(dec.xi, {d_in, dec.corner_rank()}, Factor::second).trace(), 1.0, 1e-12);
    const auto direct = t.probabilities(ch);
    const auto implemented = implemented_probabilities(dec, ch);
    for (std::size_t u = 0; u < direct.size(); ++u) EXPECT_NEAR(direct[u], implemented[u], 1e-9);
  }
}

TEST(Example5, HalfIdentityTable) {
  const HermitianOperator sigma = fixtures::half_identity();
  struct Row {
    double theta;
    bool tester;
    bool measurement;
  };
  const Row rows[] = {{0.0, false, false},     {kPi / 2, false, false}, {kPi / 12, true, false},
                      {kPi / 6, true, false},  {kPi / 3, true, false},  {kPi / 4, true, true}};
  for (const Row& row : rows) {
    const Tester t = example5_tester(row.theta, sigma);
    const QubitReport r = qubit_measurement_extremal(t);
    EXPECT_EQ(r.tester.holds(), row.tester) << row.theta;
    ASSERT_TRUE(r.measurement.has_value());
    EXPECT_EQ(r.measurement->holds(), row.measurement) << row.theta;
    EXPECT_TRUE(r.all_agree()) << row.theta;
  }
}

TEST(Example5, OwnMarginalIsAlwaysExtremal) {
  for (double theta : {kPi / 12, kPi / 6, kPi / 4, kPi / 3, 5 * kPi / 12}) {
    const Tester t = example5_tester(theta, marginal_of_phi(theta));
    const QubitReport r = qubit_measurement_extremal(t);
    ASSERT_TRUE(r.measurement.has_value());
    EXPECT_TRUE(r.measurement->holds()) << theta;
    EXPECT_TRUE(r.all_agree()) << theta;
  }
}

TEST(Example5, SigmaMustHaveFullRank) {
  EXPECT_THROW(example5_tester(0.3, fixtures::ket_bra({1.0, 0.0})), SigmaSingular);
}

TEST(QubitFastPath, RankOneSigmaNeedsProjectiveElements) {
  Rng rng(9);
  const HermitianOperator pure = random_state(2, rng, 1);
  const Tester pvm = random_tester(2, 2, 2, pure, rng, PovmKind::pvm);
  EXPECT_TRUE(qubit_tester_extremal(pvm).tester.holds());
  const Tester mixed = random_tester(2, 2, 2, pure, rng, PovmKind::low_rank);
  const QubitReport r = qubit_tester_extremal(mixed);
  EXPECT_FALSE(r.tester.holds());
  EXPECT_TRUE(r.all_agree());
  EXPECT_EQ(r.tester_reason, "rank1-PVM");
}

TEST(QubitFastPath, RejectsWrongShapes) {
  Rng rng(10);
  EXPECT_THROW(qubit_tester_extremal(random_tester(3, 2, 2, random_state(3, rng), rng)), WrongShape);
  EXPECT_THROW(qubit_tester_extremal(random_tester(2, 2, 3, random_state(2, rng), rng)), WrongShape);
  EXPECT_THROW(qubit_measurement_extremal(random_tester(2, 3, 2, random_state(2, rng), rng)), WrongShape);
}

TEST(BlockForm, DetectsDiagonalBlocks) {
  const ComplexVector psi = (ComplexVector(2) << 1.0, Complex(0.0, 1.0)).finished().normalized();
  const ComplexVector perp = (ComplexVector(2) << 1.0, Complex(0.0, -1.0)).finished().normalized();
  const HermitianOperator e = fixtures::ket_bra({1.0, 0.0});
  const HermitianOperator f = fixtures::ket_bra({1.0, 1.0});
  const HermitianOperator lambda =
      tensor(e, HermitianOperator::outer(psi)) + tensor(f, HermitianOperator::outer(perp));
  const auto form = detect_block_form(lambda, 2);
  ASSERT_TRUE(form.has_value());
  EXPECT_NEAR(std::abs(form->psi.dot(psi)) + std::abs(form->psi.dot(perp)), 1.0, 1e-8);
  EXPECT_FALSE(detect_block_form(fixtures::ket_bra({1.0, 0.0, 0.0, 1.0}), 2).has_value());
}

TEST(PartialCommutant, ProductOperator) {
  const HermitianOperator x = tensor(fixtures::ket_bra({1.0, 0.0}), HermitianOperator::identity(2));
  EXPECT_EQ(partial_commutant(x, {2, 2}).dim(), 4);
  EXPECT_EQ(partial_commutant(fixtures::ket_bra({1.0, 0.0, 0.0, 1.0}), {2, 2}).dim(), 1);
}

TEST(ClassAnalysis, RankRulesAgreeWithGenericVerdicts) {
  Rng rng(12);
  const Section s = fixed_marginal_section(random_state(2, rng), 2);
  for (Index r = 1; r <= 4; ++r) {
    for (int trial = 0; trial < 3; ++trial) {
      const ClassReport rep = class_analysis(s, random_psd(4, r, rng));
      EXPECT_TRUE(rep.consistent) << "rank " << r;
      if (r < 2) EXPECT_TRUE(rep.singleton.holds());
      if (r < 4) EXPECT_TRUE(rep.extreme_point.holds());
      if (r == 4) EXPECT_FALSE(rep.singleton.holds());
    }
  }
}

TEST(ClassAnalysis, NeedsFullRankSigma) {
  const Section s = fixed_marginal_section(fixtures::ket_bra({1.0, 0.0}), 2, false);
  EXPECT_THROW(class_analysis(s, HermitianOperator::identity(4)), SigmaSingular);
  EXPECT_THROW(class_analysis(channel_section(2, 2), HermitianOperator::identity(4)), WrongShape);
}

namespace {

// Tester (I (x) sigma^1/2) Lambda_u (I (x) sigma^1/2) for full-rank sigma.
Tester tester_from_lambda(Index d_out, const std::vector<HermitianOperator>& lambda, const HermitianOperator& sigma) {
  const Matrix root = kron(Matrix::Identity(d_out, d_out), sqrt_psd(sigma).matrix());
  std::vector<HermitianOperator> elements;
  for (const auto& l : lambda) elements.push_back(congruence(root, l));
  return make_tester(sigma.dim(), d_out, elements);
}

// sum_i sqrt(lambda_i) u_i (x) e_i with orthonormal u_i; its K-marginal is sigma.
ComplexVector purification(const HermitianOperator& sigma, Index d_out, Rng& rng) {
  const Spectrum sp = sigma.spectrum();
  const Matrix u = random_unitary(d_out, rng);
  ComplexVector phi = ComplexVector::Zero(d_out * sigma.dim());
  for (Index i = 0; i < sigma.dim(); ++i) {
    phi += std::sqrt(std::max(0.0, sp.values[i])) * kron(u.col(i), sp.vectors.col(i));
  }
  return phi;
}

}  // namespace

// A projection with rank-one complement |phi><phi| lies in P_K iff Tr_K |phi><phi| = sigma.
TEST(PKc, RankOneComplementNeedsTheMarginal) {
  Rng rng(31);
  for (int trial = 0; trial < 12; ++trial) {
    const HermitianOperator sigma = trial < 6 ? fixtures::half_identity() : random_state(2, rng);
    const Section s = fixed_marginal_section(sigma, 2);
    const ComplexVector phi = trial % 2 ? purification(sigma, 2, rng) : random_unitary(4, rng).col(0);
    const HermitianOperator proj = HermitianOperator::outer(phi.normalized());
    const bool marginal_matches = approx_equal(partial_trace(proj, {2, 2}, Factor::first), sigma, {.num = 1e-9});
    EXPECT_EQ(trial % 2 == 1, marginal_matches) << trial;
    const Projection p = Projection::from_operator(proj).complement();
    EXPECT_EQ(is_in_pk(s, p).holds(), marginal_matches) << trial;
  }
}

// Qubit input, two outcomes, output dimension 2 or 3.
class QubitInputTester : public ::testing::TestWithParam<int> {};

TEST_P(QubitInputTester, PureSigmaNeedsAPvm) {
  const Index d_out = GetParam();
  Rng rng(static_cast<std::uint64_t>(40 + d_out));
  const HermitianOperator pure = random_state(2, rng, 1);
  for (const PovmKind kind : {PovmKind::pvm, PovmKind::low_rank}) {
    const Tester t = random_tester(2, d_out, 2, pure, rng, kind);
    const bool expected = kind == PovmKind::pvm;
    EXPECT_EQ(is_extremal_gpovm(tester_to_gpovm(t)).holds(), expected);
    const QubitReport r = qubit_tester_extremal(t);
    EXPECT_EQ(r.tester.holds(), expected);
    EXPECT_TRUE(r.all_agree());
  }
}

TEST_P(QubitInputTester, FullRankSigmaNeedsAPvmOffTheBlockForm) {
  const Index d_out = GetParam();
  Rng rng(static_cast<std::uint64_t>(50 + d_out));
  const HermitianOperator sigma = random_state(2, rng);
  const Index d = 2 * d_out;

  const auto generic_pvm = random_pvm(d, 2, rng);
  EXPECT_TRUE(is_extremal_gpovm(tester_to_gpovm(tester_from_lambda(d_out, generic_pvm, sigma))).holds());

  const Matrix basis = random_unitary(2, rng);
  const HermitianOperator e = support(random_psd(d_out, 1, rng)).op();
  const HermitianOperator f = support(random_psd(d_out, d_out - 1, rng)).op();
  const HermitianOperator lambda0 =
      tensor(e, HermitianOperator::outer(basis.col(0))) + tensor(f, HermitianOperator::outer(basis.col(1)));
  const std::vector<HermitianOperator> blocky{lambda0, HermitianOperator::identity(d) - lambda0};
  const Tester block_tester = tester_from_lambda(d_out, blocky, sigma);
  EXPECT_TRUE(detect_block_form(lambda0, d_out).has_value());
  EXPECT_FALSE(is_extremal_gpovm(tester_to_gpovm(block_tester)).holds());

  const auto smeared = random_povm(d, 2, rng, {d - 1, 2});
  EXPECT_FALSE(is_extremal_gpovm(tester_to_gpovm(tester_from_lambda(d_out, smeared, sigma))).holds());

  for (const Tester& t : {tester_from_lambda(d_out, generic_pvm, sigma), block_tester}) {
    const QubitReport r = qubit_tester_extremal(t);
    EXPECT_TRUE(r.all_agree());
  }
}

INSTANTIATE_TEST_SUITE_P(OutputDims, QubitInputTester, ::testing::Values(2, 3));
