#include <gtest/gtest.h>

#include "gmeas/analysis.hpp"
#include "gmeas/errors.hpp"
#include "gmeas/io.hpp"
#include "gmeas/random.hpp"
#include "support.hpp"

using namespace gmeas;
using io::Json;

TEST(Json, ComplexScalarsAndMatrices) {
  const Json j = io::parse(R"([[1, [0, -2]], [[0, 2], 3.5]])");
  const HermitianOperator x = io::operator_from_json(j);
  EXPECT_EQ(x(0, 1), Complex(0.0, -2.0));
  EXPECT_EQ(x(1, 1), Complex(3.5, 0.0));
  EXPECT_TRUE(approx_equal(io::operator_from_json(io::to_json(x)), x));
}

TEST(Json, MalformedInputsAreParseErrors) {
  EXPECT_THROW(io::parse("{"), io::ParseError);
  EXPECT_THROW(io::matrix_from_json(io::parse("[[1, 2], [3]]")), io::ParseError);
  EXPECT_THROW(io::operator_from_json(io::parse("[[1, 2, 3]]")), io::ParseError);
  EXPECT_THROW(io::matrix_from_json(io::parse(R"([["a"]])")), io::ParseError);
  EXPECT_THROW(io::kind_of(io::parse(R"({"kind": "banana"})")), io::ParseError);
  EXPECT_THROW(io::tester_from_json(io::parse(R"({"d_in": 2, "elements": []})")), io::ParseError);
}

TEST(Json, NonHermitianMatrixIsAMathError) {
  EXPECT_THROW(io::operator_from_json(io::parse("[[1, 2], [0, 1]]")), NotHermitian);
}

TEST(Json, TesterRoundTrip) {
  Rng rng(1);
  const Tester t = random_tester(2, 3, 3, random_state(2, rng), rng);
  const Tester back = io::tester_from_json(io::parse(io::to_json(t).dump()));
  ASSERT_EQ(back.elements.size(), t.elements.size());
  EXPECT_EQ(back.outcomes, t.outcomes);
  for (std::size_t u = 0; u < t.elements.size(); ++u) EXPECT_TRUE(approx_equal(back.elements[u], t.elements[u]));
}

TEST(Json, TesterWithoutKindOrLabels) {
  const Json j = io::parse(R"({"d_in": 1, "d_out": 2, "elements": [[[1, 0], [0, 0]], [[0, 0], [0, 1]]]})");
  EXPECT_EQ(io::kind_of(j), "tester");
  const Tester t = io::tester_from_json(j);
  EXPECT_EQ(t.outcomes, (std::vector<std::string>{"0", "1"}));
}

TEST(Json, SectionDescriptorsRoundTrip) {
  Rng rng(2);
  const std::vector<HermitianOperator> diag{fixtures::ket_bra({1.0, 0.0}), fixtures::ket_bra({0.0, 1.0})};
  const std::vector<Section> sections{full_state_space(3), channel_section(2, 3),
                                      fixed_marginal_section(random_state(2, rng), 2), custom_section(2, diag)};
  for (const Section& s : sections) {
    const Section back = io::section_from_json(io::parse(io::to_json(s.descriptor()).dump()));
    EXPECT_TRUE(back.same_as(s)) << to_string(s.descriptor().kind);
  }
  EXPECT_THROW(io::section_from_json(io::parse(R"({"type": "moon"})")), io::ParseError);
}

TEST(Json, GpovmRoundTripKeepsSection) {
  const Section s = channel_section(2, 2);
  const GeneralizedPOVM m = make_gpovm(s, {fixtures::ket_bra({1.0, 0.0, 0.0, 1.0}) * 2.0,
                                           HermitianOperator::identity(4) - fixtures::ket_bra({1.0, 0.0, 0.0, 1.0}) * 2.0});
  const GeneralizedPOVM back = io::gpovm_from_json(io::parse(io::to_json(m).dump()));
  EXPECT_TRUE(back.section.same_as(s));
  EXPECT_TRUE(equivalent(back, m));
}

TEST(Json, ChannelKrausAndChoiForms) {
  Rng rng(3);
  const Channel t = random_channel(2, 3, 2, rng);
  const Channel a = io::channel_from_json(io::to_json(t));
  Json choi{{"kind", "channel"}, {"d_in", 2}, {"d_out", 3}, {"choi", io::to_json(t.choi())}};
  const Channel b = io::channel_from_json(choi);
  EXPECT_TRUE(approx_equal(a.choi(), t.choi()));
  EXPECT_TRUE(approx_equal(b.choi(), t.choi(), {.num = 1e-8}));
}

TEST(Json, ProjectionForms) {
  const Json vectors = io::parse(R"({"kind": "projection", "vectors": [[1, 0, 0, 1]], "complement": true})");
  const Projection p = io::projection_from_json(vectors);
  EXPECT_EQ(p.rank(), 3);
  const Projection q = io::projection_from_json(io::to_json(p));
  EXPECT_TRUE(p == q);
}

TEST(Json, DigestIsStableAndKeyOrderFree) {
  const Json a = io::parse(R"({"d_in": 1, "d_out": 1, "elements": [[[1]]]})");
  const Json b = io::parse(R"({"elements": [[[1]]], "d_out": 1, "d_in": 1})");
  EXPECT_EQ(io::digest(a), io::digest(b));
  EXPECT_EQ(io::digest(a).size(), 64u);
}

TEST(Json, StateValidation) {
  EXPECT_NO_THROW(io::state_from_json(io::state_to_json(fixtures::half_identity())));
  EXPECT_THROW(io::state_from_json(io::parse(R"({"matrix": [[1, 0], [0, 1]]})")), NotAState);
}

TEST(Analysis, ReportForExample5) {
  const Tester t = example5_tester(std::numbers::pi / 4, fixtures::half_identity());
  AnalysisOptions opts;
  opts.cross_check = true;
  const AnalysisReport r = analyze_json(io::to_json(t), std::nullopt, opts);
  ASSERT_TRUE(r.tester_extremal.has_value());
  EXPECT_TRUE(r.tester_extremal->holds());
  EXPECT_TRUE(r.measurement_extremal.holds());
  EXPECT_EQ(r.dim_j, 13);
  ASSERT_TRUE(r.qubit.has_value());
  for (const auto& [name, ok] : r.cross_checks) EXPECT_TRUE(ok) << name;
  const Json j = io::to_json(r);
  EXPECT_EQ(j["tester_extremal"], true);
  EXPECT_EQ(j["measurement_extremal"], true);
  EXPECT_EQ(j["outcomes"].size(), 2u);
  EXPECT_TRUE(j.contains("tolerances"));
  EXPECT_TRUE(j["runtime_ms"].contains("total"));
}

// Verdicts in a report are reproduced by rerunning the named operation on the
// serialized input.
TEST(Analysis, ReportIsReproducible) {
  Rng rng(4);
  const Tester t = random_tester(2, 2, 3, random_state(2, rng), rng, PovmKind::low_rank);
  const Json report = io::to_json(analyze_json(io::to_json(t)));
  const Tester again = io::tester_from_json(report["input"]);
  const GeneralizedPOVM m = tester_to_gpovm(again);
  EXPECT_EQ(report["verdicts"]["gpovm_extremal"]["decision"], to_string(is_extremal_gpovm(m).decision));
  EXPECT_EQ(report["verdicts"]["measurement_extremal"]["decision"], to_string(is_extremal_measurement(m).decision));
  for (std::size_t u = 0; u < m.size(); ++u) {
    EXPECT_EQ(report["outcomes"][u]["k_support"]["rank"], k_support(m.section, m.elements[u]).support.rank());
  }
}

TEST(Analysis, InvalidGpovmIsRejected) {
  const Json j = io::parse(
      R"({"kind": "gpovm", "section": {"type": "full", "dim": 2}, "elements": [[[1, 0], [0, 0]], [[1, 0], [0, 0]]]})");
  EXPECT_THROW(analyze_json(j), NotAGeneralizedPOVM);
}
