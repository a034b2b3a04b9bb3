#include <cmath>
#include <string>

#include <gtest/gtest.h>

#include "hilbertctl/errors.hpp"
#include "hilbertctl/examples.hpp"
#include "hilbertctl/serialize.hpp"

using namespace hilbertctl;

namespace {

std::string data(const std::string& name) {
  return std::string(HILBERTCTL_DATA_DIR) + "/" + name;
}

}  // namespace

TEST(Serialize, SpaceRoundTrip) {
  for (const Space& s : {Space::ell2(3), Space::euclidean(2),
                         Space::l2_line(2.0, 0.5), Space::l2_interval(1.0, 8)}) {
    const Space back = space_from_json(space_to_json(s));
    EXPECT_EQ(back.dim(), s.dim());
    EXPECT_EQ(back.weights(), s.weights());
  }
}

TEST(Serialize, OperatorRoundTrip) {
  const Space h = Space::ell2(4);
  const Space z = Space::ell2(5);
  const SpaceMap names{{"H", h}, {"Z", z}};
  const OperatorExpr op = 0.5 * OperatorExpr::right_shift(h, z) *
                          OperatorExpr::diagonal(h, Eigen::Vector4d(1, 2, 3, 4));
  const OperatorExpr back = operator_from_json(operator_to_json(op, names), names);
  EXPECT_TRUE(back.matrix().isApprox(op.matrix(), 1e-15));
}

TEST(Serialize, SystemFileRoundTrip) {
  const SystemDoc doc = parse_system_file(data("ex4_system.json"));
  ASSERT_EQ(doc.type, SystemType::kTwoInput);
  const SystemDoc back = parse_system(system_to_json(doc));
  ASSERT_TRUE(back.two_input.has_value());
  const TwoInputSystem& a = *doc.two_input;
  const TwoInputSystem& b = *back.two_input;
  ASSERT_EQ(a.horizon, b.horizon);
  for (int k = 0; k <= a.horizon; ++k) {
    EXPECT_EQ(a.A[k].matrix(), b.A[k].matrix());
    EXPECT_EQ(a.B2[k].matrix(), b.B2[k].matrix());
    EXPECT_EQ(a.Cbar[k].matrix(), b.Cbar[k].matrix());
  }
  ASSERT_TRUE(back.x0.has_value());
  EXPECT_EQ(*doc.x0, *back.x0);
}

TEST(Serialize, ControlledSystemWithCostRoundTrip) {
  const SystemDoc doc = parse_system_file(data("scalar_lq.json"));
  ASSERT_EQ(doc.type, SystemType::kControlled);
  ASSERT_TRUE(doc.cost.has_value());
  const SystemDoc back = parse_system(system_to_json(doc));
  ASSERT_TRUE(back.cost.has_value());
  EXPECT_EQ(back.cost->S.matrix(), doc.cost->S.matrix());
  EXPECT_EQ(back.controlled->B[0].matrix(), doc.controlled->B[0].matrix());
}

TEST(Serialize, AssumptionViolationIsReported) {
  EXPECT_THROW(parse_system_file(data("assumption1_violation.json")),
               AssumptionError);
}

TEST(Serialize, MissingFileIsParseError) {
  EXPECT_THROW(parse_system_file(data("no_such_file.json")), ParseError);
}

TEST(Serialize, MalformedDocumentsAreParseErrors) {
  EXPECT_THROW(parse_system(json::parse(R"({"type": "nonsense"})")), ParseError);
  EXPECT_THROW(parse_system(json::parse(R"([1, 2, 3])")), ParseError);
  EXPECT_THROW(space_from_json(json::parse(R"({"kind": "ell2", "dim": -1})")),
               Error);
  EXPECT_THROW(matrix_from_json(json::parse(R"([[1, 2], [3]])")), ParseError);
}

TEST(Serialize, X0Forms) {
  const Space h = Space::ell2(4);
  EXPECT_EQ(parse_x0(json::parse("[1, 2, 3, 4]"), h), Eigen::Vector4d(1, 2, 3, 4));
  std::vector<std::string> warnings;
  const Eigen::VectorXd g = parse_x0(
      json::parse(R"({"geometric": {"first": 1, "ratio": 0.5}})"), h, &warnings);
  EXPECT_EQ(g, Eigen::Vector4d(1, 0.5, 0.25, 0.125));
  EXPECT_FALSE(warnings.empty());
  EXPECT_THROW(parse_x0(json::parse("[1, 2]"), h), Error);
}

TEST(Serialize, NonFiniteNumbersBecomeNull) {
  Eigen::VectorXd v(2);
  v << 1.0, std::nan("");
  const json j = vector_to_json(v);
  EXPECT_TRUE(j[1].is_null());
}

TEST(Serialize, ShippedEx3FileReproducesNorm) {
  const SystemDoc doc = parse_system_file(data("ex3_system.json"));
  ASSERT_TRUE(doc.disturbed.has_value());
  NormOptions o;
  o.tol_gamma = 1e-8;
  EXPECT_NEAR(hinf_norm(*doc.disturbed, o).norm, example3_norm(), 1e-7);
}

TEST(Serialize, StatesCsvLayout) {
  const std::string csv = states_csv({Eigen::Vector2d(1, 2), Eigen::Vector2d(3, 4)});
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "k,coordinate,value");
  EXPECT_NE(csv.find("1,1,4"), std::string::npos);
}
