#include <random>

#include <gtest/gtest.h>

#include "corrsched/errors.hpp"
#include "corrsched/io.hpp"
#include "corrsched/linearize.hpp"
#include "corrsched/objective.hpp"
#include "oracles.hpp"

using namespace corrsched;

namespace {

JointActivationMatrix three() { return io::load_matrix(oracle::fixture("a3.json")); }

std::size_t count_kind(const PILPModel& m, char prefix) {
  std::size_t c = 0;
  for (const auto& v : m.variables) c += v.name[0] == prefix;
  return c;
}

std::size_t count_rows(const PILPModel& m, std::string_view prefix) {
  std::size_t c = 0;
  for (const auto& r : m.constraints) c += r.name.rfind(prefix, 0) == 0;
  return c;
}

}  // namespace

TEST(BuildPilp, Counts) {
  const PILPModel m = build_pilp(three(), 2);
  EXPECT_EQ(m.variables.size(), 18u);
  EXPECT_EQ(count_kind(m, 'e'), 6u);
  EXPECT_EQ(count_kind(m, 'z'), 6u);
  EXPECT_EQ(count_kind(m, 'y'), 6u);
  EXPECT_EQ(count_rows(m, "assign_"), 3u);
  EXPECT_EQ(m.constraints.size() - 3, 24u);
}

TEST(BuildPilp, VariableCountIsLN2) {
  std::mt19937_64 g(1);
  for (std::size_t n = 2; n <= 7; ++n) {
    for (std::size_t l = 1; l <= 4; ++l) {
      EXPECT_EQ(build_pilp(oracle::random_matrix(n, g), l).variables.size(), l * n * n);
    }
  }
}

TEST(BuildPilp, ReducedEncoding) {
  const PILPModel m = build_pilp(three(), 2, GateEncoding::kReduced);
  EXPECT_EQ(count_kind(m, 'y'), 0u);
  EXPECT_EQ(m.constraints.size(), 3u + 2 * 6);
  const Assignment x{{0, 1, 0}};
  const auto p = evaluate_pilp_point(m, gate_completion(m, x, 2));
  EXPECT_TRUE(p.feasible);
  EXPECT_NEAR(p.objective, pairwise_bound(three(), x, 2), 1e-15);
}

TEST(BuildPilp, TwoDevicesOneChannel) {
  const PILPModel m = build_pilp(three(), 1);
  std::map<std::string, double> point{{"e_0_0", 1}, {"e_1_0", 1}, {"e_2_0", 1}};
  for (auto [i1, i2] : {std::pair{0, 1}, {0, 2}, {1, 2}}) {
    point[z_name(i1, i2, 0)] = 1;
    point[y_name(i1, i2, 0)] = 1;
  }
  const auto r = evaluate_pilp_point(m, point);
  EXPECT_TRUE(r.feasible);
  EXPECT_NEAR(r.objective, 0.3 + 0.2 + 0.25, 1e-15);
  point["z_0_1_0"] = 0;
  EXPECT_FALSE(evaluate_pilp_point(m, point).feasible);
}

TEST(BuildPilp, ZeroMatrixObjective) {
  const PILPModel m = build_pilp(JointActivationMatrix(Eigen::MatrixXd::Zero(4, 4)), 2);
  std::mt19937_64 g(2);
  for (int t = 0; t < 10; ++t) {
    const auto x = oracle::random_assignment(4, 2, g);
    const auto r = evaluate_pilp_point(m, gate_completion(m, x, 2));
    EXPECT_TRUE(r.feasible);
    EXPECT_EQ(r.objective, 0.0);
  }
}

TEST(VerifyGate, TruthTable) {
  EXPECT_EQ(verify_gate(true, true), 1.0);
  EXPECT_EQ(verify_gate(true, false), 0.0);
  EXPECT_EQ(verify_gate(false, true), 0.0);
  EXPECT_EQ(verify_gate(false, false), 0.0);
}

TEST(EvaluatePoint, GateCompletionMatchesF) {
  std::mt19937_64 g(3);
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 2 + g() % 5, l = 1 + g() % 3;
    const auto a = oracle::random_matrix(n, g);
    const PILPModel m = build_pilp(a, l);
    const auto x = oracle::random_assignment(n, l, g);
    const auto r = evaluate_pilp_point(m, gate_completion(m, x, l));
    ASSERT_TRUE(r.feasible) << r.violation;
    EXPECT_NEAR(r.objective, pairwise_bound(a, x, l), 1e-12);
  }
}

TEST(EvaluatePoint, Infeasibilities) {
  const PILPModel m = build_pilp(three(), 2);
  const Assignment x{{0, 0, 1}};
  std::vector<double> p = gate_completion(m, x, 2);
  p[m.index_of("z_0_1_0")] = 0.0;
  auto r = evaluate_pilp_point(m, p);
  EXPECT_FALSE(r.feasible);
  EXPECT_NE(r.violation.find("cover_0_1_0"), std::string::npos);

  p = gate_completion(m, x, 2);
  p[m.index_of("e_2_0")] = 0.5;
  p[m.index_of("e_2_1")] = 0.5;
  EXPECT_FALSE(evaluate_pilp_point(m, p).feasible);

  EXPECT_THROW(evaluate_pilp_point(m, std::map<std::string, double>{{"e_0_0", 1}}),
               ValidationError);
}

TEST(ExportLp, Deterministic) {
  const PILPModel m = build_pilp(io::load_matrix(oracle::fixture("a8.json")), 3);
  EXPECT_EQ(export_lp(m), export_lp(build_pilp(io::load_matrix(oracle::fixture("a8.json")), 3)));
}

TEST(ExportLp, GoldenFile) {
  EXPECT_EQ(export_lp(build_pilp(three(), 2)), io::read_file(oracle::fixture("pilp_n3_l2.lp")));
}

TEST(ExportLp, RoundTrip) {
  for (auto enc : {GateEncoding::kFull, GateEncoding::kReduced}) {
    const PILPModel m = build_pilp(io::load_matrix(oracle::fixture("a8.json")), 3, enc);
    const PILPModel back = parse_lp(export_lp(m));
    EXPECT_TRUE(back == m);
    EXPECT_EQ(export_lp(back), export_lp(m));
  }
}

TEST(ParseLp, Malformed) {
  EXPECT_THROW(parse_lp("Minimize\n obj: 1 x\nEnd\n"), ParseError);
}
