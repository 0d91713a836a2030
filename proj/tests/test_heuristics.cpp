#include <algorithm>
#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "corrsched/errors.hpp"
#include "corrsched/heuristics.hpp"
#include "corrsched/io.hpp"
#include "corrsched/objective.hpp"
#include "corrsched/rng.hpp"
#include "json.hpp"
#include "oracles.hpp"

using namespace corrsched;

namespace {

JointActivationMatrix load(const char* name) { return io::load_matrix(oracle::fixture(name)); }

void expect_valid(const ClusteringResult& r, std::size_t n, std::size_t l) {
  ASSERT_EQ(r.assignment.size(), n);
  check_assignment(r.assignment, l);
  ASSERT_EQ(r.state.medoids.size(), l);
  std::set<std::size_t> distinct(r.state.medoids.begin(), r.state.medoids.end());
  EXPECT_EQ(distinct.size(), l);
  for (std::size_t j = 0; j < l; ++j) EXPECT_EQ(r.assignment.channel_of[r.state.medoids[j]], j);
}

}  // namespace

TEST(Parse, Names) {
  EXPECT_EQ(parse_dissimilarity("A"), Dissimilarity::kJointActivation);
  EXPECT_EQ(parse_dissimilarity("one-minus-A"), Dissimilarity::kOneMinusJointActivation);
  EXPECT_THROW(parse_dissimilarity("euclid"), ValidationError);
  EXPECT_EQ(parse_clustering_method("kmedoids-pp"), ClusteringMethod::kKMedoidsPlusPlus);
  EXPECT_EQ(to_string(ClusteringMethod::kKMedoids), "kmedoids");
}

TEST(KMeansPP, SingleChannelOneDraw) {
  const auto m = kmeanspp_init(load("a4.json"), 1, 3);
  ASSERT_EQ(m.size(), 1u);
  EXPECT_LT(m[0], 4u);
}

TEST(KMeansPP, ConcentratedMass) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(4, 4);
  m(0, 1) = m(1, 0) = 1.0;
  const JointActivationMatrix a(m);
  int conditioned = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto med = kmeanspp_init(a, 2, seed);
    if (med[0] == 0) {
      ++conditioned;
      EXPECT_EQ(med[1], 1u);
    }
  }
  EXPECT_GT(conditioned, 0);
}

TEST(KMeansPP, DSquaredLaw) {
  const auto a = load("a4.json");
  const int draws = 100000;
  std::vector<std::vector<int>> counts(4, std::vector<int>(4, 0));
  for (int s = 0; s < draws; ++s) {
    const auto m = kmeanspp_init(a, 2, derive_seed(99, static_cast<std::uint64_t>(s)));
    ++counts[m[0]][m[1]];
  }
  for (std::size_t f = 0; f < 4; ++f) {
    double z = 0.0;
    for (std::size_t k = 0; k < 4; ++k) {
      if (k != f) z += a(f, k) * a(f, k);
    }
    for (std::size_t s = 0; s < 4; ++s) {
      if (s == f) {
        EXPECT_EQ(counts[f][s], 0);
        continue;
      }
      const double p = 0.25 * a(f, s) * a(f, s) / z;
      const double se = std::sqrt(p * (1 - p) / draws);
      EXPECT_NEAR(counts[f][s] / double(draws), p, 3 * se) << f << "->" << s;
    }
  }
}

TEST(UniformInit, Distinct) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto m = uniform_init(10, 4, seed);
    EXPECT_EQ(std::set<std::size_t>(m.begin(), m.end()).size(), 4u);
  }
}

TEST(KMedoids, AsManyChannelsAsDevices) {
  const auto r = kmedoids(load("a8.json"), 8, 1);
  expect_valid(r, 8, 8);
  EXPECT_EQ(r.state.cost, 0.0);
}

TEST(KMedoids, ZeroMatrix) {
  const auto r = kmedoids_pp(JointActivationMatrix(Eigen::MatrixXd::Zero(6, 6)), 2, 1);
  EXPECT_EQ(r.state.cost, 0.0);
  expect_valid(r, 6, 2);
}

TEST(KMedoids, EqualDissimilarities) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Constant(7, 7, 0.3);
  m.diagonal().setZero();
  const auto r = kmedoids(JointActivationMatrix(m), 3, 5);
  EXPECT_LE(r.state.sweeps, 2u);
  expect_valid(r, 7, 3);
}

TEST(KMedoids, CostHistoryNonIncreasing) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto r = kmedoids(load("a14.json"), 4, seed);
    expect_valid(r, 14, 4);
    for (std::size_t k = 1; k < r.state.cost_history.size(); ++k) {
      EXPECT_LE(r.state.cost_history[k], r.state.cost_history[k - 1]);
    }
    EXPECT_EQ(r.state.cost, r.state.cost_history.back());
  }
}

TEST(KMedoids, ReferenceTrace) {
  const auto golden = nlohmann::json::parse(io::read_file(oracle::fixture("kmedoids_n8_l2_seed7.json")));
  const auto r = kmedoids(load("a8.json"), 2, 7);
  EXPECT_EQ(r.state.medoids, golden["medoids"].get<std::vector<std::size_t>>());
  EXPECT_EQ(r.assignment.channel_of, golden["assignment"].get<std::vector<std::size_t>>());
  EXPECT_EQ(r.state.cost, golden["cost"].get<double>());
  EXPECT_EQ(r.state.cost_history, golden["cost_history"].get<std::vector<double>>());
}

TEST(KMedoids, ReferenceAssignmentIsNearestMedoid) {
  const auto a = load("a8.json");
  const auto r = kmedoids(a, 2, 7);
  double cost = 0.0;
  for (std::size_t i = 0; i < 8; ++i) {
    const std::size_t own = r.state.medoids[r.assignment.channel_of[i]];
    if (i == own) continue;
    for (std::size_t m : r.state.medoids) {
      if (m != own) EXPECT_LE(a(i, own), a(i, m));
    }
    cost += a(i, own);
  }
  EXPECT_NEAR(cost, r.state.cost, 1e-15);
}

TEST(KMedoids, OneMinusA) {
  const auto r = kmedoids(load("a8.json"), 3, 2, kDefaultMaxIter, Dissimilarity::kOneMinusJointActivation);
  expect_valid(r, 8, 3);
}

TEST(KMedoids, TooManyChannels) {
  EXPECT_THROW(kmedoids(load("a4.json"), 5, 1), ValidationError);
}

TEST(BestOfRestarts, PlusPlusSeedingNoWorse) {
  const auto a = load("a12.json");
  double pp = INFINITY, uni = INFINITY;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    pp = std::min(pp, kmedoids_pp(a, 3, seed).state.cost);
    uni = std::min(uni, kmedoids(a, 3, seed).state.cost);
  }
  EXPECT_LE(pp, uni);
}

TEST(BestOfRestarts, KeepsSmallestF) {
  const auto a = load("a12.json");
  const auto best = best_of_restarts(a, 3, ClusteringMethod::kKMedoidsPlusPlus, 5, 10);
  const double f = pairwise_bound(a, best.assignment, 3);
  const auto single = best_of_restarts(a, 3, ClusteringMethod::kKMedoidsPlusPlus, 5, 1);
  EXPECT_LE(f, pairwise_bound(a, single.assignment, 3));
  expect_valid(best, 12, 3);
}

TEST(BestOfRestarts, Deterministic) {
  const auto a = load("a10.json");
  const auto x = best_of_restarts(a, 3, ClusteringMethod::kKMedoids, 8, 6);
  const auto y = best_of_restarts(a, 3, ClusteringMethod::kKMedoids, 8, 6);
  EXPECT_EQ(x.assignment, y.assignment);
}
