#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "bregpower/errors.hpp"
#include "bregpower/metrics.hpp"
#include "oracles.hpp"

using namespace bregpower;

TEST(AdjustedRandIndex, Examples) {
  EXPECT_DOUBLE_EQ(adjusted_rand_index(Labels{0, 0, 1, 1}, Labels{1, 1, 0, 0}), 1.0);
  EXPECT_DOUBLE_EQ(adjusted_rand_index(Labels{0, 0, 1, 1}, Labels{0, 1, 0, 1}), -0.5);
  EXPECT_DOUBLE_EQ(adjusted_rand_index(Labels{0, 0, 0}, Labels{5, 5, 5}), 1.0);
  EXPECT_DOUBLE_EQ(adjusted_rand_index(Labels{0, 1, 2}, Labels{0, 1, 2}), 1.0);
  EXPECT_DOUBLE_EQ(adjusted_rand_index(Labels{0, 0, 0}, Labels{0, 1, 2}), 0.0);
  EXPECT_THROW(adjusted_rand_index(Labels{0, 1}, Labels{0}), LengthMismatch);
}

TEST(AdjustedRandIndex, AgreesWithPairCounting) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + rng() % 60;
    const std::size_t ka = 1 + rng() % 5, kb = 1 + rng() % 5;
    Labels a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = rng() % ka;
      b[i] = rng() % kb;
    }
    const double expect = oracle::pair_count_ari(a, b);
    if (!std::isfinite(expect)) continue;
    ASSERT_NEAR(adjusted_rand_index(a, b), expect, 1e-12);
  }
}

TEST(AdjustedRandIndex, InvariantToRelabeling) {
  std::mt19937_64 rng(2);
  Labels a(40), b(40);
  for (std::size_t i = 0; i < 40; ++i) {
    a[i] = rng() % 3;
    b[i] = rng() % 4;
  }
  Labels b2 = b;
  for (auto& l : b2) l = 9 - l;
  EXPECT_DOUBLE_EQ(adjusted_rand_index(a, b), adjusted_rand_index(a, b2));
  EXPECT_DOUBLE_EQ(adjusted_rand_index(a, b), adjusted_rand_index(b, a));
}

TEST(Matching, HungarianAgreesWithEnumeration) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 10);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t k = 1 + rng() % 7;
    Matrix cost(k, k);
    for (double& v : cost.values()) v = u(rng);
    const double best = oracle::enumerate_min([&](std::size_t i, std::size_t j) { return cost(i, j); }, k);
    const Matching h = match_hungarian(cost);
    const Matching e = match_exhaustive(cost);
    ASSERT_NEAR(h.cost, best, 1e-10);
    ASSERT_NEAR(e.cost, best, 1e-10);
    double check = 0.0;
    for (std::size_t i = 0; i < k; ++i) check += cost(i, h.assignment[i]);
    ASSERT_NEAR(check, h.cost, 1e-10);
  }
}

TEST(Matching, LargeKUsesHungarian) {
  std::mt19937_64 rng(4);
  Matrix cost(20, 20);
  for (std::size_t i = 0; i < 20; ++i) {
    for (std::size_t j = 0; j < 20; ++j) cost(i, j) = (i == (j + 3) % 20) ? 0.0 : 1.0 + rng() % 5;
  }
  const Matching m = match_min_cost(cost);
  EXPECT_DOUBLE_EQ(m.cost, 0.0);
  EXPECT_EQ(m.assignment[5], 2u);
}

TEST(CentroidDist, Examples) {
  EXPECT_DOUBLE_EQ(centroid_dist(Matrix{{0, 0}, {1, 1}}, Matrix{{1, 1}, {0, 0}}), 0.0);
  EXPECT_DOUBLE_EQ(centroid_dist(Matrix{{0, 0}, {10, 0}}, Matrix{{10, 1}, {0, 1}}),
                   std::sqrt(2.0));
  EXPECT_THROW(centroid_dist(Matrix{{0}}, Matrix{{0}, {1}}), ShapeMismatch);
}

TEST(CentroidDivergence, UsesTrueCenterAsFirstArgument) {
  const auto re = Generator::relative_entropy();
  const Matrix truth{{2}, {20}};
  const Matrix fit{{21}, {2.5}};
  const double expect = divergence(re, std::vector<double>{2}, std::vector<double>{2.5}) +
                        divergence(re, std::vector<double>{20}, std::vector<double>{21});
  EXPECT_NEAR(centroid_divergence(re, truth, fit), expect, 1e-14);
}

TEST(BregmanInformation, Examples) {
  EXPECT_DOUBLE_EQ(bregman_information(Generator::squared_euclidean(), Matrix{{0}, {2}}), 1.0);
  EXPECT_NEAR(bregman_information(Generator::relative_entropy(), Matrix{{1}, {3}}),
              0.261624071882274, 1e-14);
  EXPECT_DOUBLE_EQ(bregman_information(Generator::gamma_shape(2), Matrix{{4, 1}, {4, 1}}), 0.0);
}
