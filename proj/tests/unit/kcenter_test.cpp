#include <gtest/gtest.h>

#include <random>

#include "relcore/errors.hpp"
#include "relcore/kcenter.hpp"

using namespace relcore;

namespace {

PointSet line(std::initializer_list<double> xs) {
  PointSet p(1);
  for (double x : xs) p.push_back(std::vector<double>{x});
  return p;
}

PointSet random_points(std::mt19937_64& rng, std::size_t n, std::size_t d) {
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  std::bernoulli_distribution snap(0.2);
  PointSet p(d);
  std::vector<double> buf(d);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& v : buf) v = snap(rng) ? std::round(u(rng)) : u(rng);
    p.push_back(buf);
  }
  return p;
}

// Optimal k-center radius with centers restricted to input points, by exhaustive search.
double optimal_radius(const PointSet& pts, std::size_t k) {
  const std::size_t n = pts.size();
  k = std::min(k, n);
  std::vector<std::size_t> pick(k);
  for (std::size_t i = 0; i < k; ++i) pick[i] = i;
  double best = INFINITY;
  while (true) {
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double nearest = INFINITY;
      for (auto c : pick) nearest = std::min(nearest, std::sqrt(squared_distance(pts[i], pts[c])));
      worst = std::max(worst, nearest);
    }
    best = std::min(best, worst);
    std::size_t i = k;
    while (i > 0 && pick[i - 1] == n - k + i - 1) --i;
    if (i == 0) break;
    ++pick[i - 1];
    for (std::size_t j = i; j < k; ++j) pick[j] = pick[j - 1] + 1;
  }
  return best;
}

double brute_hausdorff(const PointSet& a, const PointSet& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double best = INFINITY;
    for (std::size_t j = 0; j < b.size(); ++j) best = std::min(best, std::sqrt(squared_distance(a[i], b[j])));
    worst = std::max(worst, best);
  }
  return worst;
}

}  // namespace

TEST(Gonzalez, LineExampleFromFirstPoint) {
  const auto pts = line({0, 4, 10});
  const auto cs = gonzalez_from(pts, 2, 0);
  ASSERT_EQ(cs.centers.size(), 2u);
  EXPECT_EQ(cs.centers[0][0], 0.0);
  EXPECT_EQ(cs.centers[1][0], 10.0);
  EXPECT_DOUBLE_EQ(cs.cover_radius, 4.0);
  EXPECT_DOUBLE_EQ(optimal_radius(pts, 2), 4.0);
}

TEST(Gonzalez, AllPointsGiveZeroRadius) {
  const auto pts = line({3, 1, 4, 1, 5});
  const auto cs = gonzalez(pts, 5, 9);
  EXPECT_EQ(cs.centers.size(), 4u);  // duplicates collapse
  EXPECT_EQ(cs.cover_radius, 0.0);
}

TEST(Gonzalez, SingleCenterIsSeedPointWithItsEccentricity) {
  const auto pts = line({0, 2, 7});
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto cs = gonzalez(pts, 1, seed);
    ASSERT_EQ(cs.centers.size(), 1u);
    const double c = cs.centers[0][0];
    EXPECT_DOUBLE_EQ(cs.cover_radius, std::max(std::abs(c - 0.0), std::abs(c - 7.0)));
  }
}

TEST(Gonzalez, NegativeZeroEqualsZero) {
  const auto pts = line({0.0, -0.0, 1.0});
  EXPECT_EQ(distinct_points(pts).size(), 2u);
}

TEST(Gonzalez, TiesBreakTowardLowestIndex) {
  // From 0, points 2 and 3 are both at distance 5; index 2 must win.
  PointSet p(2);
  for (auto xy : {std::vector<double>{0, 0}, {1, 0}, {3, 4}, {4, 3}}) p.push_back(xy);
  const auto cs = gonzalez_from(p, 2, 0);
  EXPECT_EQ(cs.source_index[1], 2u);
}

TEST(Gonzalez, TwoApproximationOnRandomSets) {
  std::mt19937_64 rng(100);
  int violations = 0;
  for (int trial = 0; trial < 100; ++trial) {
    std::uniform_int_distribution<std::size_t> nd(1, 30), kd(1, 4), dd(1, 3);
    const auto pts = random_points(rng, nd(rng), dd(rng));
    const std::size_t k = kd(rng);
    const auto cs = gonzalez(pts, k, static_cast<std::uint64_t>(trial));
    EXPECT_EQ(cs.centers.size(), std::min(k, distinct_points(pts).size()));
    EXPECT_NEAR(cs.cover_radius, brute_hausdorff(pts, cs.centers), 1e-12);
    // distinct input points give the same optimum as the multiset
    if (cs.cover_radius > 2.0 * optimal_radius(pts, k) + 1e-12) ++violations;
  }
  EXPECT_EQ(violations, 0);
}

TEST(Gonzalez, RadiusNonincreasingInK) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const auto pts = random_points(rng, 40, 2);
    double last = INFINITY;
    for (std::size_t k = 1; k <= 12; ++k) {
      const auto cs = gonzalez(pts, k, 3);
      EXPECT_LE(cs.cover_radius, last);
      last = cs.cover_radius;
    }
  }
}

TEST(Gonzalez, RejectsBadInput) {
  EXPECT_THROW(gonzalez(PointSet(2), 1, 0), ContractViolation);
  EXPECT_THROW(gonzalez(line({1}), 0, 0), ContractViolation);
}

TEST(Hausdorff, Examples) {
  const auto a = line({1, 2, 3});
  EXPECT_EQ(directed_hausdorff(a, a), 0.0);
  PointSet p(2), q(2);
  p.push_back(std::vector<double>{0, 0});
  p.push_back(std::vector<double>{3, 4});
  q.push_back(std::vector<double>{0, 0});
  EXPECT_DOUBLE_EQ(directed_hausdorff(p, q), 5.0);
  EXPECT_THROW(directed_hausdorff(p, a), ContractViolation);
  EXPECT_THROW(directed_hausdorff(PointSet(2), q), ContractViolation);
}

TEST(Hausdorff, MatchesBruteForceAndDetectsSubsets) {
  std::mt19937_64 rng(55);
  for (int trial = 0; trial < 200; ++trial) {
    const auto a = random_points(rng, 1 + trial % 17, 3);
    const auto b = random_points(rng, 1 + trial % 11, 3);
    EXPECT_DOUBLE_EQ(directed_hausdorff(a, b), brute_hausdorff(a, b));
    // a subset of b is at distance 0; adding a new point makes it positive
    PointSet sub(3);
    for (std::size_t i = 0; i < b.size(); i += 2) sub.push_back(b[i]);
    EXPECT_EQ(directed_hausdorff(sub, b), 0.0);
    sub.push_back(std::vector<double>{100, 100, 100});
    EXPECT_GT(directed_hausdorff(sub, b), 0.0);
  }
}
